"""Regenerates the golden protocol frames with Python's struct module."""
import pathlib
import struct

HERE = pathlib.Path(__file__).parent

STEP, H, W = 999, 2, 3
STATE = [0.0, -1.0, 0.5, 0.001, 3.25, -2.5]
SCORE = [1.5, -0.25, 0.0, 2.0, -8.0, 0.125]


def request_payload():
    return struct.pack("<III", STEP, H, W) + struct.pack(f"<{H * W}f", *STATE)


def frame(payload):
    return struct.pack("<I", len(payload)) + payload


def response_frame(status, body):
    return struct.pack("<II", len(body) + 4, status) + body


fixtures = {
    "request_payload.bin": request_payload(),
    "request_frame.bin": frame(request_payload()),
    "response_payload.bin": struct.pack(f"<{H * W}f", *SCORE),
    "response_frame_ok.bin": response_frame(0, struct.pack(f"<{H * W}f", *SCORE)),
    "response_frame_error.bin": response_frame(1, b"shape out of range"),
}

for name, data in fixtures.items():
    (HERE / name).write_bytes(data)
