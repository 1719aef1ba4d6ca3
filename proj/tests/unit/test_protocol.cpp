#include <cstring>

#include "doctest.h"
#include "spad/reconstruction.hpp"
#include "spad/score_protocol.hpp"
#include "support.hpp"

using namespace spad;
using namespace spad::protocol;
using spad::testing::fixture;
using spad::testing::read_bytes;

namespace {

Image fixture_state() {
  return Image(2, 3, std::vector<double>{0.0, -1.0, 0.5, 0.001, 3.25, -2.5});
}

const std::vector<float> kScore = {1.5f, -0.25f, 0.0f, 2.0f, -8.0f, 0.125f};

class ZeroPrior final : public PriorScore {
 public:
  Image evaluate(const Image& s, std::size_t) const override {
    return Image(s.height(), s.width(), 0.0);
  }
  std::string name() const override { return "zero"; }
};

}  // namespace

TEST_SUITE("protocol") {

TEST_CASE("request encoding matches the golden frames") {
  const Bytes payload = encode_request(999, fixture_state());
  CHECK(payload == read_bytes(fixture("request_payload.bin")));
  CHECK(frame_request(payload) == read_bytes(fixture("request_frame.bin")));
}

TEST_CASE("request decoding") {
  const ScoreRequest r = decode_request(read_bytes(fixture("request_payload.bin")));
  CHECK(r.step == 999);
  CHECK(r.height == 2);
  CHECK(r.width == 3);
  REQUIRE(r.values.size() == 6);
  CHECK(r.values[1] == -1.0f);
  CHECK(r.values[3] == 0.001f);
  Bytes truncated = read_bytes(fixture("request_payload.bin"));
  truncated.pop_back();
  CHECK_THROWS_AS(decode_request(truncated), ProtocolError);
}

TEST_CASE("response encoding matches the golden frames") {
  const Bytes payload = encode_response(kScore);
  CHECK(payload == read_bytes(fixture("response_payload.bin")));
  CHECK(frame_response(kStatusOk, payload) == read_bytes(fixture("response_frame_ok.bin")));
  const std::string msg = "shape out of range";
  const Bytes body(msg.begin(), msg.end());
  CHECK(frame_response(kStatusError, body) == read_bytes(fixture("response_frame_error.bin")));
}

TEST_CASE("response decoding") {
  const Image s = decode_response(read_bytes(fixture("response_payload.bin")), 2, 3);
  CHECK(s(1, 1) == -8.0);
  CHECK(s(0, 1) == -0.25);
  CHECK_THROWS_AS(decode_response(read_bytes(fixture("response_payload.bin")), 3, 3),
                  ProtocolError);
}

TEST_CASE("little-endian words") {
  Bytes b;
  put_u32(b, 0x01020304u);
  CHECK(b == Bytes{4, 3, 2, 1});
  CHECK(get_u32(b, 0) == 0x01020304u);
  CHECK_THROWS(get_u32(b, 1));
}

TEST_CASE("remote prior over each transport") {
  spad::testing::FramedStubServer unix_server(spad::testing::FramedStubServer::Kind::kUnix);
  spad::testing::FramedStubServer tcp_server(spad::testing::FramedStubServer::Kind::kTcp);
  spad::testing::HttpStubServer http_server;
  for (const std::string& address :
       {unix_server.address(), tcp_server.address(), http_server.address()}) {
    CAPTURE(address);
    RemotePrior prior(address);
    CHECK_FALSE(prior.concurrent_safe());
    for (std::size_t step : {0u, 7u, 999u}) {
      const Image s = prior.evaluate(Image(3, 5, 0.4), step);
      CHECK(s.height() == 3);
      CHECK(s.width() == 5);
      for (double v : s) CHECK(v == 0.0);
    }
  }
  CHECK(unix_server.requests() == 3);
  CHECK(tcp_server.requests() == 3);
  CHECK(http_server.requests() == 3);
}

TEST_CASE("server error frames surface as exceptions") {
  spad::testing::FramedStubServer server(spad::testing::FramedStubServer::Kind::kUnix, true);
  RemotePrior prior(server.address());
  try {
    prior.evaluate(Image(2, 2, 0.0), 12);
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(std::string(e.what()).find("stub refuses step 12") != std::string::npos);
  }
}

TEST_CASE("unreachable servers fail at connect") {
  CHECK_THROWS_AS(RemotePrior("unix:/nonexistent/spad.sock"), ProtocolError);
  CHECK_THROWS_AS(connect("carrier-pigeon:1"), ProtocolError);
}

TEST_CASE("a zero remote score reduces to guidance-only dynamics") {
  spad::testing::FramedStubServer server(spad::testing::FramedStubServer::Kind::kUnix);
  Image img(3, 3, 0.5);
  const EventImage ev = simulate_image(img, 0.4, SensorConfig{}, 4);
  ScheduleParams p;
  p.steps = 50;
  const ScheduleSet s = make_linear_schedule(p);
  const DomainTransform t{2e4, 1.0};
  RemotePrior remote(server.address());
  const DpsResult a = dps_reconstruct(ev, remote, t, s, 9);
  const DpsResult b = dps_reconstruct(ev, ZeroPrior{}, t, s, 9);
  CHECK(a.flux == b.flux);
  CHECK(server.requests() == 50);
}

}
