#ifndef SPAD_SCORE_PROTOCOL_HPP_
#define SPAD_SCORE_PROTOCOL_HPP_

// Wire protocol for remote prior scores. See docs/score_protocol.md.
//
// Request payload:  u32 step | u32 height | u32 width | f32[height*width]
// Response payload: f32[height*width]
// All integers and floats little-endian, pixels row-major.
//
// Framed stream transport (unix or tcp socket), one exchange per frame:
//   client -> server: u32 length | request payload
//   server -> client: u32 length | u32 status | body
// where length counts the bytes after the length word, status 0 carries a
// response payload and any other status carries a UTF-8 error message.
//
// HTTP transport: POST /score with the request payload as the body
// (application/octet-stream); 200 returns the response payload, any other
// status returns an error message.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spad/reconstruction.hpp"

namespace spad::protocol {

using Bytes = std::vector<std::uint8_t>;

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoreRequest {
  std::uint32_t step = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<float> values;
};

inline constexpr std::uint32_t kStatusOk = 0;
inline constexpr std::uint32_t kStatusError = 1;
inline constexpr std::size_t kMaxFrameBytes = 1u << 30;

Bytes encode_request(std::uint32_t step, const Image& state);
ScoreRequest decode_request(std::span<const std::uint8_t> payload);
Bytes encode_response(std::span<const float> score);
Image decode_response(std::span<const std::uint8_t> payload,
                      std::uint32_t height, std::uint32_t width);

// Length-prefixed frames of the stream transport.
Bytes frame_request(std::span<const std::uint8_t> payload);
Bytes frame_response(std::uint32_t status, std::span<const std::uint8_t> body);

void put_u32(Bytes& out, std::uint32_t v);
std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset);

// One request/response exchange carrying protocol payloads.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual Bytes exchange(const Bytes& request_payload) = 0;
  virtual std::string describe() const = 0;
};

// Address forms: "unix:/path/to.sock", "tcp:host:port", "http://host:port".
std::unique_ptr<Transport> connect(const std::string& address);

// Prior whose score comes from a score server. Not safe for concurrent use:
// requests share one connection.
class RemotePrior final : public PriorScore {
 public:
  explicit RemotePrior(std::unique_ptr<Transport> transport);
  explicit RemotePrior(const std::string& address);

  Image evaluate(const Image& state, std::size_t step) const override;
  bool concurrent_safe() const override { return false; }
  std::string name() const override;

 private:
  std::unique_ptr<Transport> transport_;
};

}  // namespace spad::protocol

#endif  // SPAD_SCORE_PROTOCOL_HPP_
