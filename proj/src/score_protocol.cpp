#include "spad/score_protocol.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <limits>

#include "httplib.h"

namespace spad::protocol {

namespace {

void put_f32(Bytes& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

float get_f32(std::span<const std::uint8_t> in, std::size_t offset) {
  return std::bit_cast<float>(get_u32(in, offset));
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw ProtocolError(std::string(what) + " exceeds 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

std::string errno_text() { return std::strerror(errno); }

class SocketTransport final : public Transport {
 public:
  SocketTransport(int fd, std::string description)
      : fd_(fd), description_(std::move(description)) {}
  ~SocketTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }
  SocketTransport(const SocketTransport&) = delete;
  SocketTransport& operator=(const SocketTransport&) = delete;

  Bytes exchange(const Bytes& request_payload) override {
    const Bytes frame = frame_request(request_payload);
    write_all(frame.data(), frame.size());
    std::uint8_t header[4];
    read_all(header, 4);
    const std::uint32_t length = get_u32(header, 0);
    if (length < 4 || length > kMaxFrameBytes) {
      throw ProtocolError(description_ + ": bad response frame length " +
                          std::to_string(length));
    }
    Bytes body(length);
    read_all(body.data(), body.size());
    const std::uint32_t status = get_u32(body, 0);
    if (status != kStatusOk) {
      throw ProtocolError(description_ + ": server error " +
                          std::to_string(status) + ": " +
                          std::string(body.begin() + 4, body.end()));
    }
    return Bytes(body.begin() + 4, body.end());
  }

  std::string describe() const override { return description_; }

 private:
  void write_all(const std::uint8_t* data, std::size_t n) {
    while (n > 0) {
      const ssize_t sent = ::send(fd_, data, n, MSG_NOSIGNAL);
      if (sent <= 0) {
        if (sent < 0 && errno == EINTR) continue;
        throw ProtocolError(description_ + ": send failed: " + errno_text());
      }
      data += sent;
      n -= static_cast<std::size_t>(sent);
    }
  }

  void read_all(std::uint8_t* data, std::size_t n) {
    while (n > 0) {
      const ssize_t got = ::recv(fd_, data, n, 0);
      if (got == 0) throw ProtocolError(description_ + ": connection closed");
      if (got < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(description_ + ": recv failed: " + errno_text());
      }
      data += got;
      n -= static_cast<std::size_t>(got);
    }
  }

  int fd_;
  std::string description_;
};

std::unique_ptr<Transport> connect_unix(const std::string& path) {
  sockaddr_un addr{};
  if (path.size() >= sizeof(addr.sun_path)) {
    throw ProtocolError("unix socket path too long: " + path);
  }
  addr.sun_family = AF_UNIX;
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  const int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) throw ProtocolError("socket(): " + errno_text());
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const std::string why = errno_text();
    ::close(fd);
    throw ProtocolError("cannot connect to unix:" + path + ": " + why);
  }
  return std::make_unique<SocketTransport>(fd, "unix:" + path);
}

std::unique_ptr<Transport> connect_tcp(const std::string& host,
                                       const std::string& port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found);
  if (rc != 0) {
    throw ProtocolError("cannot resolve " + host + ":" + port + ": " +
                        gai_strerror(rc));
  }
  std::string why = "no address";
  for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      ::freeaddrinfo(found);
      return std::make_unique<SocketTransport>(fd, "tcp:" + host + ":" + port);
    }
    why = errno_text();
    ::close(fd);
  }
  ::freeaddrinfo(found);
  throw ProtocolError("cannot connect to tcp:" + host + ":" + port + ": " + why);
}

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const std::string& base) : base_(base), client_(base) {
    client_.set_connection_timeout(5, 0);
    client_.set_read_timeout(300, 0);
  }

  Bytes exchange(const Bytes& request_payload) override {
    auto res = client_.Post(
        "/score", reinterpret_cast<const char*>(request_payload.data()),
        request_payload.size(), "application/octet-stream");
    if (!res) {
      throw ProtocolError("cannot reach " + base_ + "/score: " +
                          httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw ProtocolError(base_ + "/score returned HTTP " +
                          std::to_string(res->status) + ": " + res->body);
    }
    return Bytes(res->body.begin(), res->body.end());
  }

  std::string describe() const override { return base_; }

 private:
  std::string base_;
  httplib::Client client_;
};

}  // namespace

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
  if (offset + 4 > in.size()) {
    throw ProtocolError("truncated message at byte " + std::to_string(offset));
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
  return v;
}

Bytes encode_request(std::uint32_t step, const Image& state) {
  Bytes out;
  out.reserve(12 + 4 * state.size());
  put_u32(out, step);
  put_u32(out, checked_u32(state.height(), "height"));
  put_u32(out, checked_u32(state.width(), "width"));
  for (double v : state) put_f32(out, static_cast<float>(v));
  return out;
}

ScoreRequest decode_request(std::span<const std::uint8_t> payload) {
  ScoreRequest r;
  r.step = get_u32(payload, 0);
  r.height = get_u32(payload, 4);
  r.width = get_u32(payload, 8);
  const std::size_t n = static_cast<std::size_t>(r.height) * r.width;
  if (payload.size() != 12 + 4 * n) {
    throw ProtocolError("request of " + std::to_string(r.height) + "x" +
                        std::to_string(r.width) + " carries " +
                        std::to_string(payload.size()) + " bytes, expected " +
                        std::to_string(12 + 4 * n));
  }
  r.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.values[i] = get_f32(payload, 12 + 4 * i);
  return r;
}

Bytes encode_response(std::span<const float> score) {
  Bytes out;
  out.reserve(4 * score.size());
  for (float v : score) put_f32(out, v);
  return out;
}

Image decode_response(std::span<const std::uint8_t> payload,
                      std::uint32_t height, std::uint32_t width) {
  const std::size_t n = static_cast<std::size_t>(height) * width;
  if (payload.size() != 4 * n) {
    throw ProtocolError("response carries " + std::to_string(payload.size()) +
                        " bytes, expected " + std::to_string(4 * n) + " for " +
                        std::to_string(height) + "x" + std::to_string(width));
  }
  Image out(height, width);
  for (std::size_t i = 0; i < n; ++i) out[i] = get_f32(payload, 4 * i);
  return out;
}

Bytes frame_request(std::span<const std::uint8_t> payload) {
  Bytes out;
  out.reserve(4 + payload.size());
  put_u32(out, checked_u32(payload.size(), "frame length"));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bytes frame_response(std::uint32_t status, std::span<const std::uint8_t> body) {
  Bytes out;
  out.reserve(8 + body.size());
  put_u32(out, checked_u32(body.size() + 4, "frame length"));
  put_u32(out, status);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::unique_ptr<Transport> connect(const std::string& address) {
  if (address.rfind("unix:", 0) == 0) return connect_unix(address.substr(5));
  if (address.rfind("http://", 0) == 0) {
    return std::make_unique<HttpTransport>(address);
  }
  if (address.rfind("tcp:", 0) == 0) {
    const std::string rest = address.substr(4);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
      throw ProtocolError("tcp address needs host:port, got " + address);
    }
    return connect_tcp(rest.substr(0, colon), rest.substr(colon + 1));
  }
  throw ProtocolError("unknown score server address '" + address +
                      "' (expected unix:PATH, tcp:HOST:PORT or http://HOST:PORT)");
}

RemotePrior::RemotePrior(std::unique_ptr<Transport> transport)
    : transport_(std::move(transport)) {}

RemotePrior::RemotePrior(const std::string& address)
    : transport_(connect(address)) {}

Image RemotePrior::evaluate(const Image& state, std::size_t step) const {
  const Bytes reply =
      transport_->exchange(encode_request(checked_u32(step, "step"), state));
  return decode_response(reply, checked_u32(state.height(), "height"),
                         checked_u32(state.width(), "width"));
}

std::string RemotePrior::name() const { return "remote " + transport_->describe(); }

}  // namespace spad::protocol
