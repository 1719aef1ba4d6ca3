#include "support.hpp"

#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "httplib.h"

namespace spad::testing {

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    fs::path p = fs::temp_directory_path() /
                 ("spad-test-" + std::to_string(rd()) + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path fixture(const std::string& name) {
  return fs::path(SPAD_FIXTURE_DIR) / name;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_pgm8(const fs::path& path, std::size_t height, std::size_t width,
                const std::vector<std::uint8_t>& pixels) {
  std::ofstream f(path, std::ios::binary);
  f << "P5\n" << width << ' ' << height << "\n255\n";
  f.write(reinterpret_cast<const char*>(pixels.data()),
          static_cast<std::streamsize>(pixels.size()));
}

namespace {

bool read_exact(int fd, std::uint8_t* out, std::size_t n) {
  while (n > 0) {
    const ssize_t got = ::read(fd, out, n);
    if (got <= 0) return false;
    out += got;
    n -= static_cast<std::size_t>(got);
  }
  return true;
}

void write_exact(int fd, const std::vector<std::uint8_t>& bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t put = ::write(fd, bytes.data() + off, bytes.size() - off);
    if (put <= 0) return;
    off += static_cast<std::size_t>(put);
  }
}

std::uint32_t le32(const std::uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void push32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

FramedStubServer::FramedStubServer(Kind kind, bool fail) : fail_(fail) {
  if (kind == Kind::kUnix) {
    socket_path_ = fs::temp_directory_path() /
                   ("spad-stub-" + std::to_string(::getpid()) + "-" +
                    std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".sock");
    fs::remove(socket_path_);
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::strncpy(addr.sun_path, socket_path_.c_str(), sizeof(addr.sun_path) - 1);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      throw std::runtime_error("stub: bind failed");
    }
    address_ = "unix:" + socket_path_.string();
  } else {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      throw std::runtime_error("stub: bind failed");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    address_ = "tcp:127.0.0.1:" + std::to_string(ntohs(addr.sin_port));
  }
  ::listen(listen_fd_, 4);
  thread_ = std::thread([this] { serve(); });
}

FramedStubServer::~FramedStubServer() {
  stop_ = true;
  thread_.join();
  ::close(listen_fd_);
  if (!socket_path_.empty()) fs::remove(socket_path_);
}

void FramedStubServer::serve() {
  while (!stop_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 20) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    for (;;) {
      std::uint8_t head[4];
      if (!read_exact(fd, head, 4)) break;
      const std::uint32_t length = le32(head);
      std::vector<std::uint8_t> payload(length);
      if (!read_exact(fd, payload.data(), length) || length < 12) break;
      ++requests_;
      const std::uint32_t h = le32(&payload[4]);
      const std::uint32_t w = le32(&payload[8]);
      std::vector<std::uint8_t> reply;
      if (fail_) {
        const std::string msg = "stub refuses step " + std::to_string(le32(&payload[0]));
        push32(reply, static_cast<std::uint32_t>(msg.size() + 4));
        push32(reply, 1);
        reply.insert(reply.end(), msg.begin(), msg.end());
      } else {
        push32(reply, 4 + 4 * h * w);
        push32(reply, 0);
        reply.resize(reply.size() + 4 * h * w, 0);
      }
      write_exact(fd, reply);
    }
    ::close(fd);
  }
}

struct HttpStubServer::Impl {
  httplib::Server server;
  int port = 0;
  std::thread thread;
};

HttpStubServer::HttpStubServer() : impl_(std::make_unique<Impl>()) {
  impl_->server.Post("/score", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    ++requests_;
    const auto* p = reinterpret_cast<const std::uint8_t*>(req.body.data());
    if (req.body.size() < 12) {
      res.status = 400;
      res.set_content("short request", "text/plain");
      return;
    }
    const std::uint32_t h = le32(p + 4), w = le32(p + 8);
    res.set_content(std::string(4 * h * w, '\0'), "application/octet-stream");
  });
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

HttpStubServer::~HttpStubServer() {
  impl_->server.stop();
  impl_->thread.join();
}

std::string HttpStubServer::address() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace spad::testing
