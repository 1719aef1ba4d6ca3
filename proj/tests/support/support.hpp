#ifndef SPAD_TESTS_SUPPORT_HPP_
#define SPAD_TESTS_SUPPORT_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

namespace spad::testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

fs::path fixture(const std::string& name);
std::vector<std::uint8_t> read_bytes(const fs::path& path);
void write_pgm8(const fs::path& path, std::size_t height, std::size_t width,
                const std::vector<std::uint8_t>& pixels);

// Length-prefixed score server that answers every request with zeros of the
// request's shape, or with an error frame when `fail` is set. Parses frames
// by hand rather than through the library.
class FramedStubServer {
 public:
  enum class Kind { kUnix, kTcp };
  explicit FramedStubServer(Kind kind, bool fail = false);
  ~FramedStubServer();
  std::string address() const { return address_; }
  std::size_t requests() const { return requests_.load(); }

 private:
  void serve();
  int listen_fd_ = -1;
  bool fail_;
  std::string address_;
  fs::path socket_path_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

// HTTP POST /score server answering zeros.
class HttpStubServer {
 public:
  HttpStubServer();
  ~HttpStubServer();
  std::string address() const;
  std::size_t requests() const { return requests_.load(); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace spad::testing

#endif  // SPAD_TESTS_SUPPORT_HPP_
