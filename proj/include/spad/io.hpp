#ifndef SPAD_IO_HPP_
#define SPAD_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "spad/grid.hpp"
#include "spad/reconstruction.hpp"
#include "spad/simulator.hpp"

namespace spad::io {

// Event file layout, all integers little-endian:
//   char[8] "SPADEVT1" | u32 version | u32 height | u32 width
//   | u64 exposure_ns (0 = unbounded) | u64 dead_time_ns
//   | per pixel, row-major: u32 count | u64 timestamp_ps[count]
inline constexpr char kEventMagic[8] = {'S', 'P', 'A', 'D', 'E', 'V', 'T', '1'};
inline constexpr std::uint32_t kEventVersion = 1;

class FormatError : public std::runtime_error {
 public:
  FormatError(std::uint64_t offset, const std::string& what)
      : std::runtime_error("byte offset " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

std::vector<std::uint8_t> encode_events(const EventImage& events);
EventImage decode_events(const std::vector<std::uint8_t>& bytes);

void write_events(const std::filesystem::path& path, const EventImage& events);
EventImage read_events(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes);

// Binary PGM (P5), 8- or 16-bit, values scaled to [0, 1].
Image read_pgm(const std::filesystem::path& path);
Image decode_pgm(const std::vector<std::uint8_t>& bytes);
// Writes 16-bit P5; values are clamped to [0, 1] and scaled to 65535.
void write_pgm16(const std::filesystem::path& path, const Image& image);
std::vector<std::uint8_t> encode_pgm16(const Image& image);

// row,col,value[,flag] per pixel with a header line.
void write_flux_csv(const std::filesystem::path& path, const Grid<double>& flux,
                    const Grid<std::uint8_t>* flags = nullptr);

}  // namespace spad::io

#endif  // SPAD_IO_HPP_
