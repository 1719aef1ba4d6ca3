#include "spad/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace spad::io {

namespace {

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint64_t le(int n, const char* what) {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(pos_, std::string("truncated while reading ") + what);
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void skip(std::size_t n) { pos_ += n; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::int64_t to_ns(double seconds) { return std::llround(seconds * 1e9); }
std::int64_t to_ps(double seconds) { return std::llround(seconds * 1e12); }

}  // namespace

std::vector<std::uint8_t> encode_events(const EventImage& events) {
  if (events.height() > UINT32_MAX || events.width() > UINT32_MAX) {
    throw std::invalid_argument("event image too large for the file format");
  }
  std::vector<std::uint8_t> out(kEventMagic, kEventMagic + 8);
  put_le(out, kEventVersion, 4);
  put_le(out, events.height(), 4);
  put_le(out, events.width(), 4);
  const std::int64_t exposure_ns = events.exposure ? to_ns(*events.exposure) : 0;
  if (events.exposure && exposure_ns <= 0) {
    throw std::invalid_argument("bounded exposure rounds to 0 ns");
  }
  put_le(out, static_cast<std::uint64_t>(exposure_ns), 8);
  put_le(out, static_cast<std::uint64_t>(to_ns(events.dead_time)), 8);
  for (const EventStream& s : events.pixels) {
    if (s.times.size() > UINT32_MAX) {
      throw std::invalid_argument("pixel has too many events for the file format");
    }
    put_le(out, s.times.size(), 4);
    for (double t : s.times) {
      const std::int64_t ps = to_ps(t);
      if (ps < 0) throw std::invalid_argument("negative timestamp");
      put_le(out, static_cast<std::uint64_t>(ps), 8);
    }
  }
  return out;
}

EventImage decode_events(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kEventMagic, 8) != 0) {
    throw FormatError(0, "missing SPADEVT1 magic");
  }
  Reader in(bytes);
  in.skip(8);
  const auto version = in.le(4, "version");
  if (version != kEventVersion) {
    throw FormatError(8, "unsupported version " + std::to_string(version));
  }
  const auto height = in.le(4, "height");
  const auto width = in.le(4, "width");
  const auto exposure_ns = in.le(8, "exposure_ns");
  const auto dead_ns = in.le(8, "dead_time_ns");
  if (height == 0 || width == 0) throw FormatError(12, "empty image dimensions");
  // Every pixel needs at least its 4-byte count.
  if (height * width > in.remaining() / 4) {
    throw FormatError(12, "dimensions " + std::to_string(height) + "x" +
                              std::to_string(width) +
                              " exceed the file payload");
  }

  EventImage out;
  if (exposure_ns != 0) out.exposure = static_cast<double>(exposure_ns) / 1e9;
  out.dead_time = static_cast<double>(dead_ns) / 1e9;
  out.pixels = Grid<EventStream>(height, width);
  const std::uint64_t dead_ps = dead_ns * 1000;
  const std::uint64_t exposure_ps = exposure_ns * 1000;

  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const std::size_t count_at = in.pos();
    const auto count = in.le(4, "event count");
    if (count > in.remaining() / 8) {
      throw FormatError(count_at, "pixel " + std::to_string(i) + " claims " +
                                      std::to_string(count) +
                                      " events beyond end of file");
    }
    EventStream& s = out.pixels[i];
    s.exposure = out.exposure;
    s.dead_time = out.dead_time;
    s.times.resize(count);
    std::uint64_t prev = 0;
    for (std::uint64_t j = 0; j < count; ++j) {
      const std::size_t at = in.pos();
      const std::uint64_t ps = in.le(8, "timestamp");
      if (j > 0 && (ps <= prev || ps - prev < dead_ps)) {
        throw FormatError(at, "pixel " + std::to_string(i) + " event " +
                                  std::to_string(j) +
                                  " violates ordering or dead time");
      }
      if (exposure_ns != 0 && ps > exposure_ps) {
        throw FormatError(at, "pixel " + std::to_string(i) + " event " +
                                  std::to_string(j) + " after the exposure");
      }
      s.times[j] = static_cast<double>(ps) / 1e12;
      prev = ps;
    }
  }
  if (in.remaining() != 0) {
    throw FormatError(in.pos(), std::to_string(in.remaining()) +
                                    " trailing bytes after the last pixel");
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), {});
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot create " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

void write_events(const std::filesystem::path& path, const EventImage& events) {
  write_file(path, encode_events(events));
}

EventImage read_events(const std::filesystem::path& path) {
  return decode_events(read_file(path));
}

Image decode_pgm(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError(pos, "PGM: " + why);
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&](const char* what) {
    skip_space();
    std::uint64_t v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1u << 24) throw fail(std::string(what) + " too large");
      ++pos;
    }
    if (pos == start) throw fail(std::string("expected ") + what);
    return v;
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw fail("not a binary (P5) PGM");
  }
  pos = 2;
  const auto width = number("width");
  const auto height = number("height");
  const auto maxval = number("maxval");
  if (width == 0 || height == 0) throw fail("zero dimension");
  if (maxval == 0 || maxval > 65535) throw fail("maxval out of range");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw fail("missing whitespace before raster");
  }
  ++pos;
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  const std::size_t need = width * height * bpp;
  if (bytes.size() - pos < need) throw fail("raster truncated");

  Image img(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < img.size(); ++i) {
    std::uint32_t v = bpp == 1 ? bytes[pos + i]
                               : (static_cast<std::uint32_t>(bytes[pos + 2 * i]) << 8) |
                                     bytes[pos + 2 * i + 1];
    if (v > maxval) {
      pos += i * bpp;
      throw fail("sample exceeds maxval");
    }
    img[i] = v * scale;
  }
  return img;
}

Image read_pgm(const std::filesystem::path& path) {
  try {
    return decode_pgm(read_file(path));
  } catch (const FormatError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm16(const Image& image) {
  std::ostringstream header;
  header << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.reserve(out.size() + 2 * image.size());
  for (double v : image) {
    const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(c * 65535.0));
    out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  return out;
}

void write_pgm16(const std::filesystem::path& path, const Image& image) {
  write_file(path, encode_pgm16(image));
}

void write_flux_csv(const std::filesystem::path& path, const Grid<double>& flux,
                    const Grid<std::uint8_t>* flags) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot create " + path.string());
  f << (flags ? "row,col,flux,flag\n" : "row,col,flux\n");
  f << std::setprecision(17);
  for (std::size_t r = 0; r < flux.height(); ++r) {
    for (std::size_t c = 0; c < flux.width(); ++c) {
      f << r << ',' << c << ',' << flux(r, c);
      if (flags) f << ',' << static_cast<int>((*flags)(r, c));
      f << '\n';
    }
  }
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace spad::io
