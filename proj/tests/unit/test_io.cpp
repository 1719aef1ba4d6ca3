#include <cstring>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "spad/io.hpp"
#include "support.hpp"

using namespace spad;
using namespace spad::io;

namespace {

void put(std::vector<std::uint8_t>& b, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// 1x2 image, T = 1 ms, tau = 50 ns; pixel 0 has two events, pixel 1 none.
std::vector<std::uint8_t> small_file() {
  std::vector<std::uint8_t> b = {'S', 'P', 'A', 'D', 'E', 'V', 'T', '1'};
  put(b, 1, 4);
  put(b, 1, 4);
  put(b, 2, 4);
  put(b, 1000000, 8);
  put(b, 50, 8);
  put(b, 2, 4);
  put(b, 1234, 8);
  put(b, 51234, 8);
  put(b, 0, 4);
  return b;
}

std::uint64_t offset_of(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_events(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  return UINT64_MAX;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("hand-built event file decodes") {
  const EventImage ev = decode_events(small_file());
  REQUIRE(ev.height() == 1);
  REQUIRE(ev.width() == 2);
  CHECK(ev.exposure.value() == doctest::Approx(1e-3));
  CHECK(ev.dead_time == doctest::Approx(50e-9));
  REQUIRE(ev.pixels[0].count() == 2);
  CHECK(ev.pixels[0].times[1] == doctest::Approx(51234e-12));
  CHECK(ev.pixels[1].count() == 0);
  CHECK(encode_events(ev) == small_file());
}

TEST_CASE("round trip is byte-exact") {
  Image img(5, 4, 0.7);
  img(1, 1) = 0.0;
  SensorConfig c;
  c.jitter_sigma = 1e-9;
  for (std::size_t n_det : {std::size_t{0}, std::size_t{30}}) {
    const EventImage ev = simulate_image(img, 0.4, c, 3, n_det);
    const auto bytes = encode_events(ev);
    const EventImage back = decode_events(bytes);
    CHECK(encode_events(back) == bytes);
    CHECK(back.pixels == ev.pixels);
    CHECK(back.exposure.has_value() == (n_det == 0));
  }
}

TEST_CASE("corruption is reported with its byte offset") {
  auto b = small_file();
  b[0] = 'X';
  CHECK(offset_of(b) == 0);

  b = small_file();
  b[8] = 2;
  CHECK(offset_of(b) == 8);

  b = small_file();
  b.resize(b.size() - 2);  // cut inside the last pixel's count
  CHECK(offset_of(b) == 56);

  b = small_file();
  b[48] = 0xE8;  // second timestamp becomes 1000: not increasing
  b[49] = 0x03;
  b[50] = 0;
  CHECK(offset_of(b) == 48);

  b = small_file();
  b[48] = 0xE2;  // 1250 ps, 16 ps after the first event
  b[49] = 0x04;
  b[50] = 0;
  CHECK(offset_of(b) == 48);

  b = small_file();
  b.push_back(0);
  CHECK(offset_of(b) == 60);

  b = small_file();
  b[36] = 9;  // count of 9 runs past the end
  CHECK(offset_of(b) == 36);
}

TEST_CASE("events after the exposure are rejected") {
  auto b = small_file();
  b[20] = 0x01;  // exposure 1 ns
  b[21] = 0;
  b[22] = 0;
  CHECK(offset_of(b) == 40);
}

TEST_CASE("file read and write") {
  spad::testing::TempDir dir;
  const EventImage ev = decode_events(small_file());
  write_events(dir / "a.evt", ev);
  CHECK(read_file(dir / "a.evt") == small_file());
  CHECK(read_events(dir / "a.evt").pixels == ev.pixels);
  CHECK_THROWS(read_events(dir / "missing.evt"));
}

TEST_CASE("PGM decoding") {
  const std::string text8 = "P5\n# made by hand\n3 1\n255\n";
  std::vector<std::uint8_t> b8(text8.begin(), text8.end());
  b8.insert(b8.end(), {0, 51, 255});
  const Image a = decode_pgm(b8);
  REQUIRE(a.width() == 3);
  CHECK(a[1] == doctest::Approx(0.2));
  CHECK(a[2] == 1.0);

  const std::string text16 = "P5 2 1 1000\n";
  std::vector<std::uint8_t> b16(text16.begin(), text16.end());
  b16.insert(b16.end(), {0x01, 0xF4, 0x03, 0xE8});  // 500, 1000 big-endian
  const Image c = decode_pgm(b16);
  CHECK(c[0] == 0.5);
  CHECK(c[1] == 1.0);

  std::vector<std::uint8_t> bad = {'P', '2', '\n'};
  CHECK_THROWS_AS(decode_pgm(bad), FormatError);
  b8.pop_back();
  CHECK_THROWS_AS(decode_pgm(b8), FormatError);
}

TEST_CASE("16-bit PGM output") {
  Image img(2, 2, 0.0);
  img[1] = 1.0;
  img[2] = 0.5;
  img[3] = 1.7;
  const auto bytes = encode_pgm16(img);
  const std::string header = "P5\n2 2\n65535\n";
  REQUIRE(bytes.size() == header.size() + 8);
  CHECK(std::equal(header.begin(), header.end(), bytes.begin()));
  const Image back = decode_pgm(bytes);
  CHECK(back[0] == 0.0);
  CHECK(back[1] == 1.0);
  CHECK(back[2] == doctest::Approx(0.5).epsilon(1e-4));
  CHECK(back[3] == 1.0);
}

TEST_CASE("flux CSV") {
  spad::testing::TempDir dir;
  Grid<double> flux(1, 2, 0.0);
  flux[1] = 1234.5;
  Grid<std::uint8_t> flags(1, 2, 0);
  flags[0] = 1;
  write_flux_csv(dir / "f.csv", flux, &flags);
  std::ifstream f(dir / "f.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == "row,col,flux,flag\n0,0,0,1\n0,1,1234.5,0\n");
}

}
