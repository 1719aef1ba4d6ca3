#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "spad/cli.hpp"
#include "spad/io.hpp"
#include "spad/likelihood.hpp"
#include "support.hpp"

using namespace spad;
using spad::testing::read_bytes;
using spad::testing::TempDir;

namespace {

struct Run {
  int code;
  std::string out, err;
};

template <typename F>
Run capture(F&& f) {
  std::ostringstream out, err;
  const int code = f(out, err);
  return {code, out.str(), err.str()};
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::vector<std::uint8_t> gradient_pixels(std::size_t h, std::size_t w) {
  std::vector<std::uint8_t> px(h * w);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(i * 255 / (px.size() - 1));
  return px;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate is deterministic in the seed") {
  TempDir dir;
  spad::testing::write_pgm8(dir / "in.pgm", 8, 8, gradient_pixels(8, 8));
  cli::SimulateArgs args;
  args.image = dir / "in.pgm";
  args.seed = 5;
  args.out = dir / "a.evt";
  const Run first = capture([&](auto& o, auto& e) { return cli::simulate(args, o, e); });
  REQUIRE(first.code == 0);
  CHECK(first.out.find("count histogram") != std::string::npos);
  args.out = dir / "b.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(args, o, e); }).code == 0);
  CHECK(read_bytes(dir / "a.evt") == read_bytes(dir / "b.evt"));
  args.seed = 6;
  args.out = dir / "c.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(args, o, e); }).code == 0);
  CHECK(read_bytes(dir / "a.evt") != read_bytes(dir / "c.evt"));
}

TEST_CASE("a black image without dark counts records nothing") {
  TempDir dir;
  spad::testing::write_pgm8(dir / "black.pgm", 4, 5, std::vector<std::uint8_t>(20, 0));
  write_text(dir / "run.cfg", "dark_count_rate = 0\n");
  cli::SimulateArgs args;
  args.image = dir / "black.pgm";
  args.config = dir / "run.cfg";
  args.out = dir / "black.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(args, o, e); }).code == 0);
  const EventImage ev = io::read_events(dir / "black.evt");
  for (const auto& s : ev.pixels) CHECK(s.count() == 0);

  cli::MleArgs mle{dir / "black.evt", dir / "black_mle.pgm"};
  REQUIRE(capture([&](auto& o, auto& e) { return cli::mle(mle, o, e); }).code == 0);
  for (double v : io::read_pgm(dir / "black_mle.pgm")) CHECK(v == 0.0);
}

TEST_CASE("fixed-count mode from the command line") {
  TempDir dir;
  spad::testing::write_pgm8(dir / "in.pgm", 4, 4, std::vector<std::uint8_t>(16, 128));
  cli::SimulateArgs args;
  args.image = dir / "in.pgm";
  args.out = dir / "fc.evt";
  args.fixed_count = 17;
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(args, o, e); }).code == 0);
  const EventImage ev = io::read_events(dir / "fc.evt");
  CHECK_FALSE(ev.exposure.has_value());
  for (const auto& s : ev.pixels) CHECK(s.count() == 17);
}

TEST_CASE("simulate then mle recovers a uniform flux") {
  TempDir dir;
  spad::testing::write_pgm8(dir / "white.pgm", 32, 32, std::vector<std::uint8_t>(1024, 255));
  write_text(dir / "run.cfg", "jitter_sigma = 0\nlux = 4\n");
  cli::SimulateArgs sim;
  sim.image = dir / "white.pgm";
  sim.config = dir / "run.cfg";
  sim.out = dir / "w.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(sim, o, e); }).code == 0);
  cli::MleArgs mle{dir / "w.evt", dir / "w.pgm"};
  REQUIRE(capture([&](auto& o, auto& e) { return cli::mle(mle, o, e); }).code == 0);

  const RunConfig config = RunConfig::load(dir / "run.cfg");
  const double truth = config.reference_flux() + config.sensor.dark_count_rate;
  std::ifstream csv(dir / "w.csv");
  std::string line;
  std::getline(csv, line);
  double sum = 0.0;
  std::size_t n = 0;
  while (std::getline(csv, line)) {
    std::istringstream ss(line);
    std::string r, c, f;
    std::getline(ss, r, ',');
    std::getline(ss, c, ',');
    std::getline(ss, f, ',');
    sum += std::stod(f);
    ++n;
  }
  REQUIRE(n == 1024);
  const double expected_count = truth * config.sensor.exposure;
  const double sigma = truth / std::sqrt(expected_count * n);
  CHECK(std::abs(sum / n - truth) < 3.0 * sigma);
}

TEST_CASE("mle on a single pixel matches the scalar estimate") {
  TempDir dir;
  spad::testing::write_pgm8(dir / "one.pgm", 1, 1, {200});
  cli::SimulateArgs sim;
  sim.image = dir / "one.pgm";
  sim.out = dir / "one.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(sim, o, e); }).code == 0);
  cli::MleArgs mle{dir / "one.evt", dir / "one_mle.pgm"};
  REQUIRE(capture([&](auto& o, auto& e) { return cli::mle(mle, o, e); }).code == 0);
  const EventImage ev = io::read_events(dir / "one.evt");
  std::ifstream csv(dir / "one_mle.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(std::stod(row.substr(4)) == doctest::Approx(mle_flux(ev.pixels[0]).flux).epsilon(1e-12));
}

TEST_CASE("corrupt event files exit with the offset") {
  TempDir dir;
  io::write_file(dir / "bad.evt", {'S', 'P', 'A', 'D', 'E', 'V', 'T', '1', 1, 0});
  cli::MleArgs mle{dir / "bad.evt", dir / "x.pgm"};
  const Run r = capture([&](auto& o, auto& e) { return cli::mle(mle, o, e); });
  CHECK(r.code != 0);
  CHECK(r.err.find("byte offset 8") != std::string::npos);
}

TEST_CASE("malformed inputs exit nonzero") {
  TempDir dir;
  write_text(dir / "bad.pgm", "P2\n1 1\n255\n0\n");
  write_text(dir / "bad.cfg", "no_such_key = 1\n");
  spad::testing::write_pgm8(dir / "ok.pgm", 1, 1, {1});
  cli::SimulateArgs args;
  args.image = dir / "bad.pgm";
  args.out = dir / "o.evt";
  CHECK(capture([&](auto& o, auto& e) { return cli::simulate(args, o, e); }).code != 0);
  args.image = dir / "ok.pgm";
  args.config = dir / "bad.cfg";
  const Run r = capture([&](auto& o, auto& e) { return cli::simulate(args, o, e); });
  CHECK(r.code != 0);
  CHECK(r.err.find("no_such_key") != std::string::npos);
}

TEST_CASE("verify passes by default and fails on a corrupted CDF") {
  TempDir dir;
  write_text(dir / "v.cfg", "verify_pixels = 20000\n");
  cli::VerifyArgs args;
  args.config = dir / "v.cfg";
  const Run ok = capture([&](auto& o, auto& e) { return cli::verify(args, o, e); });
  CHECK(ok.code == 0);
  CHECK(ok.out.find("FAIL") == std::string::npos);

  write_text(dir / "v0.cfg", "verify_pixels = 20000\ndead_time = 0\n");
  args.config = dir / "v0.cfg";
  const Run zero = capture([&](auto& o, auto& e) { return cli::verify(args, o, e); });
  CHECK(zero.code == 0);

  args.config = dir / "v.cfg";
  args.inject_cdf_fault = true;
  const Run bad = capture([&](auto& o, auto& e) { return cli::verify(args, o, e); });
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL normalization") != std::string::npos);
}

TEST_CASE("reconstruct writes an image and metrics") {
  TempDir dir;
  spad::testing::write_pgm8(dir / "in.pgm", 6, 6, gradient_pixels(6, 6));
  write_text(dir / "run.cfg", "steps = 200\n");
  cli::SimulateArgs sim;
  sim.image = dir / "in.pgm";
  sim.config = dir / "run.cfg";
  sim.out = dir / "in.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(sim, o, e); }).code == 0);

  cli::ReconstructArgs rec;
  rec.events = dir / "in.evt";
  rec.config = dir / "run.cfg";
  rec.prior = "smooth:2";
  rec.reference = dir / "in.pgm";
  rec.out = dir / "a.pgm";
  const Run r = capture([&](auto& o, auto& e) { return cli::reconstruct(rec, o, e); });
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(read_bytes(dir / "a.metrics.csv").size() > 0);
  std::ifstream metrics(dir / "a.metrics.csv");
  std::stringstream ss;
  ss << metrics.rdbuf();
  CHECK(ss.str().find("psnr_db,") != std::string::npos);

  rec.out = dir / "b.pgm";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::reconstruct(rec, o, e); }).code == 0);
  CHECK(read_bytes(dir / "a.pgm") == read_bytes(dir / "b.pgm"));
  CHECK(read_bytes(dir / "a.csv") == read_bytes(dir / "b.csv"));
}

TEST_CASE("reconstruct against a remote zero-score server") {
  TempDir dir;
  spad::testing::FramedStubServer server(spad::testing::FramedStubServer::Kind::kUnix);
  spad::testing::write_pgm8(dir / "in.pgm", 2, 2, {10, 90, 160, 250});
  write_text(dir / "run.cfg", "steps = 40\n");
  cli::SimulateArgs sim;
  sim.image = dir / "in.pgm";
  sim.out = dir / "in.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(sim, o, e); }).code == 0);
  cli::ReconstructArgs rec;
  rec.events = dir / "in.evt";
  rec.config = dir / "run.cfg";
  rec.prior = "remote:" + server.address();
  rec.out = dir / "r.pgm";
  const Run r = capture([&](auto& o, auto& e) { return cli::reconstruct(rec, o, e); });
  CHECK_MESSAGE(r.code == 0, r.err);
  CHECK(server.requests() == 40);
}

TEST_CASE("reconstruct reports bad priors and unreachable servers") {
  TempDir dir;
  spad::testing::write_pgm8(dir / "in.pgm", 1, 1, {100});
  cli::SimulateArgs sim;
  sim.image = dir / "in.pgm";
  sim.out = dir / "in.evt";
  REQUIRE(capture([&](auto& o, auto& e) { return cli::simulate(sim, o, e); }).code == 0);
  cli::ReconstructArgs rec;
  rec.events = dir / "in.evt";
  rec.out = dir / "r.pgm";
  for (const char* spec : {"gaussian:0.1", "smooth:x", "laplace:1"}) {
    rec.prior = spec;
    CHECK(capture([&](auto& o, auto& e) { return cli::reconstruct(rec, o, e); }).code != 0);
  }
  rec.prior = "remote:unix:/nonexistent/score.sock";
  const Run r = capture([&](auto& o, auto& e) { return cli::reconstruct(rec, o, e); });
  CHECK(r.code != 0);
  CHECK(r.err.find("cannot connect") != std::string::npos);
}

}
