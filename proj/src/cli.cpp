#include "spad/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "spad/io.hpp"
#include "spad/priors.hpp"
#include "spad/score_protocol.hpp"
#include "spad/verify.hpp"

namespace spad::cli {

namespace {

double whole_nanoseconds(double seconds) {
  return static_cast<double>(std::llround(seconds * 1e9)) / 1e9;
}

void print_histogram(const EventImage& events, std::ostream& out) {
  std::size_t lo = SIZE_MAX, hi = 0, total = 0;
  for (const EventStream& s : events.pixels) {
    lo = std::min(lo, s.count());
    hi = std::max(hi, s.count());
    total += s.count();
  }
  const double mean = static_cast<double>(total) / events.pixels.size();
  out << "pixels " << events.pixels.size() << ", events " << total
      << ", counts min " << lo << " mean " << std::setprecision(6) << mean
      << " max " << hi << '\n';
  constexpr std::size_t kBins = 10;
  const std::size_t span = hi - lo + 1;
  const std::size_t width = (span + kBins - 1) / kBins;
  std::vector<std::size_t> bins((span + width - 1) / width, 0);
  for (const EventStream& s : events.pixels) ++bins[(s.count() - lo) / width];
  const std::size_t peak = *std::max_element(bins.begin(), bins.end());
  out << "count histogram:\n";
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const std::size_t from = lo + b * width;
    const std::size_t to = std::min(hi, from + width - 1);
    std::ostringstream label;
    label << from;
    if (to != from) label << '-' << to;
    const auto bar = peak == 0 ? 0 : (bins[b] * 40 + peak - 1) / peak;
    out << "  " << std::setw(13) << label.str() << ' ' << std::setw(8) << bins[b]
        << ' ' << std::string(bar, '#') << '\n';
  }
}

template <typename F>
int guarded(std::ostream& err, const char* command, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "spad " << command << ": " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

fs::path sidecar(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig config = args.config ? RunConfig::load(*args.config) : RunConfig{};
  if (args.seed) config.seed = *args.seed;
  if (args.lux) config.reference_lux = *args.lux;
  config.validate();
  return config;
}

std::unique_ptr<PriorScore> make_prior(const std::string& spec,
                                       const ScheduleSet& schedule) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) {
      throw std::invalid_argument("prior spec '" + spec + "': bad number '" + s + "'");
    }
    return v;
  };
  if (kind == "gaussian") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("prior spec '" + spec + "': expected gaussian:MEAN,STD");
    }
    return std::make_unique<GaussianPrior>(number(rest.substr(0, comma)),
                                           number(rest.substr(comma + 1)),
                                           schedule.alpha);
  }
  if (kind == "smooth") {
    return std::make_unique<SmoothnessPrior>(number(rest), schedule.alpha);
  }
  if (kind == "remote") {
    return std::make_unique<protocol::RemotePrior>(rest);
  }
  throw std::invalid_argument("prior spec '" + spec +
                              "': expected gaussian:MEAN,STD, smooth:WEIGHT or "
                              "remote:ADDRESS");
}

int simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, "simulate", [&] {
    RunConfig config = load_config(args);
    if (args.fixed_count) {
      config.mode = AcquisitionMode::kFixedCount;
      config.fixed_count = *args.fixed_count;
    }
    config.sensor.exposure = whole_nanoseconds(config.sensor.exposure);
    config.sensor.dead_time = whole_nanoseconds(config.sensor.dead_time);
    config.validate();

    const Image image = io::read_pgm(args.image);
    const std::size_t n_det =
        config.mode == AcquisitionMode::kFixedCount ? config.fixed_count : 0;
    const EventImage events = simulate_image(image, config.reference_lux,
                                             config.sensor, config.seed, n_det);
    io::write_events(args.out, events);

    out << "mode "
        << (n_det > 0 ? "fixed-count (" + std::to_string(n_det) + " per pixel)"
                      : std::string("fixed-exposure"))
        << ", " << image.height() << "x" << image.width() << ", lux "
        << config.reference_lux << ", seed " << config.seed << '\n';
    print_histogram(events, out);
    return 0;
  });
}

int mle(const MleArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, "mle", [&] {
    const EventImage events = io::read_events(args.events);
    const MleMap result = mle_reconstruct(events);
    const double peak = *std::max_element(result.flux.begin(), result.flux.end());
    Image normalized(result.flux.height(), result.flux.width());
    for (std::size_t i = 0; i < normalized.size(); ++i) {
      normalized[i] = peak > 0.0 ? result.flux[i] / peak : 0.0;
    }
    io::write_pgm16(args.out, normalized);
    io::write_flux_csv(sidecar(args.out, ".csv"), result.flux, &result.status);

    std::size_t boundary = 0, unbounded = 0;
    for (auto s : result.status) {
      boundary += s == static_cast<std::uint8_t>(MleStatus::kBoundary);
      unbounded += s == static_cast<std::uint8_t>(MleStatus::kUnboundedLikelihood);
    }
    out << "mle: " << events.height() << "x" << events.width()
        << ", peak flux " << peak << "/s, " << boundary << " zero-count pixels, "
        << unbounded << " unbounded-likelihood pixels\n";
    return 0;
  });
}

int verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, "verify", [&] {
    const RunConfig config = load_config(args);
    VerifyOptions options;
    options.exposure = config.sensor.exposure;
    options.dead_time = config.sensor.dead_time;
    options.flux = config.verify_flux;
    options.pixels = config.verify_pixels;
    options.seed = config.seed;
    options.corrupt_cdf = args.inject_cdf_fault;

    bool all = true;
    for (const CheckResult& r : run_verification(options)) {
      all = all && r.passed;
      out << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(28) << r.name
          << std::right << " measured " << std::setprecision(4) << std::scientific
          << r.measured << " threshold " << r.threshold << std::defaultfloat;
      if (!r.detail.empty()) out << "  (" << r.detail << ')';
      out << '\n';
    }
    out << (all ? "all checks passed\n" : "verification FAILED\n");
    return all ? 0 : 1;
  });
}

int reconstruct(const ReconstructArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, "reconstruct", [&] {
    const RunConfig config = load_config(args);
    const EventImage events = io::read_events(args.events);
    const DomainTransform transform = config.transform();
    const ScheduleSet schedule = config.make_schedule();
    const std::unique_ptr<PriorScore> prior = make_prior(args.prior, schedule);

    DpsOptions options;
    options.clip_estimate = config.clip_estimate;
    const DpsResult result =
        dps_reconstruct(events, *prior, transform, schedule, config.seed, options);

    const double white = transform.to_flux(1.0);
    Image gray(result.flux.height(), result.flux.width());
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = result.flux[i] / white;
    io::write_pgm16(args.out, gray);
    io::write_flux_csv(sidecar(args.out, ".csv"), result.flux);

    std::ostringstream metrics;
    metrics << std::setprecision(10) << "metric,value\n"
            << "steps," << schedule.steps() << '\n'
            << "seed," << config.seed << '\n'
            << "prior," << prior->name() << '\n'
            << "transform_a," << transform.a << '\n'
            << "transform_b," << transform.b << '\n'
            << "masked_pixel_steps," << result.masked_total << '\n';
    out << "reconstruct: " << gray.height() << "x" << gray.width() << ", prior "
        << prior->name() << ", " << schedule.steps() << " steps";
    if (args.reference) {
      const Image reference = io::read_pgm(*args.reference);
      Image clipped = gray;
      for (double& v : clipped) v = std::clamp(v, 0.0, 1.0);
      const double value = psnr(clipped, reference);
      const MleMap simple = mle_reconstruct(events);
      Image simple_gray(gray.height(), gray.width());
      for (std::size_t i = 0; i < gray.size(); ++i) {
        simple_gray[i] = std::clamp(simple.flux[i] / white, 0.0, 1.0);
      }
      const double simple_value = psnr(simple_gray, reference);
      metrics << "psnr_db," << value << '\n' << "psnr_mle_db," << simple_value << '\n';
      out << ", PSNR " << std::setprecision(4) << value << " dB (MLE "
          << simple_value << " dB)";
    }
    out << '\n';
    const fs::path metrics_path = sidecar(args.out, ".metrics.csv");
    std::ofstream(metrics_path) << metrics.str();
    return 0;
  });
}

}  // namespace spad::cli
