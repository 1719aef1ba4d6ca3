#include "spad/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spad/distributions.hpp"

namespace spad {

namespace {

std::int64_t to_picoseconds(double seconds) {
  return std::llround(seconds * 1e12);
}

void require_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string("SensorConfig.") + name +
                                " must lie in [0,1], got " + std::to_string(v));
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(std::isfinite(v) && v >= 0.0)) {
    throw std::invalid_argument(std::string("SensorConfig.") + name +
                                " must be finite and >= 0, got " +
                                std::to_string(v));
  }
}

// Detection process of one pixel: exponential waits restarted after each
// dead time, optionally pre-empted by an afterpulse at a fixed delay.
class DetectionProcess {
 public:
  DetectionProcess(double rate, const SensorConfig& config, RandomSource& rng)
      : rate_(rate), config_(config), rng_(rng) {
    next_ = sample_exponential(Rate(rate_), rng_);
  }

  double peek() const { return next_; }

  // Records the pending detection and schedules the following one.
  double advance() {
    const double t = next_;
    const double release = t + config_.dead_time;
    double following = release + sample_exponential(Rate(rate_), rng_);
    if (rng_.bernoulli(config_.afterpulse_probability)) {
      following = std::min(following, release + config_.afterpulse_delay);
    }
    next_ = following;
    return t;
  }

 private:
  double rate_;
  const SensorConfig& config_;
  RandomSource& rng_;
  double next_;
};

double detection_rate(Rate flux, const SensorConfig& config) {
  return config.quantum_efficiency * flux.value() + config.dark_count_rate;
}

double jittered(double t, const SensorConfig& config, RandomSource& rng) {
  if (config.jitter_sigma <= 0.0) return t;
  return t + config.jitter_sigma * rng.normal();
}

// Sorts recorded times, drops anything outside [0, exposure], snaps onto the
// picosecond grid and greedily removes detections violating the dead time.
std::vector<double> repair(std::vector<double> times,
                           std::optional<double> exposure, double dead_time) {
  std::sort(times.begin(), times.end());
  const std::int64_t dead_ps = to_picoseconds(dead_time);
  std::vector<double> kept;
  kept.reserve(times.size());
  std::int64_t last_ps = 0;
  for (double t : times) {
    if (t < 0.0) continue;
    const double snapped = snap_to_picoseconds(t);
    if (exposure && snapped > *exposure) break;
    const std::int64_t ps = to_picoseconds(snapped);
    if (!kept.empty() && (ps <= last_ps || ps - last_ps < dead_ps)) continue;
    kept.push_back(snapped);
    last_ps = ps;
  }
  return kept;
}

}  // namespace

SensorConfig SensorConfig::ideal(double exposure, double dead_time) {
  SensorConfig c;
  c.quantum_efficiency = 1.0;
  c.exposure = exposure;
  c.dead_time = dead_time;
  c.dark_count_rate = 0.0;
  c.afterpulse_probability = 0.0;
  c.jitter_sigma = 0.0;
  return c;
}

void SensorConfig::validate() const {
  require_fraction(quantum_efficiency, "quantum_efficiency");
  require_fraction(fill_factor, "fill_factor");
  require_fraction(afterpulse_probability, "afterpulse_probability");
  require_nonnegative(dead_time, "dead_time");
  require_nonnegative(exposure, "exposure");
  require_nonnegative(pixel_pitch, "pixel_pitch");
  require_nonnegative(dark_count_rate, "dark_count_rate");
  require_nonnegative(afterpulse_delay, "afterpulse_delay");
  require_nonnegative(jitter_sigma, "jitter_sigma");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw std::invalid_argument("SensorConfig.wavelength must be > 0");
  }
  if (!(luminous_efficiency > 0.0) || !std::isfinite(luminous_efficiency)) {
    throw std::invalid_argument("SensorConfig.luminous_efficiency must be > 0");
  }
}

std::string EventStream::invariant_violation() const {
  std::ostringstream why;
  if (!std::isfinite(dead_time) || dead_time < 0.0) {
    why << "dead time " << dead_time << " is not a finite nonnegative value";
    return why.str();
  }
  if (exposure && !(*exposure > 0.0 && std::isfinite(*exposure))) {
    why << "exposure " << *exposure << " is not positive";
    return why.str();
  }
  const std::int64_t dead_ps = to_picoseconds(dead_time);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (!std::isfinite(t) || t < 0.0) {
      why << "time #" << i << " = " << t << " is negative or not finite";
      return why.str();
    }
    if (exposure && t > *exposure) {
      why << "time #" << i << " = " << t << " exceeds exposure " << *exposure;
      return why.str();
    }
    if (i == 0) continue;
    if (!(t > times[i - 1])) {
      why << "times not strictly increasing at #" << i;
      return why.str();
    }
    if (to_picoseconds(t) - to_picoseconds(times[i - 1]) < dead_ps) {
      why << "gap before time #" << i << " is shorter than the dead time";
      return why.str();
    }
  }
  return {};
}

std::string EventImage::invariant_violation() const {
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const EventStream& s = pixels[i];
    if (s.exposure != exposure || s.dead_time != dead_time) {
      return "pixel " + std::to_string(i) +
             " disagrees with the image acquisition setup";
    }
    std::string why = s.invariant_violation();
    if (!why.empty()) return "pixel " + std::to_string(i) + ": " + why;
  }
  return {};
}

FluxMap::FluxMap(std::size_t height, std::size_t width, double fill)
    : FluxMap(Grid<double>(height, width, fill)) {}

FluxMap::FluxMap(Grid<double> values) : Grid<double>(std::move(values)) {
  if (height() == 0 || width() == 0) {
    throw std::invalid_argument("FluxMap dimensions must be positive");
  }
  for (double v : *this) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::domain_error("FluxMap entries must be finite and >= 0");
    }
  }
}

double snap_to_picoseconds(double seconds) {
  return static_cast<double>(to_picoseconds(seconds)) / 1e12;
}

double lux_to_flux(double lux, const SensorConfig& config) {
  if (!(lux >= 0.0) || !std::isfinite(lux)) {
    throw std::domain_error("lux_to_flux: illuminance must be >= 0");
  }
  if (!(config.luminous_efficiency > 0.0) || !(config.wavelength > 0.0)) {
    throw std::invalid_argument(
        "lux_to_flux: luminous efficiency and wavelength must be positive");
  }
  const double photon_energy = kPlanckTimesLightSpeed / config.wavelength;
  const double power = lux / config.luminous_efficiency *
                       config.pixel_pitch * config.pixel_pitch *
                       config.fill_factor;
  return power / photon_energy;
}

EventStream simulate_pixel(Rate flux, const SensorConfig& config,
                           RandomSource& rng) {
  EventStream out;
  out.exposure = config.exposure;
  out.dead_time = config.dead_time;
  const double rate = detection_rate(flux, config);
  if (rate == 0.0) return out;

  DetectionProcess process(rate, config, rng);
  std::vector<double> recorded;
  while (process.peek() <= config.exposure) {
    recorded.push_back(jittered(process.advance(), config, rng));
  }
  out.times = repair(std::move(recorded), out.exposure, out.dead_time);
  return out;
}

EventStream simulate_fixed_count(Rate flux, std::size_t n_det,
                                 const SensorConfig& config,
                                 RandomSource& rng) {
  if (n_det == 0) {
    throw std::invalid_argument("simulate_fixed_count: n_det must be >= 1");
  }
  const double rate = detection_rate(flux, config);
  if (rate == 0.0) {
    throw std::invalid_argument(
        "simulate_fixed_count: zero detection rate never reaches n_det");
  }
  EventStream out;
  out.dead_time = config.dead_time;

  DetectionProcess process(rate, config, rng);
  std::vector<double> recorded;
  // Repair can drop jittered detections, so keep drawing until enough
  // survive and then cut at n_det.
  while (out.times.size() < n_det) {
    const std::size_t missing = n_det - out.times.size() + 1;
    for (std::size_t i = 0; i < missing; ++i) {
      recorded.push_back(jittered(process.advance(), config, rng));
    }
    out.times = repair(recorded, std::nullopt, out.dead_time);
  }
  out.times.resize(n_det);
  return out;
}

EventImage simulate_image(const Image& image, double reference_lux,
                          const SensorConfig& config, std::uint64_t seed,
                          std::size_t n_det) {
  config.validate();
  if (image.empty()) throw std::invalid_argument("simulate_image: empty image");
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = image[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("simulate_image: pixel " + std::to_string(i) +
                                  " = " + std::to_string(v) +
                                  " outside [0,1]");
    }
  }
  if (n_det > 0 && config.dark_count_rate == 0.0) {
    for (double v : image) {
      if (v * reference_lux * config.quantum_efficiency == 0.0) {
        throw std::invalid_argument(
            "simulate_image: fixed-count mode needs a positive detection rate "
            "in every pixel (add dark counts or remove black pixels)");
      }
    }
  }

  EventImage out;
  out.exposure = n_det > 0 ? std::nullopt : std::optional<double>(config.exposure);
  out.dead_time = config.dead_time;
  out.pixels = Grid<EventStream>(image.height(), image.width());

  const auto height = static_cast<std::int64_t>(image.height());
  const auto width = static_cast<std::int64_t>(image.width());
#pragma omp parallel for collapse(2) schedule(dynamic, 16)
  for (std::int64_t r = 0; r < height; ++r) {
    for (std::int64_t c = 0; c < width; ++c) {
      RandomSource rng = RandomSource::for_pixel(seed, r, c);
      const Rate flux(lux_to_flux(reference_lux * image(r, c), config));
      out.pixels(r, c) = n_det > 0
                             ? simulate_fixed_count(flux, n_det, config, rng)
                             : simulate_pixel(flux, config, rng);
    }
  }
  return out;
}

}  // namespace spad
