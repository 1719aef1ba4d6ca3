#ifndef SPAD_SIMULATOR_HPP_
#define SPAD_SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spad/grid.hpp"
#include "spad/random.hpp"
#include "spad/units.hpp"

namespace spad {

// Planck constant times speed of light, J*m.
inline constexpr double kPlanckTimesLightSpeed = 1.98644586e-25;

// Physical SPAD pixel model. Defaults are the reference sensor: 5 um pitch,
// q = 0.9, 50 ns dead time, unit fill factor, 555 nm, 683 lm/W, 100 Hz dark
// rate, 100 ns afterpulse delay, 200 ps jitter, 1 ms exposure.
struct SensorConfig {
  double quantum_efficiency = 0.9;
  double dead_time = 50e-9;           // s
  double exposure = 1e-3;             // s
  double pixel_pitch = 5e-6;          // m
  double fill_factor = 1.0;
  double wavelength = 555e-9;         // m
  double luminous_efficiency = 683.0; // lm/W
  double dark_count_rate = 100.0;     // 1/s
  double afterpulse_probability = 0.0;
  double afterpulse_delay = 100e-9;   // s
  double jitter_sigma = 200e-12;      // s

  // Same sensor with dark counts, afterpulsing and jitter disabled and unit
  // quantum efficiency, so the configured flux is the detection rate.
  static SensorConfig ideal(double exposure, double dead_time);

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// One pixel's measurement. Times are in seconds, strictly increasing and
// spaced by at least dead_time. exposure == nullopt marks a fixed-count
// acquisition with no exposure bound.
struct EventStream {
  std::optional<double> exposure;
  double dead_time = 0.0;
  std::vector<double> times;

  std::size_t count() const { return times.size(); }
  bool bounded() const { return exposure.has_value(); }
  double last_time() const { return times.empty() ? 0.0 : times.back(); }

  // Empty string when every invariant holds, otherwise a description of the
  // first violation.
  std::string invariant_violation() const;
  bool valid() const { return invariant_violation().empty(); }

  bool operator==(const EventStream&) const = default;
};

// Per-pixel event streams over a field of view sharing one acquisition setup.
struct EventImage {
  std::optional<double> exposure;
  double dead_time = 0.0;
  Grid<EventStream> pixels;

  std::size_t height() const { return pixels.height(); }
  std::size_t width() const { return pixels.width(); }
  std::string invariant_violation() const;
};

// Per-pixel photon detection rate lambda (1/s), all entries >= 0.
class FluxMap : public Grid<double> {
 public:
  FluxMap() = default;
  FluxMap(std::size_t height, std::size_t width, double fill = 0.0);
  explicit FluxMap(Grid<double> values);
};

// Photometric conversion from illuminance (lux) to photons/s reaching one
// pixel: lux * pitch^2 * fill / (luminous_efficiency * h c / wavelength).
double lux_to_flux(double lux, const SensorConfig& config);

// Simulates a fixed-exposure pixel observing incident photon flux `flux`
// (before quantum efficiency). Detection rate is q * flux + dark rate.
EventStream simulate_pixel(Rate flux, const SensorConfig& config,
                           RandomSource& rng);

// Fixed-count acquisition: no exposure bound, exactly n_det detections.
// Throws std::invalid_argument when n_det == 0 or the detection rate is 0.
EventStream simulate_fixed_count(Rate flux, std::size_t n_det,
                                 const SensorConfig& config,
                                 RandomSource& rng);

// Simulates every pixel of a normalized grayscale image in parallel. Pixel
// (r, c) observes lux_to_flux(reference_lux * image(r, c)) and draws from
// RandomSource::for_pixel(seed, r, c). n_det > 0 selects fixed-count mode.
EventImage simulate_image(const Image& image, double reference_lux,
                          const SensorConfig& config, std::uint64_t seed,
                          std::size_t n_det = 0);

// Rounds a time in seconds onto the picosecond grid used by event files.
double snap_to_picoseconds(double seconds);

}  // namespace spad

#endif  // SPAD_SIMULATOR_HPP_
