#ifndef SPAD_CONFIG_HPP_
#define SPAD_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "spad/reconstruction.hpp"
#include "spad/simulator.hpp"

namespace spad {

enum class AcquisitionMode { kFixedExposure, kFixedCount };

// Everything a CLI run needs. Parsed from flat `key = value` text; `#`
// starts a comment. Unknown keys are rejected.
struct RunConfig {
  SensorConfig sensor;
  double reference_lux = 0.4;
  std::uint64_t seed = 0;
  AcquisitionMode mode = AcquisitionMode::kFixedExposure;
  std::size_t fixed_count = 100;
  ScheduleParams schedule;
  // 0 selects the default a = reference_flux / 2.
  double transform_a = 0.0;
  double transform_b = 1.0;
  bool clip_estimate = true;
  // Verification suite.
  std::size_t verify_pixels = 100000;
  double verify_flux = 1e5;

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
  // Applies one key/value pair; throws std::invalid_argument for unknown
  // keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;

  // Detection rate of a white pixel at the reference illuminance.
  double reference_flux() const;
  DomainTransform transform() const;
  ScheduleSet make_schedule() const;
};

}  // namespace spad

#endif  // SPAD_CONFIG_HPP_
