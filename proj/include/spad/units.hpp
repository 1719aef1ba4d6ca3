#ifndef SPAD_UNITS_HPP_
#define SPAD_UNITS_HPP_

#include <cmath>
#include <stdexcept>
#include <string>

namespace spad {

// Event rate in 1/s. Nonnegative and finite.
class Rate {
 public:
  constexpr Rate() = default;
  explicit Rate(double per_second) : value_(per_second) {
    if (!std::isfinite(per_second) || per_second < 0.0) {
      throw std::domain_error("Rate must be finite and >= 0, got " +
                              std::to_string(per_second));
    }
  }
  constexpr double value() const { return value_; }

 private:
  double value_ = 0.0;
};

// Time span in seconds. Nonnegative and finite.
class Duration {
 public:
  constexpr Duration() = default;
  explicit Duration(double seconds) : value_(seconds) {
    if (!std::isfinite(seconds) || seconds < 0.0) {
      throw std::domain_error("Duration must be finite and >= 0, got " +
                              std::to_string(seconds));
    }
  }
  constexpr double value() const { return value_; }

 private:
  double value_ = 0.0;
};

}  // namespace spad

#endif  // SPAD_UNITS_HPP_
