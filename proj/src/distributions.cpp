#include "spad/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace spad {

namespace {

void require_count(std::int64_t n, std::int64_t min, const char* op) {
  if (n < min) {
    throw std::domain_error(std::string(op) + ": count must be >= " +
                            std::to_string(min) + ", got " + std::to_string(n));
  }
}

double factorial_small(std::int64_t n) {
  double f = 1.0;
  for (std::int64_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

// Poisson terms further than this many standard deviations (plus a constant
// margin) from the mean are below 1e-300 of the peak and are skipped.
constexpr double kWindowSigmas = 40.0;
constexpr double kWindowMargin = 60.0;

}  // namespace

namespace detail {

double log_poisson(std::int64_t n, double x) {
  const double dn = static_cast<double>(n);
  return dn * std::log(x) - x - std::lgamma(dn + 1.0);
}

double poisson_lower_sum(std::int64_t n, double x) {
  if (n <= 0) return 0.0;
  const double spread = kWindowSigmas * std::sqrt(x) + kWindowMargin;
  const auto lo = static_cast<std::int64_t>(std::max(0.0, std::floor(x - spread)));
  const auto hi = std::min<std::int64_t>(
      n - 1, static_cast<std::int64_t>(std::ceil(x + spread)));
  if (lo > hi) return 0.0;

  // Neumaier-compensated sum of exp(log term), terms built by recurrence in
  // log space from the first one.
  double log_term = log_poisson(lo, x);
  const double log_x = std::log(x);
  double sum = 0.0;
  double comp = 0.0;
  for (std::int64_t i = lo; i <= hi; ++i) {
    if (i > lo) log_term += log_x - std::log(static_cast<double>(i));
    const double term = std::exp(log_term);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace detail

double poisson_pmf(std::int64_t n, Rate rate, Duration t) {
  require_count(n, 0, "poisson_pmf");
  const double x = rate.value() * t.value();
  if (!std::isfinite(x)) throw std::domain_error("poisson_pmf: rate*t not finite");
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  if (n > kLogSpaceThreshold) return std::exp(detail::log_poisson(n, x));
  return std::pow(x, static_cast<double>(n)) * std::exp(-x) / factorial_small(n);
}

double erlang_pdf(Duration t, std::int64_t n, Rate rate) {
  require_count(n, 1, "erlang_pdf");
  const double r = rate.value();
  const double tv = t.value();
  if (r == 0.0) return 0.0;
  if (tv == 0.0) return n == 1 ? r : 0.0;
  if (n > kLogSpaceThreshold) {
    const double dn = static_cast<double>(n);
    return std::exp(dn * std::log(r) + (dn - 1.0) * std::log(tv) - r * tv -
                    std::lgamma(dn));
  }
  return std::pow(r, static_cast<double>(n)) *
         std::pow(tv, static_cast<double>(n - 1)) * std::exp(-r * tv) /
         factorial_small(n - 1);
}

double erlang_cdf(Duration t, std::int64_t n, Rate rate) {
  require_count(n, 0, "erlang_cdf");
  if (n == 0) return 1.0;
  const double x = rate.value() * t.value();
  if (x == 0.0) return 0.0;
  // Past the window the lower sum is 1 up to rounding and the CDF is below
  // the smallest double.
  if (static_cast<double>(n - 1) > x + kWindowSigmas * std::sqrt(x) + kWindowMargin) {
    return 0.0;
  }
  const double cdf = 1.0 - detail::poisson_lower_sum(n, x);
  return std::clamp(cdf, 0.0, 1.0);
}

double shifted_exp_pdf(Duration dt, Rate rate, Duration dead) {
  if (dt.value() < dead.value()) return 0.0;
  return rate.value() * std::exp(-rate.value() * (dt.value() - dead.value()));
}

double exponential_from_uniform(Rate rate, double u) {
  if (rate.value() == 0.0) return kNoEvent;
  return -std::log(u) / rate.value();
}

double sample_exponential(Rate rate, RandomSource& rng) {
  if (rate.value() == 0.0) return kNoEvent;
  return exponential_from_uniform(rate, rng.uniform());
}

}  // namespace spad
