#ifndef SPAD_DISTRIBUTIONS_HPP_
#define SPAD_DISTRIBUTIONS_HPP_

#include <cstdint>
#include <limits>

#include "spad/random.hpp"
#include "spad/units.hpp"

namespace spad {

// Above this count the PMF/PDF kernels switch to log-space evaluation.
inline constexpr std::int64_t kLogSpaceThreshold = 20;

// Returned by sample_exponential when the rate is zero.
inline constexpr double kNoEvent = std::numeric_limits<double>::infinity();

// P(exactly n events in t) for a Poisson process of the given rate.
// Throws std::domain_error for n < 0.
double poisson_pmf(std::int64_t n, Rate rate, Duration t);

// Density of the waiting time to the n-th event. n >= 1.
double erlang_pdf(Duration t, std::int64_t n, Rate rate);

// P(at least n events by time t), evaluated as 1 - sum_{i<n} poisson terms.
// erlang_cdf(t, 0, rate) == 1 exactly.
double erlang_cdf(Duration t, std::int64_t n, Rate rate);

// Inter-detection density under a non-paralyzable dead time.
double shifted_exp_pdf(Duration dt, Rate rate, Duration dead);

// Inverse-CDF draw -ln(u)/rate with u in (0,1]; kNoEvent when rate == 0.
double sample_exponential(Rate rate, RandomSource& rng);
// Same transform with a caller-provided uniform; used to pin endpoints.
double exponential_from_uniform(Rate rate, double u);

namespace detail {
// log P(n; x) for x = rate * t > 0.
double log_poisson(std::int64_t n, double x);
// Sum of poisson terms i = 0..n-1 at mean x, restricted to the window that
// is representable in double precision, with Neumaier compensation.
double poisson_lower_sum(std::int64_t n, double x);
}  // namespace detail

}  // namespace spad

#endif  // SPAD_DISTRIBUTIONS_HPP_
