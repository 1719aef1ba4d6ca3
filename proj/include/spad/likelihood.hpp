#ifndef SPAD_LIKELIHOOD_HPP_
#define SPAD_LIKELIHOOD_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>

#include "spad/grid.hpp"
#include "spad/simulator.hpp"
#include "spad/units.hpp"

namespace spad {

// Case I: no events, or the last dead time ends inside the exposure
// (t_N <= T - tau_d). Case II: the exposure ends inside the last dead time.
enum class CaseTag { kCaseI, kCaseII };

struct LikelihoodResult {
  double log_value = 0.0;  // natural log of the event-sequence density
  CaseTag case_tag = CaseTag::kCaseI;
};

// The likelihood depends on a stream only through these three quantities.
struct SufficientStatistic {
  std::int64_t count = 0;
  CaseTag case_tag = CaseTag::kCaseI;
  // Time over which the process was observed live: T - N tau_d (Case I) or
  // t_N - (N - 1) tau_d (Case II and unbounded streams).
  double live_time = 0.0;
};

// Fixed-count streams classify as Case II with the exposure ending at t_N.
CaseTag classify_case(const EventStream& stream);
SufficientStatistic sufficient_statistic(const EventStream& stream);

// log p(N, {t_i} | flux). flux = 0 with N > 0 yields -infinity; flux < 0 is
// unrepresentable (Rate rejects it).
LikelihoodResult log_likelihood(const EventStream& stream, Rate flux);

// d/dlambda of log_likelihood. Throws std::domain_error for flux == 0.
double grad_log_likelihood(const EventStream& stream, Rate flux);

// Probability of exactly n detections within the exposure under dead time:
// F(T - (n-1) tau_d; n) - F(T - n tau_d; n + 1), CDF arguments clamped at 0.
double count_pmf(std::int64_t n, Rate flux, Duration exposure, Duration dead);

inline constexpr std::int64_t kUnboundedEvents =
    std::numeric_limits<std::int64_t>::max();

// floor(T / tau_d) + 1, or kUnboundedEvents when tau_d == 0.
std::int64_t max_events(Duration exposure, Duration dead);

enum class MleStatus {
  kOk,
  kBoundary,           // N == 0, likelihood maximized as lambda -> 0
  kUnboundedLikelihood // live time <= 0, input violates the stream model
};

struct MleEstimate {
  double flux = 0.0;
  MleStatus status = MleStatus::kOk;
};

// Closed-form maximizer N / live_time.
MleEstimate mle_flux(const EventStream& stream);
// Maximizer of the summed log-likelihood of independent streams sharing one
// flux: sum N / sum live_time.
MleEstimate mle_flux_pooled(std::span<const EventStream> streams);

// Per-pixel gradient map. Pixels with flux 0 and N > 0 are marked invalid
// (gradient 0) and counted; pixels with flux 0 and N == 0 get -T.
struct GradientMap {
  Grid<double> gradient;
  Grid<std::uint8_t> invalid;
  std::size_t invalid_count = 0;
};

GradientMap grad_log_likelihood_map(const EventImage& streams,
                                    const Grid<double>& flux);

namespace detail {
// count_pmf over an arbitrary Erlang CDF; the verification suite uses this
// to run its checks against a deliberately corrupted CDF.
template <typename Cdf>
double count_pmf_from_cdf(std::int64_t n, Rate flux, Duration exposure,
                          Duration dead, Cdf&& cdf) {
  if (n < 0) throw std::domain_error("count_pmf: n must be >= 0");
  if (n > max_events(exposure, dead)) return 0.0;
  const double T = exposure.value();
  const double tau = dead.value();
  const double dn = static_cast<double>(n);
  const Duration upper(std::max(0.0, T - (dn - 1.0) * tau));
  const Duration lower(std::max(0.0, T - dn * tau));
  const double p = cdf(upper, n, flux) - cdf(lower, n + 1, flux);
  return std::clamp(p, 0.0, 1.0);
}

// Gradient for one pixel with the zero-flux convention of the map operation.
// Returns nullopt for an invalid pixel.
std::optional<double> pixel_gradient(const EventStream& stream, double flux);
}  // namespace detail

}  // namespace spad

#endif  // SPAD_LIKELIHOOD_HPP_
