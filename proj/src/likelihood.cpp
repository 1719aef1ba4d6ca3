#include "spad/likelihood.hpp"

#include <cmath>
#include <stdexcept>

#include "spad/distributions.hpp"

namespace spad {

CaseTag classify_case(const EventStream& stream) {
  if (!stream.bounded()) return CaseTag::kCaseII;
  if (stream.times.empty()) return CaseTag::kCaseI;
  return stream.times.back() <= *stream.exposure - stream.dead_time
             ? CaseTag::kCaseI
             : CaseTag::kCaseII;
}

SufficientStatistic sufficient_statistic(const EventStream& stream) {
  SufficientStatistic s;
  s.count = static_cast<std::int64_t>(stream.count());
  s.case_tag = classify_case(stream);
  const double n = static_cast<double>(s.count);
  if (s.case_tag == CaseTag::kCaseI) {
    s.live_time = *stream.exposure - n * stream.dead_time;
  } else {
    s.live_time = stream.last_time() - (n - 1.0) * stream.dead_time;
  }
  return s;
}

LikelihoodResult log_likelihood(const EventStream& stream, Rate flux) {
  const SufficientStatistic s = sufficient_statistic(stream);
  const double lambda = flux.value();
  LikelihoodResult out;
  out.case_tag = s.case_tag;
  if (s.count == 0) {
    out.log_value = -lambda * s.live_time;
    return out;
  }
  if (lambda == 0.0) {
    out.log_value = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_value =
      static_cast<double>(s.count) * std::log(lambda) - lambda * s.live_time;
  return out;
}

double grad_log_likelihood(const EventStream& stream, Rate flux) {
  if (flux.value() == 0.0) {
    throw std::domain_error("grad_log_likelihood: flux must be > 0");
  }
  const SufficientStatistic s = sufficient_statistic(stream);
  return static_cast<double>(s.count) / flux.value() - s.live_time;
}

std::int64_t max_events(Duration exposure, Duration dead) {
  if (dead.value() == 0.0) return kUnboundedEvents;
  return static_cast<std::int64_t>(std::floor(exposure.value() / dead.value())) +
         1;
}

double count_pmf(std::int64_t n, Rate flux, Duration exposure, Duration dead) {
  return detail::count_pmf_from_cdf(n, flux, exposure, dead,
                                    [](Duration t, std::int64_t k, Rate r) {
                                      return erlang_cdf(t, k, r);
                                    });
}

MleEstimate mle_flux(const EventStream& stream) {
  return mle_flux_pooled(std::span<const EventStream>(&stream, 1));
}

MleEstimate mle_flux_pooled(std::span<const EventStream> streams) {
  double events = 0.0;
  double live = 0.0;
  for (const EventStream& s : streams) {
    const SufficientStatistic stat = sufficient_statistic(s);
    if (stat.count > 0 && !(stat.live_time > 0.0)) {
      return {0.0, MleStatus::kUnboundedLikelihood};
    }
    events += static_cast<double>(stat.count);
    live += stat.live_time;
  }
  if (events == 0.0) return {0.0, MleStatus::kBoundary};
  return {events / live, MleStatus::kOk};
}

namespace detail {

std::optional<double> pixel_gradient(const EventStream& stream, double flux) {
  if (flux > 0.0) return grad_log_likelihood(stream, Rate(flux));
  if (stream.count() == 0) return -sufficient_statistic(stream).live_time;
  return std::nullopt;
}

}  // namespace detail

GradientMap grad_log_likelihood_map(const EventImage& streams,
                                    const Grid<double>& flux) {
  require_same_shape(streams.pixels, flux, "grad_log_likelihood_map");
  for (double v : flux) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::domain_error("grad_log_likelihood_map: negative flux");
    }
  }
  GradientMap out{Grid<double>(flux.height(), flux.width()),
                  Grid<std::uint8_t>(flux.height(), flux.width()), 0};
  const auto n = static_cast<std::int64_t>(flux.size());
  std::size_t invalid = 0;
#pragma omp parallel for schedule(static) reduction(+ : invalid)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto g = detail::pixel_gradient(streams.pixels[i], flux[i]);
    if (g) {
      out.gradient[i] = *g;
    } else {
      out.invalid[i] = 1;
      ++invalid;
    }
  }
  out.invalid_count = invalid;
  return out;
}

}  // namespace spad
