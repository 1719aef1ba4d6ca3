#include "spad/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spad/random.hpp"

namespace spad {

namespace {

void require_finite(const Image& img, std::size_t step, const char* what) {
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!std::isfinite(img[i])) {
      throw DpsError(step, std::string(what) + " is not finite at pixel " +
                               std::to_string(i) + " (value " +
                               std::to_string(img[i]) + ")");
    }
  }
}

Image standard_normal(std::size_t height, std::size_t width, RandomSource& rng) {
  Image out(height, width);
  for (double& v : out) v = rng.normal();
  return out;
}

}  // namespace

void ScheduleSet::validate() const {
  const std::size_t k = steps();
  if (k == 0) throw std::invalid_argument("schedule: at least one step required");
  if (alpha.size() != k || sigma.size() != k || rho.size() != k) {
    throw std::invalid_argument("schedule: alpha, beta, sigma, rho lengths differ");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(alpha[i] > 0.0 && alpha[i] <= 1.0)) {
      throw std::invalid_argument("schedule: alpha[" + std::to_string(i) +
                                  "] outside (0, 1]");
    }
    if (!(beta[i] >= 0.0 && beta[i] < 1.0)) {
      throw std::invalid_argument("schedule: beta[" + std::to_string(i) +
                                  "] outside [0, 1)");
    }
    if (!(sigma[i] >= 0.0) || !std::isfinite(sigma[i])) {
      throw std::invalid_argument("schedule: sigma[" + std::to_string(i) +
                                  "] negative");
    }
    if (!(rho[i] >= 0.0) || !std::isfinite(rho[i])) {
      throw std::invalid_argument("schedule: rho[" + std::to_string(i) +
                                  "] negative");
    }
    if (i > 0 && sigma[i] < sigma[i - 1]) {
      throw std::invalid_argument(
          "schedule: sigma must not decrease with the step index");
    }
  }
}

double ScheduleSet::alpha_inconsistency() const {
  double worst = 0.0;
  double product = 1.0;
  for (std::size_t i = 0; i < steps(); ++i) {
    product *= 1.0 - beta[i];
    worst = std::max(worst, std::abs(alpha[i] - product) / alpha[i]);
  }
  return worst;
}

ScheduleSet make_linear_schedule(const ScheduleParams& params,
                                 double chain_rule_scale) {
  if (params.steps == 0) throw std::invalid_argument("schedule: steps must be >= 1");
  if (!(params.rho0 >= 0.0)) throw std::invalid_argument("schedule: rho0 < 0");
  ScheduleSet s;
  s.scaling = params.scaling;
  const std::size_t k = params.steps;
  s.alpha.resize(k);
  s.beta.resize(k);
  s.sigma.resize(k);
  s.rho.resize(k);
  double product = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double frac = k == 1 ? 0.0 : static_cast<double>(i) / (k - 1);
    const double beta = params.beta_start + frac * (params.beta_end - params.beta_start);
    product *= 1.0 - beta;
    s.beta[i] = beta;
    s.alpha[i] = product;
    s.sigma[i] = std::sqrt(beta);
    s.rho[i] = params.scaling == GuidanceScaling::kGradientNorm
                   ? params.rho0
                   : params.rho0 * chain_rule_scale * beta / std::sqrt(1.0 - beta);
  }
  s.validate();
  return s;
}

void DomainTransform::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw std::invalid_argument("domain transform: scale a must be > 0");
  }
  if (!(b >= 1.0) || !std::isfinite(b)) {
    throw std::invalid_argument(
        "domain transform: offset b must be >= 1 so [-1, 1] maps to flux >= 0");
  }
}

DomainTransform DomainTransform::for_reference_flux(double reference_flux) {
  DomainTransform t{reference_flux / 2.0, 1.0};
  t.validate();
  return t;
}

FluxMap domain_adapt(const Image& x_hat, const DomainTransform& transform) {
  transform.validate();
  Grid<double> flux(x_hat.height(), x_hat.width());
  for (std::size_t i = 0; i < x_hat.size(); ++i) {
    const double v = transform.to_flux(x_hat[i]);
    if (!(v >= 0.0)) {
      throw std::domain_error("domain_adapt: pixel " + std::to_string(i) +
                              " maps to negative flux " + std::to_string(v));
    }
    flux[i] = v;
  }
  return FluxMap(std::move(flux));
}

Image domain_unadapt(const Grid<double>& flux, const DomainTransform& transform) {
  transform.validate();
  Image out(flux.height(), flux.width());
  for (std::size_t i = 0; i < flux.size(); ++i) {
    out[i] = transform.to_normalized(flux[i]);
  }
  return out;
}

Image tweedie_estimate(const Image& state, const Image& score, double alpha_k) {
  require_same_shape(state, score, "tweedie_estimate");
  if (!(alpha_k > 0.0 && alpha_k <= 1.0)) {
    throw std::invalid_argument("tweedie_estimate: alpha_k outside (0, 1]");
  }
  const double inv = 1.0 / std::sqrt(alpha_k);
  const double w = 1.0 - alpha_k;
  Image out(state.height(), state.width());
  const auto n = static_cast<std::int64_t>(state.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = inv * (state[i] + w * score[i]);
  }
  return out;
}

Image ancestral_step(const Image& x_k, const Image& x_hat0,
                     const ScheduleSet& schedule, std::size_t k,
                     const Image& noise) {
  require_same_shape(x_k, x_hat0, "ancestral_step");
  require_same_shape(x_k, noise, "ancestral_step");
  if (k >= schedule.steps()) {
    throw std::out_of_range("ancestral_step: step index out of range");
  }
  const double beta = schedule.beta[k];
  const double sigma = schedule.sigma[k];
  double c_state = 1.0;
  double c_clean = 0.0;
  if (beta > 0.0) {
    const double alpha = schedule.alpha[k];
    const double alpha_prev = schedule.alpha_prev(k);
    c_state = std::sqrt(1.0 - beta) * (1.0 - alpha_prev) / (1.0 - alpha);
    c_clean = std::sqrt(alpha_prev) * beta / (1.0 - alpha);
  }
  Image out(x_k.height(), x_k.width());
  const auto n = static_cast<std::int64_t>(x_k.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = c_state * x_k[i] + c_clean * x_hat0[i] + sigma * noise[i];
  }
  return out;
}

GuidanceResult guidance_step(const Image& x_prime, const EventImage& streams,
                             const Image& x_hat0,
                             const DomainTransform& transform, double rho_k,
                             GuidanceScaling scaling) {
  require_same_shape(x_prime, x_hat0, "guidance_step");
  require_same_shape(streams.pixels, x_hat0, "guidance_step");
  if (!(rho_k >= 0.0)) throw std::invalid_argument("guidance_step: rho_k < 0");
  GuidanceResult out{x_prime, 0};
  if (rho_k == 0.0) return out;

  const FluxMap flux = domain_adapt(x_hat0, transform);
  const GradientMap g = grad_log_likelihood_map(streams, flux);
  out.masked = g.invalid_count;

  double step = rho_k;
  if (scaling == GuidanceScaling::kGradientNorm) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < g.gradient.size(); ++i) {
      if (!g.invalid[i]) norm2 += g.gradient[i] * g.gradient[i];
    }
    if (norm2 == 0.0) return out;
    step = rho_k / std::sqrt(norm2);
  }
  const auto n = static_cast<std::int64_t>(x_prime.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (!g.invalid[i]) out.state[i] += step * g.gradient[i];
  }
  return out;
}

DpsResult dps_reconstruct(const EventImage& streams, const PriorScore& prior,
                          const DomainTransform& transform,
                          const ScheduleSet& schedule, std::uint64_t seed,
                          const DpsOptions& options) {
  schedule.validate();
  transform.validate();
  const std::size_t height = streams.height();
  const std::size_t width = streams.width();
  if (height == 0 || width == 0) {
    throw std::invalid_argument("dps_reconstruct: empty event image");
  }

  RandomSource rng = RandomSource::for_stream(seed, 0);
  Image state = standard_normal(height, width, rng);
  Image estimate;
  std::size_t masked_total = 0;

  for (std::size_t k = schedule.steps(); k-- > 0;) {
    Image score;
    try {
      score = prior.evaluate(state, k);
    } catch (const std::exception& e) {
      throw DpsError(k, std::string("prior '") + prior.name() +
                            "' failed: " + e.what());
    }
    if (!score.same_shape(state)) {
      throw DpsError(k, "prior returned a score of the wrong shape");
    }
    require_finite(score, k, "prior score");

    estimate = tweedie_estimate(state, score, schedule.alpha[k]);
    if (options.clip_estimate) {
      for (double& v : estimate) v = std::clamp(v, -1.0, 1.0);
    }
    require_finite(estimate, k, "clean-image estimate");
    if (k == 0) break;

    const Image noise = standard_normal(height, width, rng);
    Image proposal = ancestral_step(state, estimate, schedule, k, noise);
    GuidanceResult guided;
    try {
      guided = guidance_step(proposal, streams, estimate, transform,
                             schedule.rho[k], schedule.scaling);
    } catch (const std::domain_error& e) {
      throw DpsError(k, e.what());
    }
    masked_total += guided.masked;
    state = std::move(guided.state);
    require_finite(state, k, "state");
  }

  DpsResult result{domain_adapt(estimate, transform), estimate, masked_total};
  return result;
}

std::vector<DpsResult> dps_reconstruct_seeds(
    const EventImage& streams, const PriorScore& prior,
    const DomainTransform& transform, const ScheduleSet& schedule,
    const std::vector<std::uint64_t>& seeds, const DpsOptions& options) {
  std::vector<DpsResult> results(seeds.size());
  std::vector<std::string> errors(seeds.size());
  const auto n = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic, 1) if (prior.concurrent_safe())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      results[i] = dps_reconstruct(streams, prior, transform, schedule,
                                   seeds[i], options);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) {
      throw std::runtime_error("seed " + std::to_string(seeds[i]) + ": " +
                               errors[i]);
    }
  }
  return results;
}

MleMap mle_reconstruct(const EventImage& streams) {
  const std::size_t h = streams.height();
  const std::size_t w = streams.width();
  Grid<double> flux(h, w);
  Grid<std::uint8_t> status(h, w);
  const auto n = static_cast<std::int64_t>(streams.pixels.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const MleEstimate e = mle_flux(streams.pixels[i]);
    flux[i] = e.flux;
    status[i] = static_cast<std::uint8_t>(e.status);
  }
  return {FluxMap(std::move(flux)), std::move(status)};
}

double psnr(const Image& image, const Image& reference, double peak) {
  require_same_shape(image, reference, "psnr");
  if (image.empty()) throw std::invalid_argument("psnr: empty image");
  double mse = 0.0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double d = image[i] - reference[i];
    mse += d * d;
  }
  mse /= static_cast<double>(image.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace spad
