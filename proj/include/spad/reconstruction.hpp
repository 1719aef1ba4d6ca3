#ifndef SPAD_RECONSTRUCTION_HPP_
#define SPAD_RECONSTRUCTION_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spad/grid.hpp"
#include "spad/likelihood.hpp"
#include "spad/simulator.hpp"

namespace spad {

// How rho_k scales the likelihood gradient in the guidance step.
enum class GuidanceScaling {
  // rho_k / ||g||_2 over valid pixels: a fixed-length step per iteration.
  kGradientNorm,
  // rho_k used as is. make_linear_schedule sets rho_k proportional to
  // beta_k so the guidance enters the reverse step with the same weight as
  // a score term.
  kFixed,
};

// Per-step coefficients, indexed 0..K-1; the loop runs k = K-1 down to 0.
// alpha is the cumulative product of (1 - beta).
struct ScheduleSet {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> sigma;
  std::vector<double> rho;
  GuidanceScaling scaling = GuidanceScaling::kGradientNorm;

  std::size_t steps() const { return beta.size(); }
  // alpha_{k-1}, with alpha_{-1} = 1.
  double alpha_prev(std::size_t k) const { return k == 0 ? 1.0 : alpha[k - 1]; }

  // Throws std::invalid_argument on length or range violations.
  void validate() const;
  // max_k |alpha_k - prod_{j<=k}(1 - beta_j)| / alpha_k.
  double alpha_inconsistency() const;
};

struct ScheduleParams {
  std::size_t steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 2e-2;
  double rho0 = 1.0;
  GuidanceScaling scaling = GuidanceScaling::kGradientNorm;
};

// Linear beta, alpha = cumprod(1 - beta), sigma = sqrt(beta). rho_k = rho0
// under kGradientNorm; rho0 * chain_rule_scale * beta_k / sqrt(1 - beta_k)
// under kFixed, where chain_rule_scale is d lambda / d x (the transform's a).
ScheduleSet make_linear_schedule(const ScheduleParams& params,
                                 double chain_rule_scale = 1.0);

// lambda = a (x_hat + b). a > 0 and b >= 1 keep [-1, 1] nonnegative.
struct DomainTransform {
  double a = 1.0;
  double b = 1.0;

  void validate() const;
  // a = reference_flux / 2, b = 1: [-1, 1] onto [0, reference_flux].
  static DomainTransform for_reference_flux(double reference_flux);
  double to_flux(double x_hat) const { return a * (x_hat + b); }
  double to_normalized(double flux) const { return flux / a - b; }
};

FluxMap domain_adapt(const Image& x_hat, const DomainTransform& transform);
Image domain_unadapt(const Grid<double>& flux, const DomainTransform& transform);

// Score of the (noise-perturbed) prior at reverse step k.
class PriorScore {
 public:
  virtual ~PriorScore() = default;
  virtual Image evaluate(const Image& state, std::size_t step) const = 0;
  // True when evaluate may be called from several threads at once.
  virtual bool concurrent_safe() const { return true; }
  virtual std::string name() const = 0;
};

class DpsError : public std::runtime_error {
 public:
  DpsError(std::size_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Clean-image estimate (x_k + (1 - alpha_k) score) / sqrt(alpha_k).
Image tweedie_estimate(const Image& state, const Image& score, double alpha_k);

// Reverse-diffusion step towards x_{k-1}:
//   sqrt(1-beta_k)(1-alpha_{k-1})/(1-alpha_k) x_k
//   + sqrt(alpha_{k-1}) beta_k/(1-alpha_k) x_hat0 + sigma_k z.
// With beta_k == 0 the transition is the identity plus sigma_k z.
Image ancestral_step(const Image& x_k, const Image& x_hat0,
                     const ScheduleSet& schedule, std::size_t k,
                     const Image& noise);

struct GuidanceResult {
  Image state;
  std::size_t masked = 0;  // pixels with N > 0 at zero flux
};

// x' + rho g with g the per-pixel likelihood gradient in flux at
// domain_adapt(x_hat0); masked pixels are left untouched. Under
// kGradientNorm the step is rho / ||g||_2.
GuidanceResult guidance_step(const Image& x_prime, const EventImage& streams,
                             const Image& x_hat0,
                             const DomainTransform& transform, double rho_k,
                             GuidanceScaling scaling);

struct DpsOptions {
  // Clip the clean-image estimate to [-1, 1] every step.
  bool clip_estimate = true;
};

struct DpsResult {
  FluxMap flux;
  Image estimate;  // final clean-image estimate in [-1, 1]
  std::size_t masked_total = 0;
};

DpsResult dps_reconstruct(const EventImage& streams, const PriorScore& prior,
                          const DomainTransform& transform,
                          const ScheduleSet& schedule, std::uint64_t seed,
                          const DpsOptions& options = {});

// Runs dps_reconstruct once per seed, in parallel when the prior allows it.
std::vector<DpsResult> dps_reconstruct_seeds(
    const EventImage& streams, const PriorScore& prior,
    const DomainTransform& transform, const ScheduleSet& schedule,
    const std::vector<std::uint64_t>& seeds, const DpsOptions& options = {});

struct MleMap {
  FluxMap flux;
  Grid<std::uint8_t> status;  // static_cast<uint8_t>(MleStatus)
};

MleMap mle_reconstruct(const EventImage& streams);

// Peak signal-to-noise ratio in dB of `image` against `reference`, both on a
// [0, peak] scale. Returns +inf for identical images.
double psnr(const Image& image, const Image& reference, double peak = 1.0);

}  // namespace spad

#endif  // SPAD_RECONSTRUCTION_HPP_
