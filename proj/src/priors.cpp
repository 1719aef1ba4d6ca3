#include "spad/priors.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spad {

namespace {

// The FFTW planner is not reentrant; execution with new arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

double alpha_at(const std::vector<double>& alpha, std::size_t step) {
  if (step >= alpha.size()) {
    throw std::out_of_range("prior: step " + std::to_string(step) +
                            " beyond schedule of " +
                            std::to_string(alpha.size()) + " steps");
  }
  return alpha[step];
}

}  // namespace

GaussianPrior::GaussianPrior(double mean, double stddev, std::vector<double> alpha)
    : mean_(mean), stddev_(stddev), alpha_(std::move(alpha)) {
  if (!std::isfinite(mean) || !(stddev >= 0.0) || !std::isfinite(stddev)) {
    throw std::invalid_argument("gaussian prior: need finite mean and stddev >= 0");
  }
}

Image GaussianPrior::evaluate(const Image& state, std::size_t step) const {
  const double a = alpha_at(alpha_, step);
  const double variance = a * stddev_ * stddev_ + (1.0 - a);
  if (!(variance > 0.0)) {
    throw std::domain_error("gaussian prior: zero variance at a noise-free step");
  }
  const double centre = std::sqrt(a) * mean_;
  Image out(state.height(), state.width());
  for (std::size_t i = 0; i < state.size(); ++i) {
    out[i] = (centre - state[i]) / variance;
  }
  return out;
}

struct SmoothnessPrior::Plans {
  std::size_t h, w;
  fftw_plan forward;   // REDFT10 (DCT-II) in both dimensions
  fftw_plan backward;  // REDFT01 (DCT-III)
  std::vector<double> eigen;
};

SmoothnessPrior::SmoothnessPrior(double weight, std::vector<double> alpha)
    : weight_(weight), alpha_(std::move(alpha)) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("smoothness prior: weight must be >= 0");
  }
}

SmoothnessPrior::~SmoothnessPrior() {
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  for (auto& [shape, p] : plans_) {
    fftw_destroy_plan(p->forward);
    fftw_destroy_plan(p->backward);
  }
}

double SmoothnessPrior::laplacian_eigenvalue(std::size_t p, std::size_t q,
                                             std::size_t h, std::size_t w) {
  using std::numbers::pi;
  return (2.0 - 2.0 * std::cos(pi * static_cast<double>(p) / static_cast<double>(h))) +
         (2.0 - 2.0 * std::cos(pi * static_cast<double>(q) / static_cast<double>(w)));
}

const SmoothnessPrior::Plans& SmoothnessPrior::plans_for(std::size_t h,
                                                         std::size_t w) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = plans_.find({h, w});
  if (it != plans_.end()) return *it->second;

  auto plans = std::make_unique<Plans>();
  plans->h = h;
  plans->w = w;
  {
    std::lock_guard<std::mutex> planner(fftw_planner_mutex());
    double* scratch = fftw_alloc_real(h * w);
    const int hi = static_cast<int>(h);
    const int wi = static_cast<int>(w);
    plans->forward = fftw_plan_r2r_2d(hi, wi, scratch, scratch, FFTW_REDFT10,
                                      FFTW_REDFT10, FFTW_ESTIMATE);
    plans->backward = fftw_plan_r2r_2d(hi, wi, scratch, scratch, FFTW_REDFT01,
                                       FFTW_REDFT01, FFTW_ESTIMATE);
    fftw_free(scratch);
  }
  plans->eigen.resize(h * w);
  for (std::size_t p = 0; p < h; ++p) {
    for (std::size_t q = 0; q < w; ++q) {
      plans->eigen[p * w + q] = laplacian_eigenvalue(p, q, h, w);
    }
  }
  const Plans& ref = *plans;
  plans_.emplace(std::make_pair(h, w), std::move(plans));
  return ref;
}

Image SmoothnessPrior::evaluate(const Image& state, std::size_t step) const {
  const double a = alpha_at(alpha_, step);
  const std::size_t h = state.height();
  const std::size_t w = state.width();
  if (h == 0 || w == 0) throw std::invalid_argument("smoothness prior: empty state");
  const Plans& plans = plans_for(h, w);

  double* buf = fftw_alloc_real(h * w);
  std::copy(state.begin(), state.end(), buf);
  fftw_execute_r2r(plans.forward, buf, buf);
  // REDFT10 followed by REDFT01 scales by (2h)(2w).
  const double norm = 1.0 / (4.0 * static_cast<double>(h * w));
  for (std::size_t i = 0; i < h * w; ++i) {
    const double variance = a / (weight_ * plans.eigen[i] + 1.0) + (1.0 - a);
    buf[i] *= -norm / variance;
  }
  fftw_execute_r2r(plans.backward, buf, buf);
  Image out(h, w, std::vector<double>(buf, buf + h * w));
  fftw_free(buf);
  return out;
}

}  // namespace spad
