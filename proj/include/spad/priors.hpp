#ifndef SPAD_PRIORS_HPP_
#define SPAD_PRIORS_HPP_

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "spad/reconstruction.hpp"

namespace spad {

// Clean images x0 ~ N(mean, stddev^2 I). At step k the state is distributed
// as sqrt(alpha_k) x0 + sqrt(1 - alpha_k) eps, whose exact score is
//   -(x - sqrt(alpha_k) mean) / (alpha_k stddev^2 + 1 - alpha_k),
// which reduces to (mean - x) / stddev^2 at alpha_k = 1.
class GaussianPrior final : public PriorScore {
 public:
  GaussianPrior(double mean, double stddev, std::vector<double> alpha);

  Image evaluate(const Image& state, std::size_t step) const override;
  std::string name() const override { return "gaussian"; }

  double mean() const { return mean_; }
  double stddev() const { return stddev_; }

 private:
  double mean_;
  double stddev_;
  std::vector<double> alpha_;
};

// Gaussian Markov random field with precision weight * L + I, L the
// 4-neighbour grid Laplacian with reflecting borders. The type-II DCT
// diagonalizes L, so the score of the noise-perturbed prior is exact:
// per DCT mode j the state variance is alpha_k / (weight mu_j + 1) + 1 - alpha_k.
class SmoothnessPrior final : public PriorScore {
 public:
  SmoothnessPrior(double weight, std::vector<double> alpha);
  ~SmoothnessPrior() override;

  Image evaluate(const Image& state, std::size_t step) const override;
  std::string name() const override { return "smooth"; }

  // Laplacian eigenvalue of DCT mode (p, q) on an h x w grid.
  static double laplacian_eigenvalue(std::size_t p, std::size_t q,
                                     std::size_t h, std::size_t w);

 private:
  struct Plans;
  const Plans& plans_for(std::size_t h, std::size_t w) const;

  double weight_;
  std::vector<double> alpha_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<Plans>>
      plans_;
};

}  // namespace spad

#endif  // SPAD_PRIORS_HPP_
