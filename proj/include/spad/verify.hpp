#ifndef SPAD_VERIFY_HPP_
#define SPAD_VERIFY_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spad/simulator.hpp"
#include "spad/units.hpp"

namespace spad {

using ErlangCdf = std::function<double(Duration, std::int64_t, Rate)>;

// The library's erlang_cdf.
ErlangCdf library_cdf();
// erlang_cdf with a relative error of `fault` injected for n >= 2; a
// negative control for the suite.
ErlangCdf corrupted_cdf(double fault = 1e-6);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 0.0;
};

// Pearson goodness of fit of observed counts against a PMF over 0..size-1
// plus an implicit tail bin carrying the remaining probability and any
// observations beyond the PMF's range. Adjacent
// bins are pooled until each expects at least `min_expected` samples.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& pmf,
                               double min_expected = 5.0);

// Detection counts of `pixels` independent ideal pixels (q = 1, no dark
// counts, afterpulsing or jitter) at the given flux, exposure and dead time.
// Pixel i draws from RandomSource::for_pixel(seed, 0, i). Parallel.
std::vector<std::uint64_t> simulate_count_histogram(Rate flux, double exposure,
                                                    double dead_time,
                                                    std::size_t pixels,
                                                    std::uint64_t seed);

// Max |sum_{n=0}^{M} count_pmf - 1| over the 27-point (lambda T, tau_d/T, T)
// grid: lambda T in {0.1, 2, 50}, tau_d/T in {1e-4, 1e-2, 1e-1},
// T in {1e-3, 1, 20}.
double normalization_error(const ErlangCdf& cdf);
// Max |poisson_pmf - (F(n) - F(n+1))| for n in 0..50, rate in {0.1, 1, 10},
// t in {0.01, 1, 100}.
double duality_error(const ErlangCdf& cdf);
// Max |count_pmf(tau_d = 0) - poisson_pmf| on the same grid.
double dead_time_collapse_error(const ErlangCdf& cdf);
// Max relative error between grad_log_likelihood and a central difference
// of log_likelihood over lambda in {0.5, 5, 500}, N in {0, 1, 7}, both cases.
double gradient_error();

struct VerifyOptions {
  double exposure = 1e-3;
  double dead_time = 50e-9;
  double flux = 1e5;
  std::size_t pixels = 100000;
  std::uint64_t seed = 0;
  bool corrupt_cdf = false;
};

std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace spad

#endif  // SPAD_VERIFY_HPP_
