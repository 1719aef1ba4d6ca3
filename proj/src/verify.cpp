#include "spad/verify.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "spad/distributions.hpp"
#include "spad/likelihood.hpp"

namespace spad {

ErlangCdf library_cdf() {
  return [](Duration t, std::int64_t n, Rate r) { return erlang_cdf(t, n, r); };
}

ErlangCdf corrupted_cdf(double fault) {
  return [fault](Duration t, std::int64_t n, Rate r) {
    const double v = erlang_cdf(t, n, r);
    return n >= 2 ? v * (1.0 + fault) : v;
  };
}

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& pmf,
                               double min_expected) {
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  if (total == 0.0) throw std::invalid_argument("chi_square_gof: no samples");

  double covered = 0.0;
  for (double p : pmf) covered += p;
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  std::pair<double, double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (i < observed.size()) acc.first += static_cast<double>(observed[i]);
    acc.second += total * pmf[i];
    if (acc.second >= min_expected) {
      bins.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  for (std::size_t i = pmf.size(); i < observed.size(); ++i) {
    acc.first += static_cast<double>(observed[i]);
  }
  acc.second += total * std::max(0.0, 1.0 - covered);
  if (acc.second > 0.0 || acc.first > 0.0) {
    if (acc.second < min_expected && !bins.empty()) {
      bins.back().first += acc.first;
      bins.back().second += acc.second;
    } else {
      bins.push_back(acc);
    }
  }

  ChiSquareResult r;
  for (const auto& [o, e] : bins) {
    if (e > 0.0) r.statistic += (o - e) * (o - e) / e;
  }
  r.dof = bins.size() > 1 ? bins.size() - 1 : 0;
  r.p_value = r.dof == 0 ? 1.0
                         : boost::math::gamma_q(0.5 * static_cast<double>(r.dof),
                                                0.5 * r.statistic);
  return r;
}

std::vector<std::uint64_t> simulate_count_histogram(Rate flux, double exposure,
                                                    double dead_time,
                                                    std::size_t pixels,
                                                    std::uint64_t seed) {
  const SensorConfig config = SensorConfig::ideal(exposure, dead_time);
  std::vector<std::uint64_t> hist;
  const auto n = static_cast<std::int64_t>(pixels);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      RandomSource rng = RandomSource::for_pixel(seed, 0, i);
      const std::size_t count = simulate_pixel(flux, config, rng).count();
      if (count >= local.size()) local.resize(count + 1, 0);
      ++local[count];
    }
#pragma omp critical
    {
      if (local.size() > hist.size()) hist.resize(local.size(), 0);
      for (std::size_t i = 0; i < local.size(); ++i) hist[i] += local[i];
    }
  }
  return hist;
}

double normalization_error(const ErlangCdf& cdf) {
  constexpr std::array<double, 3> kExpected = {0.1, 2.0, 50.0};
  constexpr std::array<double, 3> kDeadFraction = {1e-4, 1e-2, 1e-1};
  constexpr std::array<double, 3> kExposure = {1e-3, 1.0, 20.0};
  double worst = 0.0;
  for (double T : kExposure) {
    for (double lt : kExpected) {
      for (double frac : kDeadFraction) {
        const Rate flux(lt / T);
        const Duration exposure(T);
        const Duration dead(frac * T);
        const std::int64_t m = max_events(exposure, dead);
        double sum = 0.0;
        for (std::int64_t n = 0; n <= m; ++n) {
          sum += detail::count_pmf_from_cdf(n, flux, exposure, dead, cdf);
        }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
  }
  return worst;
}

double duality_error(const ErlangCdf& cdf) {
  double worst = 0.0;
  for (double rate : {0.1, 1.0, 10.0}) {
    for (double t : {0.01, 1.0, 100.0}) {
      for (std::int64_t n = 0; n <= 50; ++n) {
        const double direct = poisson_pmf(n, Rate(rate), Duration(t));
        const double diff = cdf(Duration(t), n, Rate(rate)) -
                            cdf(Duration(t), n + 1, Rate(rate));
        worst = std::max(worst, std::abs(direct - diff));
      }
    }
  }
  return worst;
}

double dead_time_collapse_error(const ErlangCdf& cdf) {
  double worst = 0.0;
  for (double rate : {0.1, 1.0, 10.0}) {
    for (double t : {0.01, 1.0, 100.0}) {
      for (std::int64_t n = 0; n <= 50; ++n) {
        const double with_zero_dead = detail::count_pmf_from_cdf(
            n, Rate(rate), Duration(t), Duration(0.0), cdf);
        worst = std::max(worst, std::abs(with_zero_dead -
                                         poisson_pmf(n, Rate(rate), Duration(t))));
      }
    }
  }
  return worst;
}

namespace {

EventStream gradient_probe(std::size_t count, CaseTag tag) {
  EventStream s;
  s.exposure = 1.0;
  s.dead_time = 0.01;
  for (std::size_t i = 0; i + 1 < count; ++i) s.times.push_back(0.05 + 0.1 * i);
  if (count > 0) s.times.push_back(tag == CaseTag::kCaseI ? 0.75 : 0.995);
  return s;
}

}  // namespace

double gradient_error() {
  double worst = 0.0;
  for (std::size_t count : {0u, 1u, 7u}) {
    for (CaseTag tag : {CaseTag::kCaseI, CaseTag::kCaseII}) {
      if (count == 0 && tag == CaseTag::kCaseII) continue;
      const EventStream s = gradient_probe(count, tag);
      for (double lambda : {0.5, 5.0, 500.0}) {
        const double h = 1e-6 * lambda;
        const double fd = (log_likelihood(s, Rate(lambda + h)).log_value -
                           log_likelihood(s, Rate(lambda - h)).log_value) /
                          (2.0 * h);
        const double g = grad_log_likelihood(s, Rate(lambda));
        worst = std::max(worst, std::abs(fd - g) / std::abs(g));
      }
    }
  }
  return worst;
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  const ErlangCdf cdf = options.corrupt_cdf ? corrupted_cdf() : library_cdf();
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double measured, double threshold,
                 bool below, std::string detail = {}) {
    CheckResult r{std::move(name), below ? measured < threshold : measured > threshold,
                  measured, threshold, std::move(detail)};
    out.push_back(std::move(r));
  };

  add("normalization", normalization_error(cdf), 1e-9, true,
      "max |sum count_pmf - 1| over 27 (lambda, T, tau_d) points");
  add("poisson-erlang-duality", duality_error(cdf), 1e-12, true,
      "max |poisson_pmf - (F(n) - F(n+1))|, n <= 50");
  add("zero-dead-time-collapse", dead_time_collapse_error(cdf), 1e-12, true,
      "max |count_pmf(tau_d = 0) - poisson_pmf|");
  add("gradient-finite-difference", gradient_error(), 1e-6, true,
      "max relative error, lambda in {0.5, 5, 500}, N in {0, 1, 7}");

  if (options.pixels > 0) {
    const auto hist = simulate_count_histogram(Rate(options.flux), options.exposure,
                                               options.dead_time, options.pixels,
                                               options.seed);
    std::vector<double> pmf(hist.size());
    for (std::size_t n = 0; n < hist.size(); ++n) {
      pmf[n] = detail::count_pmf_from_cdf(
          static_cast<std::int64_t>(n), Rate(options.flux),
          Duration(options.exposure), Duration(options.dead_time), cdf);
    }
    const ChiSquareResult chi = chi_square_gof(hist, pmf);
    std::ostringstream detail;
    detail << options.pixels << " pixels, chi2 = " << chi.statistic
           << ", dof = " << chi.dof;
    add("monte-carlo-count-chi2", chi.p_value, 1e-3, false, detail.str());
  }
  return out;
}

}  // namespace spad
