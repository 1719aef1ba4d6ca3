#ifndef SPAD_REFERENCE_HPP_
#define SPAD_REFERENCE_HPP_

// Single-threaded reference versions of the parallel per-pixel kernels.
// Tests check the parallel kernels against these bit for bit; the benchmark
// compares their throughput.

#include <cstdint>
#include <vector>

#include "spad/likelihood.hpp"
#include "spad/reconstruction.hpp"
#include "spad/simulator.hpp"

namespace spad::reference {

EventImage simulate_image(const Image& image, double reference_lux,
                          const SensorConfig& config, std::uint64_t seed,
                          std::size_t n_det = 0);

GradientMap grad_log_likelihood_map(const EventImage& streams,
                                    const Grid<double>& flux);

MleMap mle_reconstruct(const EventImage& streams);

std::vector<std::uint64_t> simulate_count_histogram(Rate flux, double exposure,
                                                    double dead_time,
                                                    std::size_t pixels,
                                                    std::uint64_t seed);

}  // namespace spad::reference

#endif  // SPAD_REFERENCE_HPP_
