#ifndef SPAD_RANDOM_HPP_
#define SPAD_RANDOM_HPP_

#include <cstdint>
#include <limits>

namespace spad {

// xoshiro256** seeded through splitmix64. Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions, but the
// uniform() and normal() draws below are defined here so that sequences are
// identical across standard library implementations.
class RandomSource {
 public:
  using result_type = std::uint64_t;

  explicit RandomSource(std::uint64_t seed = 0);

  // Independent stream for a pixel. The state is a pure function of
  // (seed, row, col), so simulation order never changes the output.
  static RandomSource for_pixel(std::uint64_t seed, std::uint64_t row,
                                std::uint64_t col);
  // Independent stream keyed by an arbitrary (seed, stream) pair.
  static RandomSource for_stream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  // Uniform on (0, 1].
  double uniform();
  // Standard normal (polar Box-Muller, one cached spare).
  double normal();
  bool bernoulli(double p) { return p > 0.0 && uniform() <= p; }

 private:
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace spad

#endif  // SPAD_RANDOM_HPP_
