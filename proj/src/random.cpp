#include "spad/random.hpp"

#include <cmath>

namespace spad {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

RandomSource RandomSource::for_stream(std::uint64_t seed,
                                      std::uint64_t stream) {
  // Mix the key through splitmix twice so neighbouring keys decorrelate.
  std::uint64_t k = seed;
  std::uint64_t mixed = splitmix64(k) ^ (stream * 0xd1b54a32d192ed03ULL);
  return RandomSource(splitmix64(mixed));
}

RandomSource RandomSource::for_pixel(std::uint64_t seed, std::uint64_t row,
                                     std::uint64_t col) {
  std::uint64_t k = seed ^ 0x5bd1e9955bd1e995ULL;
  std::uint64_t a = splitmix64(k) ^ (row * 0x9e3779b97f4a7c15ULL);
  std::uint64_t b = splitmix64(a) ^ (col * 0xc2b2ae3d27d4eb4fULL);
  return RandomSource(splitmix64(b));
}

RandomSource::result_type RandomSource::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomSource::uniform() {
  // 53 random bits mapped onto {1, ..., 2^53} * 2^-53.
  return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

}  // namespace spad
