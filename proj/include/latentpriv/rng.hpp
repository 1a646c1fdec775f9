#ifndef LATENTPRIV_RNG_HPP
#define LATENTPRIV_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include "latentpriv/linalg.hpp"

namespace latentpriv {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ with splitmix64 seeding and cacheless Box-Muller normals.
// The generator is fully specified here (no std::*_distribution), so a given
// seed and call sequence produce identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Consumes two uniforms per draw and keeps
  // no spare, so the stream position is a pure function of the call count.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  Vec normal_vec(std::size_t n) {
    Vec v(n);
    for (auto& x : v) x = normal();
    return v;
  }

  // Derives an independent deterministic stream. Used by chunked kernels so
  // serial and parallel execution see identical per-chunk randomness.
  Rng fork(std::uint64_t stream) const {
    std::uint64_t mix = stream + 0x632BE59BD9B4E019ULL;
    std::uint64_t child = seed_ ^ detail::splitmix64(mix);
    std::uint64_t tmp = child;
    return Rng(detail::splitmix64(tmp));
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
};

}  // namespace latentpriv

#endif  // LATENTPRIV_RNG_HPP
