#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace manifold {

/// Portable seeded generator. The algorithm is fixed so that fixtures and
/// random initializations reproduce bit-for-bit on every platform:
///
///   * state: xoshiro256** (Blackman & Vigna), four 64-bit words;
///   * seeding: the seed is expanded by SplitMix64
///     (increment 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 and
///     0x94D049BB133111EB, shifts 30/27/31);
///   * uniform(): top 53 bits scaled by 2^-53, giving [0, 1);
///   * normal(): Box-Muller, cosine branch only, one draw per call pair
///     (u1 mapped to (0, 1] so the logarithm is finite).
///
/// std::mt19937_64 would be portable too, but the standard distributions
/// are not, hence the hand-written conversions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = -bound % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= limit) return r % bound;
    }
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace manifold
