#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <string_view>

#include "dynasaga/types.hpp"

namespace dynasaga {

// splitmix64 finalizer, used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Per-run stream seed: hash of (master seed, stream name, stream index).
// Reordering or adding streams never perturbs another stream's sequence.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view name, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ fnv1a64(name)) ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

// Deterministic RNG. The engine is std::mt19937_64 (bit-exact by the
// standard); the distributions are implemented here because the standard
// library's are implementation-defined and would break reproducibility
// across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in (0, 1]
  Scalar uniform() {
    return (static_cast<Scalar>(gen_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // standard normal via Box-Muller (one value per call, no cached pair)
  Scalar gaussian() {
    const Scalar u1 = uniform();
    const Scalar u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // unbiased integer in [0, n) via masked rejection
  std::uint64_t uniform_index(std::uint64_t n) {
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      const std::uint64_t r = gen_() & mask;
      if (r < n) return r;
    }
  }

  // uniform draw on the unit sphere in R^d
  Vector unit_sphere(Index d) {
    Vector v(d);
    for (Index j = 0; j < d; ++j) v[j] = gaussian();
    const Scalar nrm = v.norm();
    return nrm > 0 ? Vector(v / nrm) : unit_sphere(d);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dynasaga
