#pragma once

// Platform-stable random draws. The standard distributions are
// implementation-defined, so seeded results would differ across standard
// libraries; these helpers only depend on the mt19937_64 bit stream.

#include <cstdint>
#include <random>

namespace geosp {

using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound). `bound` must be positive.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent stream seed for one region, so that a region's result does
// not depend on which other regions are processed.
inline std::uint64_t region_seed(std::uint64_t seed, std::uint64_t region) {
  return seed ^ splitmix64(region);
}

}  // namespace geosp
