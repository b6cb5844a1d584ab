#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace hfm {

// SplitMix64 finalizer, used to derive well-separated stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for the stream identified by (master_seed, a, b). Streams are a
// pure function of the key, so work can be scheduled on any worker in
// any order without changing results.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = splitmix64(master_seed);
  s = splitmix64(s ^ splitmix64(a + 1));
  s = splitmix64(s ^ splitmix64(b + 1));
  return s;
}

inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t a,
                                   std::uint64_t b) {
  return std::mt19937_64(derive_stream_seed(master_seed, a, b));
}

// Uniform doubles built directly from engine output bits; avoids the
// implementation-defined behaviour of std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform_pm1(std::mt19937_64& gen) {
  return 2.0 * uniform01(gen) - 1.0;  // [-1, 1)
}

// One standard normal draw via Box-Muller.
inline double standard_normal(std::mt19937_64& gen) {
  const double u1 = 1.0 - uniform01(gen);  // (0, 1]
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

// Uniform point on the unit sphere in `dim` dimensions.
inline std::vector<double> random_unit_vector(std::mt19937_64& gen, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  while (true) {
    double sq = 0.0;
    for (auto& x : v) {
      x = standard_normal(gen);
      sq += x * x;
    }
    if (sq > 1e-24) {
      const double inv = 1.0 / std::sqrt(sq);
      for (auto& x : v) x *= inv;
      return v;
    }
  }
}

}  // namespace hfm
