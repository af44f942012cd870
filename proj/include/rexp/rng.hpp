#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>

namespace rexp {

// Seed splitting: every consumer of randomness owns a stream id and derives an
// independent engine from (seed, stream). The rule is
//
//   engine seed = splitmix64(seed ^ (0x9e3779b97f4a7c15 * (stream + 1)))
//
// so adding a consumer with a fresh stream id never perturbs the draws seen by
// existing ones. All helpers below consume raw mt19937_64 output directly,
// which keeps the generated values bit-identical across standard libraries.

constexpr std::uint64_t kStreamEnvironment = 0;
constexpr std::uint64_t kStreamRunSampling = 1;
constexpr std::uint64_t kStreamTesting = 100;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))));
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (kMax % n + 1) % n;  // 2^64 mod n
  const std::uint64_t limit = kMax - rem;        // last accepted raw value
  std::uint64_t x = rng();
  while (x > limit) x = rng();
  return x % n;
}

/// Index drawn according to `weights` (nonnegative, summing to ~1).
/// Consumes exactly one uniform01 draw. Rounding overshoot falls back to the
/// last index with positive weight.
inline std::size_t sample_index(std::span<const double> weights, std::mt19937_64& rng) {
  if (weights.empty()) throw std::invalid_argument("sample_index: empty weights");
  const double u = uniform01(rng);
  double cum = 0.0;
  std::size_t last_positive = 0;
  bool seen_positive = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      last_positive = i;
      seen_positive = true;
    }
    cum += weights[i];
    if (u < cum) return i;
  }
  if (!seen_positive) throw std::invalid_argument("sample_index: all weights zero");
  return last_positive;
}

}  // namespace rexp
