#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace dsebo {

// One splitmix64 step (Steele, Lea, Flood 2014). Used to mix seeds for
// substreams; never used as the sampling generator itself.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named RNG streams. Each consumer draws from its own stream so that
// changing one (say, the evaluation budget) never perturbs another (say,
// the shared embedding matrix).
enum class Stream : std::uint64_t {
  embedding_matrix = 1,
  dataset_init = 2,
  acquisition = 3,
  random_search = 4,
  bandit_strategy = 5,
  gp_restarts = 6,
  arm_base = 100,  // arm i uses arm_base + i
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1));
  return splitmix64(s);
}

// mt19937_64 keyed by (seed, stream). The mt19937_64 output sequence is
// pinned by the standard, so a (seed, stream) pair reproduces draws exactly.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream_id) {
  return std::mt19937_64(mix_seed(seed, stream_id));
}

inline std::mt19937_64 substream(std::uint64_t seed, Stream stream) {
  return substream(seed, static_cast<std::uint64_t>(stream));
}

// Uniform double in [0,1) from the top 53 bits of one generator output.
inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// One standard normal via the basic Box-Muller transform. Each draw consumes
// exactly two generator outputs, so stream consumption is reproducible
// independent of call sites (no cached second variate).
inline double standard_normal(std::mt19937_64& g) {
  const double u1 = 1.0 - uniform01(g);  // (0, 1]
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace dsebo
