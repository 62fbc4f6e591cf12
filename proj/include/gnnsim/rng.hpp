#pragma once
// Deterministic random number generation. Everything that samples (graph
// generation, model initialization) goes through this generator so that a
// given seed yields byte-identical artifacts on any platform; the std
// distribution adapters are implementation-defined and unsuitable for that.

#include <cstdint>

namespace gnnsim {

// SplitMix64 core. Passes the usual statistical batteries and is trivially
// seedable from a single u64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform integer in [0, bound), bound > 0. Rejection-sampled, unbiased.
  std::uint64_t uniform_u64(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller. Consumes two uniforms per pair.
  double gaussian();

  // Independent child stream; used to give each generated artifact its own
  // seed derived from (parent seed, index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gnnsim
