#pragma once

#include <cstdint>

namespace setadam {

// Counter-based deterministic generator. The k-th output is a pure function
// of (seed, stream, k), so independent streams can be replayed from any
// position and every implementation that follows the algorithm below
// produces the same values:
//
//   mix(z):  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9;
//            z ^= z >> 27;  z *= 0x94D049BB133111EB;
//            z ^= z >> 31;  return z;            (SplitMix64 finalizer)
//   base          = mix(seed + 0x9E3779B97F4A7C15 * (stream + 1))
//   output(k)     = mix(base + 0x9E3779B97F4A7C15 * (k + 1))
//
// All arithmetic is modulo 2^64.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double next_double();

  // Standard normal via Box-Muller; consumes two counter values.
  double next_normal();

  // Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  std::uint64_t counter() const { return counter_; }

  static std::uint64_t value_at(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t counter);

 private:
  std::uint64_t base_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace setadam
