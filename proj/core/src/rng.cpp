#include "setadam/rng.hpp"

#include <cmath>

namespace setadam {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : base_(mix(seed + kGolden * (stream + 1))) {}

std::uint64_t CounterRng::next_u64() {
  return mix(base_ + kGolden * (++counter_));
}

std::uint64_t CounterRng::value_at(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter) {
  return mix(mix(seed + kGolden * (stream + 1)) + kGolden * (counter + 1));
}

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::uint64_t CounterRng::next_below(std::uint64_t bound) {
  return next_u64() % bound;
}

}  // namespace setadam
