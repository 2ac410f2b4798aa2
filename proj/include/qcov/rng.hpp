// Deterministic counter-based random number generation.
//
// The whole stream is a pure function of (seed, counter):
//
//   draw(seed, counter) = mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15)
//
// where mix64 is the SplitMix64 finalizer. Uniform doubles take the top
// 53 bits of a draw, so the sequence is bit-stable across platforms and
// trivially shardable: any worker can evaluate any counter directly.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

namespace qcov {

inline constexpr std::uint64_t kRngGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// The counter-indexed draw; CounterRng::next_u64 walks the same sequence.
inline std::uint64_t draw_at(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + (counter + 1) * kRngGamma);
}

/// Uniform in [0, 1) from the top 53 bits of draw_at(seed, counter).
inline double uniform_at(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(draw_at(seed, counter) >> 11) * 0x1.0p-53;
}

/// Stateful view of the counter-based stream.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return draw_at(seed_, counter_++); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (pairs generated, second value cached).
  double gaussian() {
    if (spare_) {
      double z = *spare_;
      spare_.reset();
      return z;
    }
    // First uniform shifted into (0, 1] so the log is finite.
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    return r * std::cos(phi);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

}  // namespace qcov
