#pragma once

// Counter-based random streams. A stream is a 64-bit key; draw i is the
// SplitMix64 finalizer applied to key + (i+1) * golden-gamma. Keys for the
// per-site streams are derived by hashing (master, trial, site), so any draw
// can be reproduced without replaying earlier trials.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace eigcount {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Stable key for the stream owned by (master, trial, site).
constexpr std::uint64_t stream_key(std::uint64_t master, std::uint64_t trial, std::uint64_t site) {
  std::uint64_t h = mix64(master ^ 0x6A09E667F3BCC908ULL);
  h = mix64(h ^ (trial + 0xBB67AE8584CAA73BULL));
  h = mix64(h ^ (site + 0x3C6EF372FE94F82BULL));
  return h;
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  constexpr std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGoldenGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal (Box-Muller, one draw kept per call for simplicity).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform point in the closed unit disc by rejection from the square.
  void unit_disc(double& x, double& y) {
    do {
      x = uniform(-1.0, 1.0);
      y = uniform(-1.0, 1.0);
    } while (x * x + y * y > 1.0);
  }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace eigcount
