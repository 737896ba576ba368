// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace usmb {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the value at (seed, stream, counter) is a pure
/// function, so independent streams can be consumed in any order or in
/// parallel with bit-identical results.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL))) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter));
  }

  /// Uniform in (0, 1): 53 random bits offset by half an ulp, never 0 or 1.
  double uniform(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; draws 2k and 2k+1 share a uniform pair.
  double normal(std::uint64_t counter) const noexcept {
    const std::uint64_t pair = counter >> 1;
    const double u1 = uniform(2 * pair);
    const double u2 = uniform(2 * pair + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    return (counter & 1U) ? r * std::sin(phase) : r * std::cos(phase);
  }

 private:
  std::uint64_t key_;
};

/// Sequential convenience wrapper over a CounterRng stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept : rng_(seed, stream) {}

  double uniform() noexcept { return rng_.uniform(counter_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  /// Knuth's multiplication method; adequate for the small means used here.
  unsigned poisson(double mean) noexcept {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    unsigned k = 0;
    double p = uniform();
    while (p > limit) {
      ++k;
      p *= uniform();
    }
    return k;
  }
  std::uint64_t below(std::uint64_t n) noexcept {
    return n == 0 ? 0 : rng_.bits(counter_++) % n;
  }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace usmb
