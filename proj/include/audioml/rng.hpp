#pragma once

#include <cmath>
#include <cstdint>

namespace audioml {

// Deterministic splittable pseudo-random stream (SplitMix64 core).
//
// Distributions are implemented by hand because the std:: distribution
// objects are implementation-defined; this generator produces the same draw
// sequence for the same seed on every platform.
//
// child(a, b) derives a substream keyed on (a, b) from the seed this stream
// was constructed with, independent of how many draws the parent has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : root_(seed), state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi], both ends inclusive. Bitmask rejection
  // keeps the draw unbiased for every span.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span =
        static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == ~0ull) return static_cast<std::int64_t>(next_u64());
    std::uint64_t mask = span;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    std::uint64_t draw;
    do {
      draw = next_u64() & mask;
    } while (draw > span);
    return lo + static_cast<std::int64_t>(draw);
  }

  // Standard Gaussian via Box-Muller; consumes exactly two u64 draws.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Substream keyed on (a, b); derived from the construction seed so child
  // identity does not depend on parent draw history.
  Rng child(std::uint64_t a, std::uint64_t b = 0) const {
    return Rng(combine(combine(root_, a), b));
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t combine(std::uint64_t h, std::uint64_t k) {
    return finalize(h ^ (finalize(k + 0x9e3779b97f4a7c15ull) +
                         0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2)));
  }

  std::uint64_t root_;
  std::uint64_t state_;
};

}  // namespace audioml
