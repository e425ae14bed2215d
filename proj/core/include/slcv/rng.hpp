#pragma once

#include <cmath>
#include <cstdint>

namespace slcv {

/// Deterministic 64-bit generator (SplitMix64) with derivable per-entity streams.
/// Chosen over <random> engines/distributions so recorded test vectors are
/// bit-identical across standard libraries and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Independent stream derived from this generator's seed and a tag.
  SplitMix64 split(std::uint64_t tag) const {
    SplitMix64 s(state_ + 0xD1B54A32D192ED03ULL * (tag + 1));
    s.next();
    return s;
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal deviate via Box-Muller; consumes exactly two uniforms.
  double normal() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.28318530717958647692 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace slcv
