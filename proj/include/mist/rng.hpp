#pragma once

#include <cstdint>

namespace mist {

/// SplitMix64 (Steele, Lea & Flood; public domain reference sequence).
/// Chosen over std::mt19937 + std::normal_distribution because the standard
/// distributions are implementation-defined: this generator produces the
/// same stream on every platform, so seeded fields are reproducible.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

/// Standard normal deviates via Box-Muller over SplitMix64.
class GaussianSampler {
public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double next();

private:
  SplitMix64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mist
