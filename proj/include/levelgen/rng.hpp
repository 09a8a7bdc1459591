#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace levelgen {

/// Seeded random stream. Draws are built directly on the 64-bit Mersenne
/// Twister output so results do not depend on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  /// Uniform in [lo, hi].
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform01() < p; }
  /// Zero-mean, unit-variance normal sample (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes a run seed with a stream index into an independent child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace levelgen
