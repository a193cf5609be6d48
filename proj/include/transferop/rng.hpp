#pragma once

#include <cstdint>
#include <random>

namespace transferop {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t value) noexcept;

/// Seed of sub-stream `stream` of a parent seed. Streams with different
/// indices are statistically independent for practical purposes, and the
/// mapping does not depend on how many streams are in use.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Seeded generator with platform-independent uniform and normal draws.
///
/// The std:: distributions are implementation-defined, so the variates are
/// produced here from raw 64-bit engine output to keep datasets and feature
/// maps bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Standard normal via the Marsaglia polar method.
  double normal() noexcept;
  std::uint64_t next() noexcept { return engine_(); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace transferop
