#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace mswlab {

/// SplitMix64 finalizer. Bijective on 64-bit words; used to derive
/// independent stream seeds from (base seed, index) pairs so that every
/// trial's randomness is fixed before any scheduling decision is made.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for child stream `index` of `base`:
///   derive_seed(base, i) = mix64(base ^ mix64(i + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t i,
                                 std::uint64_t j) noexcept {
  return derive_seed(derive_seed(base, i), j);
}

/// Deterministic random source. The engine is std::mt19937_64; the
/// real-valued transforms are spelled out here (rather than using the
/// <random> distributions) so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller (both outputs of a pair are used).
  double normal();

  /// +1 or -1 with probability 1/2 each.
  double rademacher() { return (engine_() >> 63) != 0 ? 1.0 : -1.0; }

  /// Uniform on the unit sphere in R^d.
  Eigen::VectorXd unit_vector(Eigen::Index d);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mswlab
