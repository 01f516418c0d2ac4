#pragma once

#include <cstdint>
#include <random>

#include "ristap/types.hpp"

namespace ristap {

/// Seeded random stream with explicitly specified draw algebra.
///
/// The mt19937_64 engine is fully specified by the standard; the uniform and
/// Gaussian transforms below are written out so that a given seed produces
/// the same values on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  Real uniform() { return static_cast<Real>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi).
  Real uniform(Real lo, Real hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  Real gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const Real u1 = 1.0 - uniform();  // (0, 1]
    const Real u2 = uniform();
    const Real r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  /// Circularly symmetric complex Gaussian with E|z|^2 = variance.
  Complex cgaussian(Real variance = 1.0) {
    const Real s = std::sqrt(variance / 2.0);
    const Real re = gaussian();
    const Real im = gaussian();
    return {s * re, s * im};
  }

  /// Unit-modulus value with uniform phase.
  Complex phase() {
    const Real t = uniform(0.0, 2.0 * kPi);
    return {std::cos(t), std::sin(t)};
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  Real spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ristap
