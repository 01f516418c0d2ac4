#include "ristap/detection.hpp"

#include <cmath>
#include <stdexcept>

#include "ristap/rng.hpp"

namespace ristap {

Real gaussian_q(Real x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

// Rational approximation of the standard normal quantile (Acklam), then one
// Halley step against erfc to push the error to machine level.
Real norminv(Real p) {
  static const Real a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                           -2.759285104469687e+02, 1.383577518672690e+02,
                           -3.066479806614716e+01, 2.506628277459239e+00};
  static const Real b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                           -1.556989798598866e+02, 6.680131188771972e+01,
                           -1.328068155288572e+01};
  static const Real c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                           -2.400758277161838e+00, -2.549732539343734e+00,
                           4.374664141464968e+00,  2.938163982698783e+00};
  static const Real d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                           2.445134137142996e+00, 3.754408661907416e+00};
  const Real plow = 0.02425;
  Real x;
  if (p < plow) {
    const Real q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const Real q = p - 0.5;
    const Real r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const Real q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement on Phi(x) - p = 0.
  const Real e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const Real u = e * std::sqrt(2.0 * kPi) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

}  // namespace

Real gaussian_q_inv(Real p) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("gaussian_q_inv: p must be in (0,1)");
  return -norminv(p);
}

Real detection_probability(Real scnr, Real p_fa) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) {
    throw std::invalid_argument("detection_probability: p_fa must be in (0,1)");
  }
  if (scnr < 0.0) throw std::invalid_argument("detection_probability: scnr must be >= 0");
  return gaussian_q(gaussian_q_inv(p_fa) - std::sqrt(2.0 * scnr));
}

Real detection_probability_mc(Real scnr, Real p_fa, long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("detection_probability_mc: trials must be >= 1");
  const Real threshold = gaussian_q_inv(p_fa);  // unit-variance noise statistic
  const Real shift = std::sqrt(2.0 * scnr);
  Rng rng(seed);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    if (shift + rng.gaussian() > threshold) ++hits;
  }
  return static_cast<Real>(hits) / static_cast<Real>(trials);
}

}  // namespace ristap
