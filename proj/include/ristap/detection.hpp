#pragma once

#include <cstdint>

#include "ristap/types.hpp"

namespace ristap {

/// Gaussian upper-tail probability Q(x) and its inverse.
Real gaussian_q(Real x);
Real gaussian_q_inv(Real p);

/// Coherent known-signal detector operating characteristic:
///   P_d = Q( Q^{-1}(P_fa) - sqrt(2 * scnr) ).
/// Throws unless 0 < p_fa < 1 and scnr >= 0.
Real detection_probability(Real scnr, Real p_fa);

/// Monte Carlo estimate of the same detector: threshold set from the noise-only
/// statistic at the requested false-alarm level, detection counted on the
/// signal-plus-noise statistic.
Real detection_probability_mc(Real scnr, Real p_fa, long trials, std::uint64_t seed);

}  // namespace ristap
