#pragma once

#include "ristap/stap_model.hpp"
#include "ristap/types.hpp"

namespace ristap {

/// Minimum-variance distortionless receive filter for the current (x, phi):
///   w = (y_c y_c^H + sigma_r2 I)^{-1} y_t / || (y_c y_c^H + sigma_r2 I)^{-1} y_t ||^2
/// computed through the rank-one inversion identity, never forming the
/// covariance.  Throws when the target response vanishes.
CVector mvdr_filter(const StackedModel& model, const CVector& x, const CVector& phi,
                    Real sigma_r2);

/// Same closed form applied to explicit echo vectors (used by tests and by
/// callers that already hold y_t, y_c).
CVector mvdr_filter_from_echoes(const CVector& y_t, const CVector& y_c, Real sigma_r2);

/// Ratio auxiliary update: the filter-output SCNR at (x, phi, w).
Real dinkelbach_eta(const StackedModel& model, const CVector& x, const CVector& phi,
                    const CVector& w, Real sigma_r2);

}  // namespace ristap
