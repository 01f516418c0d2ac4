#pragma once

#include <vector>

#include "ristap/comm_ci.hpp"
#include "ristap/cone_qp.hpp"
#include "ristap/stap_model.hpp"

namespace ristap {

/// Reflection-explicit factorization of the echo at a fixed waveform:
///   H_ind(phi) x     = Ft  * phi + Ftil  * lift(phi)
///   H_ind,c(phi) x   = Fc  * phi + Fctil * lift(phi)
/// where lift(phi) stacks the per-surface Kronecker squares phi_r (x) phi_r.
struct FMatrices {
  CMatrix Ft;     // NMP x (R Nr)
  CMatrix Ftil;   // NMP x (R Nr^2)
  CMatrix Fc;
  CMatrix Fctil;
};

FMatrices build_F_matrices(const StackedModel& model, const CVector& x);

/// Blockwise Kronecker square [phi_r (x) phi_r]_r.
CVector lift_phi(const CVector& phi, int n_ris, int nr);

/// Filter-side contractions of the F factorization: everything the reflection
/// objective
///   f2(phi) = eta |s_c + vc^H phi + vct^H lift|^2 - |s_t + vt^H phi + vtt^H lift|^2
/// needs, kept as rank-one factors.
struct RisTerms {
  int n_ris = 0, nr = 0;
  Real eta = 0.0;
  CVector vt, vc;    // F^H w, length R*Nr
  CVector vtt, vct;  // Ftil^H w, length R*Nr^2
  Complex s_t, s_c;  // w^H H_dir x and clutter analog
  Real c2 = 0.0;     // eta |s_c|^2 - |s_t|^2

  Real f2(const CVector& phi) const;
  // Individual polynomial pieces of f2 (used by the per-term majorizer checks).
  CVector apply_Cq(const CVector& lift) const;      // Ctil * lift
  CVector apply_Cbar(const CVector& phi) const;     // Cbar * phi, length R*Nr^2
  CVector apply_Cbar_adj(const CVector& lift) const; // Cbar^H * lift, length R*Nr
  CVector c_lin() const;     // c  = 2 eta s_c vc - 2 s_t vt
  CVector ctil_lin() const;  // c~ = 2 eta s_c vct - 2 s_t vtt
};

RisTerms assemble_f2_terms(const FMatrices& f, const StackedModel& model, const CVector& w,
                           const CVector& x, Real eta, Real sigma_r2);

/// Certified curvature constants for the majorizer, valid over the whole
/// feasible set {|phi_n| <= a_max}:
///   lambda1     >= lambda_max(Ctil)            (quartic Taylor shift)
///   lambda2     >= lambda_max(Lbar + Lbar^T)   (lifted-linear real form)
///   lambda3     >= global cubic remainder curvature
///   lambda_lift >= 8 lambda1 Nr a_max^2        (Kronecker-square contraction)
struct CurvatureBounds {
  Real lambda1 = 0.0;
  Real lambda2 = 0.0;
  Real lambda3 = 0.0;
  Real lambda_lift = 0.0;
  Real cubic_hessian_at_anchor = 0.0;  // positive part of the anchored Hessian
};

CurvatureBounds curvature_bounds(const RisTerms& terms, const CVector& anchor, Real a_max);

/// Convex majorizer of f2 at the anchor:
///   S(phi) = eta |vc^H phi|^2 + mu ||phi||^2 + Re{phi^H m} + c8,
/// tangent at the anchor and dominating f2 on the feasible set.
struct RisSurrogate {
  CVector vc;
  Real eta = 0.0;
  Real mu = 0.0;
  CVector m;
  Real c8 = 0.0;
  CVector anchor;
  CurvatureBounds bounds;

  Real value(const CVector& phi) const {
    return eta * std::norm(vc.dot(phi)) + mu * phi.squaredNorm() + std::real(phi.dot(m)) + c8;
  }
};

RisSurrogate ris_surrogate(const RisTerms& terms, const CurvatureBounds& bounds,
                           const CVector& anchor, Real a_max);

struct RisQpResult {
  CVector phi;
  bool accepted = false;  // false: infeasible or non-improving, anchor kept
  QpStatus qp_status = QpStatus::kMaxIter;
  Real f2_before = 0.0;
  Real f2_after = 0.0;
};

/// Minimizes the majorizer under the phi-form QoS halfspaces and amplitude
/// discs; keeps the anchor when the subproblem is infeasible or the step
/// would increase f2.
RisQpResult ris_qp_solve(const RisTerms& terms, const RisSurrogate& surrogate,
                         const CiConstraintSet::PhiForm& ci, Real a_max,
                         const ConeQpOptions& options);

/// One full reflection update: the certified majorizer step, an
/// anchor-curvature candidate, and extrapolations along the move, all vetted
/// against the exact objective and constraints so the accepted point never
/// does worse than the certified step.
RisQpResult ris_step(const RisTerms& terms, const CiConstraintSet::PhiForm& ci,
                     const CVector& anchor, Real a_max, const ConeQpOptions& options,
                     Real margin_slack, RisSurrogate* certified_out = nullptr);

}  // namespace ristap
