#pragma once

#include <vector>

#include "ristap/comm_ci.hpp"
#include "ristap/cone_qp.hpp"
#include "ristap/stap_model.hpp"

namespace ristap {

/// One-anchor majorizer of the waveform objective
///   f1(x) = eta |a_c^H x|^2 - |a_t^H x|^2 + c1,
/// with the concave part linearized at the anchor.  Both quadratics are rank
/// one through the filter pullbacks a = H^H w, so everything is stored as
/// factors.  `scale` normalizes the objective so the splitting penalty can
/// stay at its nominal value regardless of absolute channel gains.
struct WaveformSurrogate {
  CVector a_t;       // (H_dir + H_ind(phi))^H w
  CVector a_c;       // clutter analog
  Real eta = 0.0;
  Real c1 = 0.0;     // eta sigma_r2 ||w||^2
  Real c3 = 0.0;     // x_anchor^H A x_anchor
  CVector anchor;
  Complex at_dot_anchor;  // a_t^H x_anchor
  Real scale = 1.0;

  Real f1(const CVector& x) const;
  /// Majorizer value: tangent at the anchor, >= f1 everywhere.
  Real surrogate(const CVector& x) const;
};

WaveformSurrogate waveform_surrogate(const StackedModel& model, const CVector& x_anchor,
                                     const CVector& w, const CVector& phi, Real eta,
                                     Real sigma_r2);

/// Constant-modulus splitting state.  psi always sits exactly on the modulus
/// sphere; lambda is kept in the surrogate's normalized scale.
struct AdmmState {
  CVector x, psi, lambda;
  Real rho = 1.0;
  Real scale = 1.0;  // objective scale lambda currently lives in

  static AdmmState initialize(const CVector& x0, Real amplitude);
};

struct WaveformAdmmOptions {
  Real rho = 1.0;
  bool adaptive_rho = false;  // residual balancing, x2 steps
  int max_iter = 200;
  Real consensus_tol = 1e-6;      // on ||x - psi||_inf
  Real margin_restore_tol = 1e-5; // allowed CI slack after snapping x to psi
  ConeQpOptions qp;
};

/// Phase-projection onto the constant-modulus sphere, aligned with rho*x+lambda.
CVector psi_update(const CVector& x, const CVector& lambda, Real rho, Real amplitude);

/// Per-support-block phase coordinate ascent on the worst margin, on the
/// modulus sphere.  The QoS constraints touch one slot each, so the program
/// separates and a deterministic sweep settles each block.
CVector sphere_margin_ascent(const CVector& x, const std::vector<Halfspace>& halfspaces,
                             Real amplitude, int sweeps = 40);

/// Alternating correction between violated halfspaces and the modulus sphere,
/// starting from `x`; returns a sphere point (margins as good as the
/// alternation could make them).
CVector restore_modulus_margins(const CVector& x, const std::vector<Halfspace>& halfspaces,
                                Real amplitude, Real margin_tol, int sweeps = 50);

/// lambda <- lambda + rho (x - psi).
CVector dual_update(const CVector& lambda, const CVector& x, const CVector& psi, Real rho);

/// Single constrained prox step of the splitting: the convex QP in x.
QpSolution admm_x_update(ConeQpSolver& solver, const WaveformSurrogate& surrogate,
                         const AdmmState& state);

enum class WaveformStatus { kConverged, kMaxIter, kInfeasible };

struct WaveformRoundResult {
  CVector x;          // snapped to exact modulus
  WaveformStatus status = WaveformStatus::kMaxIter;
  int admm_iterations = 0;
  Real final_consensus = 0.0;   // ||x_relaxed - psi||_inf before snapping
  Real min_ci_margin = 0.0;
  std::vector<Real> al_trace;   // augmented-Lagrangian values (normalized)
};

/// One full majorize-then-split round at a fixed surrogate anchor: iterate
/// (x, psi, lambda) to consensus, snap x to psi, re-check margins, and retry
/// once with a doubled penalty if the snap broke them.
WaveformRoundResult run_waveform_round(const WaveformSurrogate& surrogate,
                                       const std::vector<Halfspace>& ci_halfspaces,
                                       Real amplitude, AdmmState& state,
                                       const WaveformAdmmOptions& options);

}  // namespace ristap
