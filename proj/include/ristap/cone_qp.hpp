#pragma once

#include <optional>
#include <vector>

#include "ristap/types.hpp"

namespace ristap {

/// Half-plane constraint Re{a^H x[offset .. offset+a.size())} >= rhs.
/// The offset lets the waveform constraints keep their per-slot support
/// instead of storing mostly-zero full-length normals.
struct Halfspace {
  int offset = 0;
  CVector a;
  Real rhs = 0.0;
};

/// Convex program
///   minimize    x^H Q x + Re{x^H q} + (rho/2) ||x - v||^2
///   subject to  Re{a_i^H x} >= rhs_i                  (halfspaces)
///               |x_j| <= radius_j                     (discs)
/// with Q = sum_k weight_k u_k u_k^H + iso * I, certified PSD by construction.
struct ConeQpProblem {
  int dim = 0;
  std::vector<std::pair<Real, CVector>> quad_factors;  // (weight >= 0, u)
  Real quad_iso = 0.0;                                 // >= 0
  CVector q;           // empty means zero
  Real rho = 0.0;      // proximal weight, >= 0
  CVector v;           // proximal center; empty means origin
  std::vector<Halfspace> halfspaces;
  RVector radii;       // length dim, all > 0

  Real objective(const CVector& x) const;
  /// Largest constraint violation of x, in the constraints' original scale.
  Real violation(const CVector& x) const;
};

struct ConeQpOptions {
  Real eps_feas = 1e-7;
  Real eps_opt = 1e-7;
  int max_iter = 4000;
  Real sigma = 1.0;           // splitting penalty (auto-rescaled)
  bool adaptive_sigma = true;
  int check_interval = 25;
};

enum class QpStatus { kOptimal, kMaxIter, kInfeasibleDetected };

struct QpSolution {
  CVector x;
  Real primal_residual = 0.0;
  Real dual_residual = 0.0;
  Real max_violation = 0.0;
  int iterations = 0;
  QpStatus status = QpStatus::kMaxIter;
  RVector halfspace_multipliers;  // >= 0 up to solver tolerance
};

/// Splitting solver: the smooth prox step is one SPD solve (factorized once),
/// the constraint block is an exact projection onto {s >= rhs} x {discs}.
/// The factorization is tied to (Q, halfspaces, rho, sigma) so a solver
/// instance can be re-solved cheaply with new linear terms and warm state.
class ConeQpSolver {
 public:
  ConeQpSolver(ConeQpProblem problem, ConeQpOptions options = {});

  /// Updates the terms that do not affect the factorization.
  void set_linear(const CVector& q, const CVector& v);
  void warm_start(const CVector& x);
  void reset_duals();

  QpSolution solve();

  const ConeQpProblem& problem() const { return problem_; }

 private:
  void factorize();
  CVector multiply_halfspaces_adjoint(const RVector& w) const;
  RVector halfspace_values(const CVector& x) const;
  Real violation_original(const CVector& x) const;

  ConeQpProblem problem_;
  ConeQpOptions options_;
  int n_ = 0;
  int m_ = 0;
  std::vector<Real> a_norms_;
  Real sigma_ = 1.0;
  Eigen::LLT<RMatrix> llt_;
  // Splitting state (real slacks for halfspaces, complex copy for discs).
  RVector s_, us_;
  CVector d_, ud_, x_;
  bool have_state_ = false;
};

QpSolution solve_cone_qp(const ConeQpProblem& problem, ConeQpOptions options = {});

/// max_delta { delta : Re{a_i^H x} >= delta for all i, |x_j| <= radius }
/// by bisection over feasibility subproblems.  Returns the best feasible
/// point found and the certified level.
struct MaxMinResult {
  CVector x;
  Real delta = 0.0;
  bool feasible = false;
};
MaxMinResult solve_maxmin_margin(const std::vector<Halfspace>& halfspaces, int dim, Real radius,
                                 ConeQpOptions options = {}, Real delta_tol = 1e-6);

}  // namespace ristap
