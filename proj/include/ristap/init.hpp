#pragma once

#include "ristap/comm_ci.hpp"
#include "ristap/cone_qp.hpp"
#include "ristap/stap_model.hpp"

namespace ristap {

struct RcgOptions {
  int max_iter = 500;
  Real grad_tol = 1e-8;
  Real armijo_c = 1e-4;
  Real initial_step = 1.0;
};

struct RcgResult {
  CVector beta;       // unit-modulus phases
  Real objective = 0.0;
  int iterations = 0;
  std::vector<Real> trace;  // objective per accepted iterate
};

/// Phase-only reflection initialization: ascends
///   g(beta) = ||a(theta_t)^T + sum_r beta_r^T B_{t,r}||^2
///           - sum_q ||a(theta_q)^T + sum_r beta_r^T B_{q,r}||^2
/// over unit-modulus beta by conjugate gradient on the phase torus
/// (componentwise tangent projection, normalize retraction, Polak-Ribiere
/// direction with restart, Armijo backtracking).
RcgResult rcg_phase_init(const StackedModel& model, const RcgOptions& options = {});

/// phi0 = a_max * beta.
CVector initial_phi(const StackedModel& model, Real a_max, const RcgOptions& options = {});

struct InitXResult {
  CVector x;
  Real delta = 0.0;      // achieved worst-case margin level
  bool feasible = false; // delta covers the largest QoS threshold
};

/// Waveform initialization: maximize the worst-case QoS margin under the
/// relaxed amplitude discs, at the fixed initial reflections.
InitXResult init_x(const CiConstraintSet& ci, const CVector& phi0, Real amplitude,
                   const ConeQpOptions& qp_options = {});

}  // namespace ristap
