#pragma once

// Reference implementations used to verify the production paths.  Everything
// here favors directness over speed: explicit Kronecker assembly, grid and
// projected-gradient searches.  Production code never calls these; tests and
// the `oracle` CLI subcommand do.

#include <vector>

#include "ristap/cone_qp.hpp"
#include "ristap/scenario.hpp"
#include "ristap/stap_model.hpp"

namespace ristap::oracles {

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Explicit stacked operator sum_path D (x) J^T (x) H(phi), materialized.
CMatrix dense_target_operator(const StackedModel& model, const CVector& phi);
CMatrix dense_clutter_operator(const StackedModel& model, const CVector& phi);

/// Straight-line round-trip delay table recomputed from raw positions.
struct GeometricPath {
  int clutter = -1;
  int ris = -1;
  int kind = 0;
  Real length_m = 0.0;
  int tau = 0;
  Real doppler = 0.0;
};
std::vector<GeometricPath> geometric_paths(const ScenarioConfig& config);

/// Per-coordinate phase-grid minimizer of ||x - psi + lambda/rho||^2 over
/// |psi_j| = amplitude, `grid_points` phases per coordinate.
CVector psi_grid_search(const CVector& x, const CVector& lambda, Real rho, Real amplitude,
                        int grid_points);

/// Projected-gradient reference for the cone QP, run to high accuracy; the
/// feasible-set projection is cyclic Dykstra over halfspaces and discs.
CVector projected_gradient_qp(const ConeQpProblem& problem, int outer_iters, int dykstra_iters);

/// Exhaustive grid search for the max-min margin problem on tiny instances
/// (dim complex coordinates discretized in phase and magnitude).
struct GridMaxMin {
  CVector x;
  Real delta = 0.0;
};
GridMaxMin maxmin_grid_search(const std::vector<Halfspace>& halfspaces, int dim, Real radius,
                              int phase_steps, int mag_steps);

}  // namespace ristap::oracles
