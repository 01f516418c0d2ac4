#include "ristap/init.hpp"

#include <algorithm>

namespace ristap {

namespace {

struct PhaseObjective {
  CMatrix b_t;               // (R*Nr) x N stacked target factors
  std::vector<CMatrix> b_q;  // per clutter, stacked
  CVector a_t;
  std::vector<CVector> a_q;

  Real value(const CVector& beta) const {
    Real v = (a_t + b_t.transpose() * beta).squaredNorm();
    for (size_t q = 0; q < b_q.size(); ++q) {
      v -= (a_q[q] + b_q[q].transpose() * beta).squaredNorm();
    }
    return v;
  }

  CVector gradient(const CVector& beta) const {
    CVector g = b_t.conjugate() * (a_t + b_t.transpose() * beta);
    for (size_t q = 0; q < b_q.size(); ++q) {
      g -= b_q[q].conjugate() * (a_q[q] + b_q[q].transpose() * beta);
    }
    return g;
  }
};

CVector tangent_project(const CVector& g, const CVector& beta) {
  CVector t(g.size());
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    t(j) = g(j) - std::real(g(j) * std::conj(beta(j))) * beta(j);
  }
  return t;
}

CVector retract(const CVector& beta, const CVector& step) {
  CVector out = beta + step;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    const Real mag = std::abs(out(j));
    out(j) = mag > 0.0 ? out(j) / mag : Complex(1.0, 0.0);
  }
  return out;
}

}  // namespace

RcgResult rcg_phase_init(const StackedModel& model, const RcgOptions& options) {
  const int n = model.phi_dim();
  PhaseObjective obj;
  obj.a_t = model.bs_steering_target();
  obj.b_t = CMatrix::Zero(n, model.n_tx());
  for (int r = 0; r < model.n_ris(); ++r) {
    obj.b_t.middleRows(static_cast<Eigen::Index>(r) * model.n_ris_elements(),
                       model.n_ris_elements()) = model.b_target(r);
  }
  const int n_clutter = static_cast<int>(model.clutter_paths().size()) == 0
                            ? 0
                            : model.clutter_paths().back().clutter + 1;
  for (int q = 0; q < n_clutter; ++q) {
    obj.a_q.push_back(model.bs_steering_clutter(q));
    CMatrix bq = CMatrix::Zero(n, model.n_tx());
    for (int r = 0; r < model.n_ris(); ++r) {
      bq.middleRows(static_cast<Eigen::Index>(r) * model.n_ris_elements(),
                    model.n_ris_elements()) = model.b_clutter(q, r);
    }
    obj.b_q.push_back(std::move(bq));
  }

  RcgResult result;
  CVector beta = CVector::Constant(n, Complex(1.0, 0.0));
  Real value = obj.value(beta);
  result.trace.push_back(value);

  CVector t_prev, dir;
  Real step = options.initial_step;
  const Real grad_scale = std::max(obj.gradient(beta).norm(), Real(1.0));

  for (int it = 0; it < options.max_iter; ++it) {
    const CVector grad = obj.gradient(beta);
    const CVector t = tangent_project(grad, beta);
    if (t.norm() <= options.grad_tol * grad_scale) break;

    Real pr = 0.0;
    if (it > 0 && t_prev.size() == t.size()) {
      const Real denom = t_prev.squaredNorm();
      if (denom > 0.0) pr = std::max(Real(0.0), std::real(t_prev.dot(t - t_prev)) / denom);
    }
    if (dir.size() != t.size()) dir = t;
    dir = t + pr * dir;
    Real slope = std::real(dir.dot(t));
    if (slope <= 0.0) {  // restart on non-ascent direction
      dir = t;
      slope = t.squaredNorm();
    }

    // Armijo backtracking on the retraction.
    Real alpha = step;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      const CVector cand = retract(beta, alpha * dir);
      const Real cand_value = obj.value(cand);
      if (cand_value >= value + options.armijo_c * alpha * slope) {
        beta = cand;
        value = cand_value;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    result.iterations = it + 1;
    if (!accepted) break;
    step = std::min(alpha * 2.0, Real(1e6));
    t_prev = t;
    result.trace.push_back(value);
  }

  result.beta = beta;
  result.objective = value;
  return result;
}

CVector initial_phi(const StackedModel& model, Real a_max, const RcgOptions& options) {
  if (model.phi_dim() == 0) return CVector();
  return a_max * rcg_phase_init(model, options).beta;
}

InitXResult init_x(const CiConstraintSet& ci, const CVector& phi0, Real amplitude,
                   const ConeQpOptions& qp_options) {
  const auto halfspaces_src = ci.x_halfspaces(phi0);
  std::vector<Halfspace> halfspaces;
  halfspaces.reserve(halfspaces_src.size());
  Real gamma_max = 0.0;
  for (const auto& h : halfspaces_src) {
    halfspaces.push_back({h.offset, h.a, h.gamma});
    gamma_max = std::max(gamma_max, h.gamma);
  }
  const int dim = ci.slots() * ci.channels().n_tx;
  const MaxMinResult mm = solve_maxmin_margin(halfspaces, dim, amplitude, qp_options);
  InitXResult out;
  out.x = mm.x;
  out.delta = mm.delta;
  out.feasible = mm.delta >= gamma_max - 1e-9;
  return out;
}

}  // namespace ristap
