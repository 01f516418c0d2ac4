#include "ristap/waveform_opt.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace ristap {

Real WaveformSurrogate::f1(const CVector& x) const {
  return eta * std::norm(a_c.dot(x)) - std::norm(a_t.dot(x)) + c1;
}

Real WaveformSurrogate::surrogate(const CVector& x) const {
  return eta * std::norm(a_c.dot(x)) - 2.0 * std::real(x.dot(a_t) * at_dot_anchor) + c3 + c1;
}

WaveformSurrogate waveform_surrogate(const StackedModel& model, const CVector& x_anchor,
                                     const CVector& w, const CVector& phi, Real eta,
                                     Real sigma_r2) {
  WaveformSurrogate s;
  s.a_t = model.adjoint_target(w, phi);
  s.a_c = model.adjoint_clutter(w, phi);
  s.eta = eta;
  s.c1 = eta * sigma_r2 * w.squaredNorm();
  s.anchor = x_anchor;
  s.at_dot_anchor = s.a_t.dot(x_anchor);
  s.c3 = std::norm(s.at_dot_anchor);
  // Normalize so the quadratic's Hessian stays well below the unit splitting
  // penalty; the modulus-sphere consensus loop needs the penalty to dominate.
  const Real curvature = std::max(eta * s.a_c.squaredNorm(), s.a_t.squaredNorm());
  s.scale = curvature > 0.0 ? 1.0 / (6.0 * curvature) : 1.0;
  return s;
}

AdmmState AdmmState::initialize(const CVector& x0, Real amplitude) {
  AdmmState st;
  st.x = x0;
  st.psi = psi_update(x0, CVector::Zero(x0.size()), 1.0, amplitude);
  st.lambda = CVector::Zero(x0.size());
  return st;
}

CVector psi_update(const CVector& x, const CVector& lambda, Real rho, Real amplitude) {
  if (rho <= 0.0) throw std::invalid_argument("psi_update: rho must be positive");
  CVector psi(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const Complex z = rho * x(j) + lambda(j);
    const Real mag = std::abs(z);
    psi(j) = mag > 0.0 ? amplitude * (z / mag) : Complex(amplitude, 0.0);
  }
  return psi;
}

CVector dual_update(const CVector& lambda, const CVector& x, const CVector& psi, Real rho) {
  return lambda + rho * (x - psi);
}

CVector sphere_margin_ascent(const CVector& x_in, const std::vector<Halfspace>& halfspaces,
                             Real amplitude, int sweeps) {
  CVector x = psi_update(x_in, CVector::Zero(x_in.size()), 1.0, amplitude);
  // Group the constraints by their support block; the margin program then
  // separates across blocks and each one is a small phase optimization,
  // attacked by coordinate sweeps from several deterministic starts.
  std::map<int, std::vector<const Halfspace*>> groups;
  for (const auto& h : halfspaces) groups[h.offset].push_back(&h);
  constexpr int kGrid = 96;
  constexpr int kStarts = 8;
  for (auto& [offset, group] : groups) {
    const Eigen::Index len = group.front()->a.size();
    auto block = x.segment(offset, len);
    auto margin_of = [&](const CVector& cand) {
      Real worst = std::numeric_limits<Real>::infinity();
      for (const auto* h : group) {
        worst = std::min(worst, std::real(h->a.dot(cand)) - h->rhs);
      }
      return worst;
    };
    auto polish = [&](CVector cand) {
      for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool moved = false;
        for (Eigen::Index n = 0; n < len; ++n) {
          Real best = margin_of(cand);
          Complex best_val = cand(n);
          for (int g = 0; g < kGrid; ++g) {
            const Real th = 2.0 * kPi * g / kGrid;
            cand(n) = amplitude * Complex(std::cos(th), std::sin(th));
            const Real m = margin_of(cand);
            if (m > best) {
              best = m;
              best_val = cand(n);
              moved = true;
            }
          }
          cand(n) = best_val;
        }
        if (!moved) break;
      }
      return cand;
    };

    CVector best = polish(block);
    Real best_margin = margin_of(best);
    Rng restart_rng(0x5eedULL + static_cast<std::uint64_t>(offset));
    for (int s = 1; s < kStarts; ++s) {
      CVector start(len);
      for (Eigen::Index n = 0; n < len; ++n) start(n) = amplitude * restart_rng.phase();
      const CVector cand = polish(start);
      const Real m = margin_of(cand);
      if (m > best_margin) {
        best_margin = m;
        best = cand;
      }
    }
    block = best;
  }
  return x;
}

CVector restore_modulus_margins(const CVector& x_in, const std::vector<Halfspace>& halfspaces,
                                Real amplitude, Real margin_tol, int sweeps) {
  const CVector zero = CVector::Zero(x_in.size());
  CVector x = psi_update(x_in, zero, 1.0, amplitude);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool violated = false;
    for (const auto& h : halfspaces) {
      auto seg = x.segment(h.offset, h.a.size());
      const Real deficit = h.rhs + 0.1 * margin_tol - std::real(h.a.dot(seg));
      if (deficit > 0.0) {
        seg += (deficit / h.a.squaredNorm()) * h.a;
        violated = true;
      }
    }
    x = psi_update(x, zero, 1.0, amplitude);
    if (!violated) break;
  }
  return x;
}

QpSolution admm_x_update(ConeQpSolver& solver, const WaveformSurrogate& surrogate,
                         const AdmmState& state) {
  const CVector q = (-2.0 * surrogate.scale * surrogate.at_dot_anchor) * surrogate.a_t;
  const CVector v = state.psi - state.lambda / state.rho;
  solver.set_linear(q, v);
  solver.warm_start(state.x);
  return solver.solve();
}

namespace {

Real augmented_lagrangian(const WaveformSurrogate& s, const AdmmState& st) {
  const Real obj = s.scale * (s.eta * std::norm(s.a_c.dot(st.x)) -
                              2.0 * std::real(st.x.dot(s.a_t) * s.at_dot_anchor));
  return obj + 0.5 * st.rho * (st.x - st.psi + st.lambda / st.rho).squaredNorm();
}

}  // namespace

WaveformRoundResult run_waveform_round(const WaveformSurrogate& surrogate,
                                       const std::vector<Halfspace>& ci_halfspaces,
                                       Real amplitude, AdmmState& state,
                                       const WaveformAdmmOptions& options) {
  const Eigen::Index n = surrogate.anchor.size();
  if (state.x.size() != n) throw std::invalid_argument("run_waveform_round: state size mismatch");

  // Bring the carried dual into this surrogate's normalization.
  if (state.scale != surrogate.scale && state.scale > 0.0) {
    state.lambda *= surrogate.scale / state.scale;
  }
  state.scale = surrogate.scale;
  state.rho = options.rho;

  WaveformRoundResult result;
  auto make_solver = [&](Real rho) {
    ConeQpProblem p;
    p.dim = static_cast<int>(n);
    p.quad_factors.push_back({surrogate.scale * surrogate.eta, surrogate.a_c});
    p.rho = rho;
    p.radii = RVector::Constant(n, amplitude);
    p.halfspaces = ci_halfspaces;
    return ConeQpSolver(p, options.qp);
  };
  auto run_consensus = [&](Real rho) {
    state.rho = rho;
    auto solver = make_solver(rho);
    CVector psi_prev = state.psi;
    for (int it = 1; it <= options.max_iter; ++it) {
      const QpSolution sol = admm_x_update(solver, surrogate, state);
      if (sol.status == QpStatus::kInfeasibleDetected) {
        result.status = WaveformStatus::kInfeasible;
        return;
      }
      state.x = sol.x;
      psi_prev = state.psi;
      state.psi = psi_update(state.x, state.lambda, state.rho, amplitude);
      state.lambda = dual_update(state.lambda, state.x, state.psi, state.rho);
      result.admm_iterations += 1;
      result.al_trace.push_back(augmented_lagrangian(surrogate, state));
      result.final_consensus = (state.x - state.psi).lpNorm<Eigen::Infinity>();
      if (result.final_consensus <= options.consensus_tol) {
        result.status = WaveformStatus::kConverged;
        return;
      }
      if (options.adaptive_rho && it % 10 == 0) {
        const Real rp = result.final_consensus;
        const Real rd = state.rho * (state.psi - psi_prev).lpNorm<Eigen::Infinity>();
        Real next_rho = state.rho;
        if (rd > 0.0 && rp / rd > 10.0) next_rho *= 2.0;
        if (rp > 0.0 && rd / rp > 10.0) next_rho *= 0.5;
        if (next_rho != state.rho) {
          // The prox weight is baked into the factorization.
          state.rho = next_rho;
          solver = make_solver(next_rho);
        }
      }
    }
    result.status = WaveformStatus::kMaxIter;
  };

  run_consensus(options.rho);
  if (result.status == WaveformStatus::kInfeasible) {
    result.x = state.x;
    return result;
  }

  auto min_margin_at = [&](const CVector& x) {
    Real worst = std::numeric_limits<Real>::infinity();
    for (const auto& h : ci_halfspaces) {
      const Real margin = std::real(h.a.dot(x.segment(h.offset, h.a.size()))) - h.rhs;
      worst = std::min(worst, margin);
    }
    return ci_halfspaces.empty() ? Real(0.0) : worst;
  };

  auto repair = [&](const CVector& x) {
    return restore_modulus_margins(x, ci_halfspaces, amplitude, options.margin_restore_tol);
  };

  // Snap to the modulus sphere; repair and retry with a doubled penalty if
  // that broke QoS.
  result.x = state.psi;
  result.min_ci_margin = min_margin_at(result.x);
  if (result.min_ci_margin < -options.margin_restore_tol) {
    const CVector repaired = repair(result.x);
    const Real repaired_margin = min_margin_at(repaired);
    if (repaired_margin >= -options.margin_restore_tol) {
      result.x = repaired;
      result.min_ci_margin = repaired_margin;
      return result;
    }
    run_consensus(2.0 * options.rho);
    if (result.status != WaveformStatus::kInfeasible) {
      result.x = state.psi;
      result.min_ci_margin = min_margin_at(result.x);
      if (result.min_ci_margin < -options.margin_restore_tol) {
        const CVector second = repair(result.x);
        if (min_margin_at(second) >= -options.margin_restore_tol) {
          result.x = second;
          result.min_ci_margin = min_margin_at(second);
        } else {
          const CVector third = sphere_margin_ascent(result.x, ci_halfspaces, amplitude);
          if (min_margin_at(third) > result.min_ci_margin) {
            result.x = third;
            result.min_ci_margin = min_margin_at(third);
          }
        }
      }
    }
  }
  return result;
}

}  // namespace ristap
