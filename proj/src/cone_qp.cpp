#include "ristap/cone_qp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ristap {

namespace {

RVector to_real(const CVector& z) {
  const Eigen::Index n = z.size();
  RVector r(2 * n);
  r.head(n) = z.real();
  r.tail(n) = z.imag();
  return r;
}

CVector to_complex(const RVector& r) {
  const Eigen::Index n = r.size() / 2;
  CVector z(n);
  z.real() = r.head(n);
  z.imag() = r.tail(n);
  return z;
}

}  // namespace

Real ConeQpProblem::objective(const CVector& x) const {
  Real val = quad_iso * x.squaredNorm();
  for (const auto& [w, u] : quad_factors) val += w * std::norm(u.dot(x));
  if (q.size() > 0) val += std::real(x.dot(q));
  if (rho > 0.0) {
    if (v.size() > 0) {
      val += 0.5 * rho * (x - v).squaredNorm();
    } else {
      val += 0.5 * rho * x.squaredNorm();
    }
  }
  return val;
}

Real ConeQpProblem::violation(const CVector& x) const {
  Real viol = 0.0;
  for (const auto& h : halfspaces) {
    const Real margin = std::real(h.a.dot(x.segment(h.offset, h.a.size())));
    viol = std::max(viol, h.rhs - margin);
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    viol = std::max(viol, std::abs(x(j)) - radii(j));
  }
  return viol;
}

ConeQpSolver::ConeQpSolver(ConeQpProblem problem, ConeQpOptions options)
    : problem_(std::move(problem)), options_(options), n_(problem_.dim),
      m_(static_cast<int>(problem_.halfspaces.size())), sigma_(options.sigma) {
  if (n_ <= 0) throw std::invalid_argument("ConeQpSolver: empty problem");
  if (problem_.radii.size() != n_) throw std::invalid_argument("ConeQpSolver: radii length mismatch");
  if ((problem_.radii.array() <= 0.0).any()) {
    throw std::invalid_argument("ConeQpSolver: disc radii must be positive");
  }
  if (problem_.rho < 0.0 || problem_.quad_iso < 0.0) {
    throw std::invalid_argument("ConeQpSolver: negative curvature weights");
  }
  for (const auto& [w, u] : problem_.quad_factors) {
    if (w < 0.0) throw std::invalid_argument("ConeQpSolver: negative factor weight");
    if (u.size() != n_) throw std::invalid_argument("ConeQpSolver: factor length mismatch");
  }
  a_norms_.reserve(static_cast<size_t>(m_));
  for (auto& h : problem_.halfspaces) {
    if (h.offset < 0 || h.offset + h.a.size() > n_) {
      throw std::invalid_argument("ConeQpSolver: halfspace support out of range");
    }
    const Real nrm = h.a.norm();
    if (nrm == 0.0) throw std::invalid_argument("ConeQpSolver: zero halfspace normal");
    a_norms_.push_back(nrm);
    h.a /= nrm;
    h.rhs /= nrm;
  }
  // A pure projection still needs a strongly convex smooth part.
  if (problem_.rho == 0.0 && problem_.quad_factors.empty() && problem_.quad_iso == 0.0) {
    problem_.rho = 1.0;
  }
  factorize();
  s_ = RVector::Zero(m_);
  us_ = RVector::Zero(m_);
  d_ = CVector::Zero(n_);
  ud_ = CVector::Zero(n_);
  x_ = CVector::Zero(n_);
}

void ConeQpSolver::factorize() {
  const int n2 = 2 * n_;
  RMatrix h = RMatrix::Zero(n2, n2);
  h.diagonal().array() += 2.0 * problem_.quad_iso + problem_.rho + sigma_;
  for (const auto& [w, u] : problem_.quad_factors) {
    RVector ur(n2), ut(n2);
    ur.head(n_) = u.real();
    ur.tail(n_) = u.imag();
    ut.head(n_) = -u.imag();
    ut.tail(n_) = u.real();
    h.noalias() += (2.0 * w) * (ur * ur.transpose());
    h.noalias() += (2.0 * w) * (ut * ut.transpose());
  }
  for (const auto& hs : problem_.halfspaces) {
    const Eigen::Index len = hs.a.size();
    RVector ar(2 * len);
    ar.head(len) = hs.a.real();
    ar.tail(len) = hs.a.imag();
    // Support of a_i in real coordinates: [off, off+len) and [n+off, n+off+len).
    std::vector<Eigen::Index> idx(static_cast<size_t>(2 * len));
    for (Eigen::Index t = 0; t < len; ++t) {
      idx[static_cast<size_t>(t)] = hs.offset + t;
      idx[static_cast<size_t>(len + t)] = n_ + hs.offset + t;
    }
    for (Eigen::Index ai = 0; ai < 2 * len; ++ai) {
      for (Eigen::Index bi = 0; bi < 2 * len; ++bi) {
        h(idx[static_cast<size_t>(ai)], idx[static_cast<size_t>(bi)]) += sigma_ * ar(ai) * ar(bi);
      }
    }
  }
  llt_.compute(h);
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error("ConeQpSolver: factorization failed");
  }
}

void ConeQpSolver::set_linear(const CVector& q, const CVector& v) {
  if (q.size() > 0 && q.size() != n_) throw std::invalid_argument("set_linear: bad q length");
  if (v.size() > 0 && v.size() != n_) throw std::invalid_argument("set_linear: bad v length");
  problem_.q = q;
  problem_.v = v;
}

void ConeQpSolver::warm_start(const CVector& x) {
  if (x.size() != n_) throw std::invalid_argument("warm_start: bad length");
  x_ = x;
  d_ = x;
  s_ = halfspace_values(x);
  have_state_ = true;
}

void ConeQpSolver::reset_duals() {
  us_.setZero();
  ud_.setZero();
}

RVector ConeQpSolver::halfspace_values(const CVector& x) const {
  RVector t(m_);
  for (int i = 0; i < m_; ++i) {
    const auto& h = problem_.halfspaces[static_cast<size_t>(i)];
    t(i) = std::real(h.a.dot(x.segment(h.offset, h.a.size())));
  }
  return t;
}

// The stored halfspaces are normalized; violations are reported back in the
// caller's original constraint scale.
Real ConeQpSolver::violation_original(const CVector& x) const {
  Real viol = 0.0;
  for (int i = 0; i < m_; ++i) {
    const auto& h = problem_.halfspaces[static_cast<size_t>(i)];
    const Real margin = std::real(h.a.dot(x.segment(h.offset, h.a.size())));
    viol = std::max(viol, (h.rhs - margin) * a_norms_[static_cast<size_t>(i)]);
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    viol = std::max(viol, std::abs(x(j)) - problem_.radii(j));
  }
  return viol;
}

CVector ConeQpSolver::multiply_halfspaces_adjoint(const RVector& w) const {
  CVector out = CVector::Zero(n_);
  for (int i = 0; i < m_; ++i) {
    const auto& h = problem_.halfspaces[static_cast<size_t>(i)];
    out.segment(h.offset, h.a.size()) += w(i) * h.a;
  }
  return out;
}

QpSolution ConeQpSolver::solve() {
  const int n2 = 2 * n_;
  RVector qr = RVector::Zero(n2);
  if (problem_.q.size() > 0) qr = to_real(problem_.q);
  RVector vr = RVector::Zero(n2);
  if (problem_.v.size() > 0) vr = to_real(problem_.v);

  if (!have_state_) {
    x_.setZero();
    d_.setZero();
    s_ = halfspace_values(x_);
  }

  QpSolution sol;
  Real best_viol = std::numeric_limits<Real>::infinity();
  Real stall_ref = best_viol;
  int stall_count = 0;
  int it = 0;

  for (it = 1; it <= options_.max_iter; ++it) {
    // Prox step: SPD solve against the current slack targets.
    RVector rhs = -qr + problem_.rho * vr;
    rhs += to_real(sigma_ * (d_ - ud_));
    rhs += to_real(multiply_halfspaces_adjoint(sigma_ * (s_ - us_)));
    const RVector xr = llt_.solve(rhs);
    x_ = to_complex(xr);

    const RVector t = halfspace_values(x_);
    const RVector s_prev = s_;
    const CVector d_prev = d_;
    for (int i = 0; i < m_; ++i) {
      s_(i) = std::max(t(i) + us_(i), problem_.halfspaces[static_cast<size_t>(i)].rhs);
    }
    for (int j = 0; j < n_; ++j) {
      const Complex z = x_(j) + ud_(j);
      const Real mag = std::abs(z);
      const Real b = problem_.radii(j);
      d_(j) = mag > b ? z * (b / mag) : z;
    }
    us_ += t - s_;
    ud_ += x_ - d_;

    if (it % options_.check_interval == 0 || it == options_.max_iter) {
      const Real rp = std::max((t - s_).lpNorm<Eigen::Infinity>(),
                               (x_ - d_).lpNorm<Eigen::Infinity>());
      const Real rd =
          sigma_ * std::max(multiply_halfspaces_adjoint(s_ - s_prev).lpNorm<Eigen::Infinity>(),
                            (d_ - d_prev).lpNorm<Eigen::Infinity>());
      const Real viol = violation_original(x_);
      best_viol = std::min(best_viol, viol);

      const Real scale = std::max({Real(1.0), x_.lpNorm<Eigen::Infinity>(),
                                   s_.size() > 0 ? s_.lpNorm<Eigen::Infinity>() : Real(0.0)});
      if (rp <= options_.eps_opt * scale && rd <= options_.eps_opt * scale &&
          viol <= options_.eps_feas * scale) {
        sol.status = QpStatus::kOptimal;
        sol.primal_residual = rp;
        sol.dual_residual = rd;
        break;
      }
      // Penalty rebalancing keeps the two residuals comparable.
      if (options_.adaptive_sigma && it % (options_.check_interval * 8) == 0 && rd > 0.0 && rp > 0.0) {
        const Real ratio = rp / rd;
        if (ratio > 10.0 || ratio < 0.1) {
          sigma_ *= std::clamp(std::sqrt(ratio), Real(0.2), Real(5.0));
          factorize();
          // Rescale duals so sigma*u stays the running multiplier estimate.
          us_ /= std::clamp(std::sqrt(ratio), Real(0.2), Real(5.0));
          ud_ /= std::clamp(std::sqrt(ratio), Real(0.2), Real(5.0));
        }
      }
      // Infeasibility: the violation stops improving well above tolerance.
      if (viol > 100.0 * options_.eps_feas * scale) {
        if (viol > 0.999 * stall_ref) {
          if (++stall_count >= 12 && it > 300) {
            sol.status = QpStatus::kInfeasibleDetected;
            sol.primal_residual = rp;
            sol.dual_residual = rd;
            break;
          }
        } else {
          stall_count = 0;
        }
        stall_ref = viol;
      } else {
        stall_count = 0;
      }
      sol.primal_residual = rp;
      sol.dual_residual = rd;
    }
  }

  have_state_ = true;
  sol.x = x_;
  sol.iterations = std::min(it, options_.max_iter);
  sol.max_violation = violation_original(x_);
  sol.halfspace_multipliers.resize(m_);
  for (int i = 0; i < m_; ++i) {
    sol.halfspace_multipliers(i) = -sigma_ * us_(i) / a_norms_[static_cast<size_t>(i)];
  }
  return sol;
}

QpSolution solve_cone_qp(const ConeQpProblem& problem, ConeQpOptions options) {
  ConeQpSolver solver(problem, options);
  return solver.solve();
}

MaxMinResult solve_maxmin_margin(const std::vector<Halfspace>& halfspaces, int dim, Real radius,
                                 ConeQpOptions options, Real delta_tol) {
  if (halfspaces.empty()) throw std::invalid_argument("solve_maxmin_margin: no constraints");
  ConeQpProblem base;
  base.dim = dim;
  base.rho = 1.0;
  base.radii = RVector::Constant(dim, radius);
  base.halfspaces = halfspaces;

  // delta = 0 is always feasible (the origin); the disc budget caps it above.
  Real lo = 0.0;
  Real hi = std::numeric_limits<Real>::infinity();
  for (const auto& h : halfspaces) {
    hi = std::min(hi, radius * h.a.cwiseAbs().sum());
  }
  hi = std::max(hi, delta_tol);

  MaxMinResult result;
  result.x = CVector::Zero(dim);
  result.delta = 0.0;
  result.feasible = true;

  CVector warm = CVector::Zero(dim);
  const int max_bisect = 60;
  for (int step = 0; step < max_bisect && (hi - lo) > delta_tol * std::max(Real(1.0), hi); ++step) {
    const Real mid = 0.5 * (lo + hi);
    ConeQpProblem p = base;
    for (auto& h : p.halfspaces) h.rhs = mid;
    p.v = warm;
    ConeQpSolver solver(p, options);
    solver.warm_start(warm);
    const QpSolution sol = solver.solve();
    const Real scale = std::max(Real(1.0), sol.x.lpNorm<Eigen::Infinity>());
    if (sol.status == QpStatus::kOptimal && sol.max_violation <= 10.0 * options.eps_feas * scale) {
      lo = mid;
      warm = sol.x;
      result.x = sol.x;
      result.delta = mid;
    } else {
      hi = mid;
    }
  }
  return result;
}

}  // namespace ristap
