#include "ristap/ris_opt.hpp"

#include <stdexcept>

namespace ristap {

CVector lift_phi(const CVector& phi, int n_ris, int nr) {
  CVector out(static_cast<Eigen::Index>(n_ris) * nr * nr);
  for (int r = 0; r < n_ris; ++r) {
    const auto pr = phi.segment(static_cast<Eigen::Index>(r) * nr, nr);
    auto block = out.segment(static_cast<Eigen::Index>(r) * nr * nr, nr * nr);
    for (int i = 0; i < nr; ++i) block.segment(static_cast<Eigen::Index>(i) * nr, nr) = pr(i) * pr;
  }
  return out;
}

FMatrices build_F_matrices(const StackedModel& model, const CVector& x) {
  const int N = model.n_tx();
  const int M = model.n_pulses();
  const int L = model.n_slots();
  const int P = model.snapshots();
  const int R = model.n_ris();
  const int Nr = model.n_ris_elements();
  const Eigen::Index nmp = model.filter_dim();
  if (x.size() != model.waveform_dim()) throw std::invalid_argument("build_F_matrices: bad x");

  FMatrices f;
  f.Ft = CMatrix::Zero(nmp, static_cast<Eigen::Index>(R) * Nr);
  f.Ftil = CMatrix::Zero(nmp, static_cast<Eigen::Index>(R) * Nr * Nr);
  f.Fc = CMatrix::Zero(nmp, static_cast<Eigen::Index>(R) * Nr);
  f.Fctil = CMatrix::Zero(nmp, static_cast<Eigen::Index>(R) * Nr * Nr);

  const Eigen::Map<const CMatrix> X(x.data(), N, static_cast<Eigen::Index>(M) * L);

  // Embeds pulse rows of `cols` (M*L x C) at the path's fast-time offset with
  // its slow-time phase ramp: result is (D (x) J^T) X^T S for S = cols source.
  auto embed = [&](const CMatrix& src, int tau_rel, Real doppler) {
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(M) * P, src.cols());
    const CVector phases = doppler_phases(doppler, M, model.pri());
    for (int m = 0; m < M; ++m) {
      out.middleRows(static_cast<Eigen::Index>(m) * P + tau_rel, L) =
          phases(m) * src.middleRows(static_cast<Eigen::Index>(m) * L, L);
    }
    return out;
  };

  auto add_paths = [&](const std::vector<StackedModel::Path>& paths, CMatrix& F, CMatrix& Ftil) {
    for (const auto& path : paths) {
      if (path.kind == 0) continue;
      const int r = path.ris;
      const CVector& a = path.clutter < 0 ? model.bs_steering_target()
                                          : model.bs_steering_clutter(path.clutter);
      const CMatrix& B = path.clutter < 0 ? model.b_target(r)
                                          : model.b_clutter(path.clutter, r);
      const CMatrix Bt = B.transpose();  // N x Nr
      switch (path.kind) {
        case 1: {
          // [(D (x) J^T) X^T a] (x) B^T
          const CMatrix u = embed(X.transpose() * a, path.tau_rel, path.doppler);  // MP x 1
          for (Eigen::Index mp = 0; mp < u.rows(); ++mp) {
            F.block(mp * N, static_cast<Eigen::Index>(r) * Nr, N, Nr).noalias() +=
                (path.alpha * u(mp, 0)) * Bt;
          }
          break;
        }
        case 2: {
          // [(D (x) J^T) X^T B^T] (x) a
          const CMatrix v = embed(X.transpose() * Bt, path.tau_rel, path.doppler);  // MP x Nr
          for (Eigen::Index mp = 0; mp < v.rows(); ++mp) {
            F.block(mp * N, static_cast<Eigen::Index>(r) * Nr, N, Nr).noalias() +=
                path.alpha * a * v.row(mp);
          }
          break;
        }
        default: {
          // [(D (x) J^T) X^T B^T] (x) B^T acting on phi_r (x) phi_r
          const CMatrix v = embed(X.transpose() * Bt, path.tau_rel, path.doppler);  // MP x Nr
          for (Eigen::Index mp = 0; mp < v.rows(); ++mp) {
            for (int c = 0; c < Nr; ++c) {
              Ftil.block(mp * N, (static_cast<Eigen::Index>(r) * Nr + c) * Nr, N, Nr).noalias() +=
                  (path.alpha * v(mp, c)) * Bt;
            }
          }
          break;
        }
      }
    }
  };

  add_paths(model.target_paths(), f.Ft, f.Ftil);
  add_paths(model.clutter_paths(), f.Fc, f.Fctil);
  return f;
}

Real RisTerms::f2(const CVector& phi) const {
  const CVector lift = lift_phi(phi, n_ris, nr);
  const Complex yt = s_t + vt.dot(phi) + vtt.dot(lift);
  const Complex yc = s_c + vc.dot(phi) + vct.dot(lift);
  return eta * std::norm(yc) - std::norm(yt);
}

CVector RisTerms::apply_Cq(const CVector& lift) const {
  return eta * vct * vct.dot(lift) - vtt * vtt.dot(lift);
}

CVector RisTerms::apply_Cbar(const CVector& phi) const {
  return 2.0 * eta * vct * vc.dot(phi) - 2.0 * vtt * vt.dot(phi);
}

CVector RisTerms::apply_Cbar_adj(const CVector& lift) const {
  return 2.0 * eta * vc * vct.dot(lift) - 2.0 * vt * vtt.dot(lift);
}

CVector RisTerms::c_lin() const { return 2.0 * eta * s_c * vc - 2.0 * s_t * vt; }

CVector RisTerms::ctil_lin() const { return 2.0 * eta * s_c * vct - 2.0 * s_t * vtt; }

RisTerms assemble_f2_terms(const FMatrices& f, const StackedModel& model, const CVector& w,
                           const CVector& x, Real eta, Real /*sigma_r2*/) {
  RisTerms t;
  t.n_ris = model.n_ris();
  t.nr = model.n_ris_elements();
  t.eta = eta;
  t.vt = f.Ft.adjoint() * w;
  t.vc = f.Fc.adjoint() * w;
  t.vtt = f.Ftil.adjoint() * w;
  t.vct = f.Fctil.adjoint() * w;
  t.s_t = w.dot(model.apply_target_direct(x));
  t.s_c = w.dot(model.apply_clutter_direct(x));
  t.c2 = eta * std::norm(t.s_c) - std::norm(t.s_t);
  return t;
}

namespace {

/// vec^{-1} contraction used by the lifted algebra: given y (length Nr^2) and
/// its matrix form Y with vec{Y} = y, returns (Y + Y^T) conj(p), which equals
/// Xi(p)^H y for Xi(p) = I (x) p + p (x) I.
CVector xi_adjoint_block(const CVector& y, const CVector& p) {
  const int nr = static_cast<int>(p.size());
  const Eigen::Map<const CMatrix> Y(y.data(), nr, nr);
  return (Y + Y.transpose()) * p.conjugate();
}

CVector xi_adjoint(const CVector& y, const CVector& phi, int n_ris, int nr) {
  CVector out(static_cast<Eigen::Index>(n_ris) * nr);
  for (int r = 0; r < n_ris; ++r) {
    out.segment(static_cast<Eigen::Index>(r) * nr, nr) = xi_adjoint_block(
        y.segment(static_cast<Eigen::Index>(r) * nr * nr, nr * nr),
        phi.segment(static_cast<Eigen::Index>(r) * nr, nr));
  }
  return out;
}

Real sym_lambda_max(const RMatrix& s) {
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(s, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

Real herm_lambda_max(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

/// Real block form of the block-diagonal reshape of ell: the quadratic
/// Re{phi^H L conj(phi)} equals [Re phi; Im phi]^T Lbar [Re phi; Im phi].
RMatrix build_lbar(const CVector& ell, int n_ris, int nr) {
  const int n = n_ris * nr;
  RMatrix lr = RMatrix::Zero(n, n), li = RMatrix::Zero(n, n);
  for (int r = 0; r < n_ris; ++r) {
    const Eigen::Map<const CMatrix> Lr(ell.data() + static_cast<Eigen::Index>(r) * nr * nr, nr, nr);
    lr.block(r * nr, r * nr, nr, nr) = Lr.real();
    li.block(r * nr, r * nr, nr, nr) = Lr.imag();
  }
  RMatrix lbar(2 * n, 2 * n);
  lbar.topLeftCorner(n, n) = lr;
  lbar.topRightCorner(n, n) = li;
  lbar.bottomLeftCorner(n, n) = li;
  lbar.bottomRightCorner(n, n) = -lr;
  return lbar;
}

}  // namespace

CurvatureBounds curvature_bounds(const RisTerms& terms, const CVector& anchor, Real a_max) {
  constexpr Real kInflate = 1.01;
  const int R = terms.n_ris;
  const int Nr = terms.nr;
  const int n = R * Nr;
  CurvatureBounds b;

  // The lifted quadratic Ctil is a difference of two PSD rank-one terms; the
  // positive part's sole nonzero eigenvalue upper-bounds lambda_max exactly.
  b.lambda1 = terms.eta * terms.vct.squaredNorm();
  b.lambda_lift = 8.0 * b.lambda1 * static_cast<Real>(Nr) * a_max * a_max * kInflate;

  // lambda2: exact symmetric eigensolve on the (small) real block form.
  const CVector anchor_lift = lift_phi(anchor, R, Nr);
  const CVector ell = 2.0 * terms.apply_Cq(anchor_lift) + terms.ctil_lin();
  const RMatrix lbar = build_lbar(ell, R, Nr);
  b.lambda2 = std::max(sym_lambda_max(lbar + lbar.transpose()), Real(0.0)) * kInflate;

  // lambda3 must dominate the cubic's full second-order remainder over the
  // amplitude discs, not just the anchor Hessian: anchor Hessian + lifted
  // bilinear part + third-order term bounded through the set diameter.
  const CVector cb_phi = terms.apply_Cbar(anchor);          // Cbar * anchor
  const CVector p1 = xi_adjoint(2.0 * terms.eta * terms.vct, anchor, R, Nr);
  const CVector p2 = xi_adjoint(2.0 * terms.vtt, anchor, R, Nr);
  CMatrix cross = CMatrix::Zero(n, n);
  cross.noalias() += p1 * terms.vc.adjoint();
  cross.noalias() -= p2 * terms.vt.adjoint();
  const Real herm_part = std::max(herm_lambda_max(0.5 * (cross + cross.adjoint())), Real(0.0));
  Real v_norm = 0.0;
  for (int r = 0; r < R; ++r) {
    v_norm = std::max(v_norm,
                      cb_phi.segment(static_cast<Eigen::Index>(r) * Nr * Nr, Nr * Nr).norm());
  }
  const Real cbar_norm = 2.0 * terms.eta * terms.vct.norm() * terms.vc.norm() +
                         2.0 * terms.vtt.norm() * terms.vt.norm();
  const Real diameter = 2.0 * std::sqrt(static_cast<Real>(n)) * a_max;
  b.cubic_hessian_at_anchor = herm_part;
  b.lambda3 = 2.0 * (herm_part + v_norm + cbar_norm * diameter) * kInflate;
  return b;
}

RisSurrogate ris_surrogate(const RisTerms& terms, const CurvatureBounds& bounds,
                           const CVector& anchor, Real a_max) {
  const int R = terms.n_ris;
  const int Nr = terms.nr;
  const int n = R * Nr;
  RisSurrogate s;
  s.vc = terms.vc;
  s.eta = terms.eta;
  s.anchor = anchor;
  s.bounds = bounds;
  s.mu = 0.5 * (bounds.lambda2 + bounds.lambda3 + bounds.lambda_lift);

  const CVector anchor_lift = lift_phi(anchor, R, Nr);
  const CVector ell = 2.0 * terms.apply_Cq(anchor_lift) + terms.ctil_lin();

  // Lifted-linear part: exact quadratic Taylor of [Re;Im]^T Lbar [Re;Im].
  const RMatrix lbar = build_lbar(ell, R, Nr);
  RVector vbar(2 * n);
  vbar.head(n) = anchor.real();
  vbar.tail(n) = anchor.imag();
  const RVector ell_bar = (lbar + lbar.transpose()) * vbar - bounds.lambda2 * vbar;
  CVector u_ellbar(n);
  u_ellbar.real() = ell_bar.head(n);
  u_ellbar.imag() = ell_bar.tail(n);

  // Cubic gradient (both Wirtinger halves).
  const CVector cubic_grad =
      terms.apply_Cbar_adj(anchor_lift) + xi_adjoint(terms.apply_Cbar(anchor), anchor, R, Nr);

  s.m = -2.0 * terms.vt * terms.vt.dot(anchor) + u_ellbar + terms.c_lin() + cubic_grad -
        (bounds.lambda3 + bounds.lambda_lift) * anchor;

  // Constant chosen so the majorizer touches f2 at the anchor; the chain is
  // tangent there analytically, so this equals the tracked constant exactly.
  const Real quad_at_anchor = terms.eta * std::norm(terms.vc.dot(anchor)) +
                              s.mu * anchor.squaredNorm() + std::real(anchor.dot(s.m));
  s.c8 = terms.f2(anchor) - quad_at_anchor;
  (void)a_max;
  return s;
}

RisQpResult ris_qp_solve(const RisTerms& terms, const RisSurrogate& surrogate,
                         const CiConstraintSet::PhiForm& ci, Real a_max,
                         const ConeQpOptions& options) {
  const Eigen::Index n = surrogate.anchor.size();
  RisQpResult result;
  result.f2_before = terms.f2(surrogate.anchor);

  ConeQpProblem p;
  p.dim = static_cast<int>(n);
  // Normalize the objective so the splitting tolerances see O(1) curvature.
  const Real curv = std::max({surrogate.eta * surrogate.vc.squaredNorm(), surrogate.mu,
                              std::numeric_limits<Real>::min()});
  const Real scale = 1.0 / curv;
  p.quad_factors.push_back({scale * surrogate.eta, surrogate.vc});
  p.quad_iso = scale * surrogate.mu;
  p.q = scale * surrogate.m;
  p.radii = RVector::Constant(n, a_max);
  p.halfspaces.reserve(ci.d.size());
  for (size_t i = 0; i < ci.d.size(); ++i) {
    Halfspace h;
    h.offset = 0;
    h.a = ci.g[i].conjugate();
    h.rhs = ci.gamma[i] - std::real(ci.d[i]);
    p.halfspaces.push_back(std::move(h));
  }

  ConeQpSolver solver(p, options);
  solver.warm_start(surrogate.anchor);
  QpSolution sol = solver.solve();
  result.qp_status = sol.status;
  if (sol.status == QpStatus::kInfeasibleDetected) {
    result.phi = surrogate.anchor;
    result.f2_after = result.f2_before;
    return result;
  }
  // The prox iterate can sit a solver-tolerance outside the discs; the
  // amplitude cap is a hard hardware limit, so clamp exactly.
  for (Eigen::Index j = 0; j < sol.x.size(); ++j) {
    const Real mag = std::abs(sol.x(j));
    if (mag > a_max) sol.x(j) *= a_max / mag;
  }
  result.f2_after = terms.f2(sol.x);
  // Majorize-minimize acceptance: never let the exact objective increase.
  if (result.f2_after <= result.f2_before + 1e-12 * std::max(Real(1.0), std::abs(result.f2_before))) {
    result.phi = sol.x;
    result.accepted = true;
  } else {
    result.phi = surrogate.anchor;
    result.f2_after = result.f2_before;
  }
  return result;
}

RisQpResult ris_step(const RisTerms& terms, const CiConstraintSet::PhiForm& ci,
                     const CVector& anchor, Real a_max, const ConeQpOptions& options,
                     Real margin_slack, RisSurrogate* certified_out) {
  const int n = static_cast<int>(anchor.size());
  const CurvatureBounds certified = curvature_bounds(terms, anchor, a_max);
  const RisSurrogate surr = ris_surrogate(terms, certified, anchor, a_max);
  if (certified_out) *certified_out = surr;

  RisQpResult best = ris_qp_solve(terms, surr, ci, a_max, options);
  if (best.qp_status == QpStatus::kInfeasibleDetected) return best;

  auto feasible = [&](const CVector& phi) {
    for (int j = 0; j < n; ++j) {
      if (std::abs(phi(j)) > a_max + 1e-12) return false;
    }
    for (size_t i = 0; i < ci.d.size(); ++i) {
      const Complex v = ci.d[i] + (phi.transpose() * ci.g[i]).value();
      if (v.real() - ci.gamma[i] < -margin_slack) return false;
    }
    return true;
  };
  auto consider = [&](CVector phi) {
    for (int j = 0; j < n; ++j) {
      const Real mag = std::abs(phi(j));
      if (mag > a_max) phi(j) *= a_max / mag;
    }
    if (!feasible(phi)) return;
    const Real value = terms.f2(phi);
    if (value < best.f2_after) {
      best.f2_after = value;
      best.phi = phi;
      best.accepted = true;
    }
  };

  // Anchor-curvature candidate: keeps only the anchored cubic Hessian and
  // drops the set-diameter and lift inflation, so its step is larger but
  // unguaranteed; the exact-descent vetting above makes that safe.
  {
    CurvatureBounds probe = certified;
    probe.lambda3 = 2.0 * certified.cubic_hessian_at_anchor;
    probe.lambda_lift = 0.0;
    const RisSurrogate aggressive = ris_surrogate(terms, probe, anchor, a_max);
    const RisQpResult cand = ris_qp_solve(terms, aggressive, ci, a_max, options);
    if (cand.qp_status != QpStatus::kInfeasibleDetected && cand.accepted) consider(cand.phi);
  }

  // Extrapolation along the accepted move.
  if (best.accepted) {
    const CVector direction = best.phi - anchor;
    for (Real t : {2.0, 4.0, 8.0}) {
      consider(anchor + t * direction);
    }
  }
  return best;
}

}  // namespace ristap
