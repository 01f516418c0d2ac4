#include "ristap/oracles.hpp"

#include <cmath>

namespace ristap::oracles {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

namespace {

CMatrix dense_operator(const StackedModel& model, const std::vector<StackedModel::Path>& paths,
                       const CVector& phi) {
  const int M = model.n_pulses();
  const int L = model.n_slots();
  const int P = model.snapshots();
  CMatrix out = CMatrix::Zero(model.filter_dim(), model.waveform_dim());
  for (const auto& path : paths) {
    const CVector dphases = doppler_phases(path.doppler, M, model.pri());
    CMatrix d = CMatrix::Zero(M, M);
    d.diagonal() = dphases;
    const RMatrix j = shift_matrix(path.tau_rel, L, P);
    const CMatrix h = model.path_channel(path, phi);
    out += kron(kron(d, j.transpose().cast<Complex>()), h);
  }
  return out;
}

}  // namespace

CMatrix dense_target_operator(const StackedModel& model, const CVector& phi) {
  return dense_operator(model, model.target_paths(), phi);
}

CMatrix dense_clutter_operator(const StackedModel& model, const CVector& phi) {
  return dense_operator(model, model.clutter_paths(), phi);
}

std::vector<GeometricPath> geometric_paths(const ScenarioConfig& config) {
  std::vector<GeometricPath> out;
  const Vec2 bs = config.bs_position;
  const Real c_ts = kSpeedOfLight * config.sampling_interval;
  const Real lambda = kSpeedOfLight / config.carrier_freq;
  const Vec2 v = config.target_velocity;

  auto legs_for = [&](const Vec2& scatterer, int ris, int kind) {
    const Real d_direct = (scatterer - bs).norm();
    if (kind == 0) return 2.0 * d_direct;
    const Vec2 rp = config.ris_positions[static_cast<size_t>(ris)];
    const Real d_ris = (scatterer - rp).norm();
    const Real d_bs_ris = (rp - bs).norm();
    if (kind == 3) return 2.0 * (d_bs_ris + d_ris);
    return d_direct + d_ris + d_bs_ris;
  };
  auto doppler_for = [&](int ris, int kind) {
    const Vec2 to_bs = (bs - config.target_position).normalized();
    if (kind == 0) return 4.0 * kPi * v.dot(to_bs) / lambda;
    const Vec2 to_ris =
        (config.ris_positions[static_cast<size_t>(ris)] - config.target_position).normalized();
    if (kind == 3) return 4.0 * kPi * v.dot(to_ris) / lambda;
    return 2.0 * kPi * (v.dot(to_bs) + v.dot(to_ris)) / lambda;
  };

  auto emit = [&](const Vec2& pos, int clutter) {
    for (int kind = 0; kind <= 3; ++kind) {
      const int ris_count = kind == 0 ? 1 : config.n_ris;
      for (int r = 0; r < ris_count; ++r) {
        GeometricPath p;
        p.clutter = clutter;
        p.ris = kind == 0 ? -1 : r;
        p.kind = kind;
        p.length_m = legs_for(pos, p.ris, kind);
        p.tau = static_cast<int>(std::llround(p.length_m / c_ts));
        p.doppler = clutter < 0 ? doppler_for(p.ris, kind) : 0.0;
        out.push_back(p);
      }
    }
  };
  emit(config.target_position, -1);
  for (size_t q = 0; q < config.clutter_positions.size(); ++q) {
    emit(config.clutter_positions[q], static_cast<int>(q));
  }
  return out;
}

CVector psi_grid_search(const CVector& x, const CVector& lambda, Real rho, Real amplitude,
                        int grid_points) {
  CVector best(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Real best_val = std::numeric_limits<Real>::infinity();
    Complex best_psi = amplitude;
    for (int g = 0; g < grid_points; ++g) {
      const Real th = 2.0 * kPi * g / grid_points;
      const Complex cand = amplitude * Complex(std::cos(th), std::sin(th));
      const Real val = std::norm(x(j) - cand + lambda(j) / rho);
      if (val < best_val) {
        best_val = val;
        best_psi = cand;
      }
    }
    best(j) = best_psi;
  }
  return best;
}

namespace {

CVector project_feasible(const ConeQpProblem& p, const CVector& y, int dykstra_iters) {
  // Dykstra's alternating projections over each halfspace and the disc box.
  const size_t m = p.halfspaces.size();
  std::vector<CVector> increments(m + 1);
  CVector x = y;
  for (size_t i = 0; i <= m; ++i) increments[i] = CVector::Zero(y.size());
  for (int it = 0; it < dykstra_iters; ++it) {
    Real moved = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const auto& h = p.halfspaces[i];
      CVector z = x;
      z.segment(h.offset, h.a.size()) += increments[i].segment(h.offset, h.a.size());
      const Real margin = std::real(h.a.dot(z.segment(h.offset, h.a.size())));
      CVector proj = z;
      if (margin < h.rhs) {
        proj.segment(h.offset, h.a.size()) += (h.rhs - margin) / h.a.squaredNorm() * h.a;
      }
      increments[i] = z - proj;
      moved = std::max(moved, (proj - x).lpNorm<Eigen::Infinity>());
      x = proj;
    }
    CVector z = x + increments[m];
    CVector proj = z;
    for (Eigen::Index jx = 0; jx < z.size(); ++jx) {
      const Real mag = std::abs(z(jx));
      if (mag > p.radii(jx)) proj(jx) = z(jx) * (p.radii(jx) / mag);
    }
    increments[m] = z - proj;
    moved = std::max(moved, (proj - x).lpNorm<Eigen::Infinity>());
    x = proj;
    if (moved < 1e-15) break;
  }
  return x;
}

}  // namespace

CVector projected_gradient_qp(const ConeQpProblem& p, int outer_iters, int dykstra_iters) {
  Real lip = 2.0 * p.quad_iso + p.rho;
  for (const auto& [w, u] : p.quad_factors) lip += 2.0 * w * u.squaredNorm();
  if (lip <= 0.0) lip = 1.0;
  const Real step = 1.0 / lip;
  CVector x = CVector::Zero(p.dim);
  if (p.v.size() > 0) x = project_feasible(p, p.v, dykstra_iters);
  for (int it = 0; it < outer_iters; ++it) {
    CVector grad = 2.0 * p.quad_iso * x;
    for (const auto& [w, u] : p.quad_factors) grad += (2.0 * w) * u * u.dot(x);
    if (p.q.size() > 0) grad += p.q;
    if (p.rho > 0.0) grad += p.rho * (p.v.size() > 0 ? (x - p.v).eval() : x);
    x = project_feasible(p, x - step * grad, dykstra_iters);
  }
  return x;
}

GridMaxMin maxmin_grid_search(const std::vector<Halfspace>& halfspaces, int dim, Real radius,
                              int phase_steps, int mag_steps) {
  GridMaxMin best;
  best.x = CVector::Zero(dim);
  best.delta = -std::numeric_limits<Real>::infinity();
  const long total = static_cast<long>(std::pow(static_cast<double>(phase_steps * mag_steps), dim));
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    CVector x(dim);
    for (int d = 0; d < dim; ++d) {
      const int cell = static_cast<int>(rem % (phase_steps * mag_steps));
      rem /= (phase_steps * mag_steps);
      const int pi_ = cell % phase_steps;
      const int mi = cell / phase_steps;
      const Real mag = radius * (mi + 1) / mag_steps;
      const Real th = 2.0 * kPi * pi_ / phase_steps;
      x(d) = mag * Complex(std::cos(th), std::sin(th));
    }
    Real margin = std::numeric_limits<Real>::infinity();
    for (const auto& h : halfspaces) {
      margin = std::min(margin, std::real(h.a.dot(x.segment(h.offset, h.a.size()))));
    }
    if (margin > best.delta) {
      best.delta = margin;
      best.x = x;
    }
  }
  return best;
}

}  // namespace ristap::oracles
