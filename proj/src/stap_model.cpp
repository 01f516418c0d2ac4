#include "ristap/stap_model.hpp"

#include <stdexcept>

namespace ristap {

CVector steering_vector(Real theta, int count) {
  CVector a(count);
  const Real st = std::sin(theta);
  for (int n = 0; n < count; ++n) {
    const Real ph = -kPi * n * st;
    a(n) = Complex(std::cos(ph), std::sin(ph));
  }
  return a;
}

RMatrix shift_matrix(int tau_rel, int L, int P) {
  if (tau_rel < 0 || tau_rel > P - L) {
    throw std::invalid_argument("shift_matrix: echo falls outside the observation window");
  }
  RMatrix j = RMatrix::Zero(L, P);
  for (int m = 0; m < L; ++m) j(m, m + tau_rel) = 1.0;
  return j;
}

CVector doppler_phases(Real doppler, int M, Real pri) {
  if (pri <= 0.0) throw std::invalid_argument("doppler_phases: pri must be positive");
  CVector d(M);
  for (int m = 0; m < M; ++m) {
    const Real ph = doppler * pri * m;
    d(m) = Complex(std::cos(ph), std::sin(ph));
  }
  return d;
}

StackedModel::StackedModel(const ChannelSet& ch)
    : n_(ch.n_tx),
      m_(ch.n_pulses),
      l_(ch.n_slots),
      p_(ch.snapshots),
      r_(ch.n_ris),
      nr_(ch.n_ris_elements),
      pri_(ch.pri) {
  a_t_ = steering_vector(ch.theta_target, n_);
  const int Q = ch.n_clutter();
  a_q_.resize(Q);
  for (int q = 0; q < Q; ++q) a_q_[q] = steering_vector(ch.theta_clutter[q], n_);

  b_t_.resize(r_);
  for (int r = 0; r < r_; ++r) {
    const CVector b = steering_vector(ch.theta_target_ris[r], nr_);
    b_t_[r] = b.asDiagonal() * ch.G[r];
  }
  b_q_.assign(Q, std::vector<CMatrix>(r_));
  for (int q = 0; q < Q; ++q) {
    for (int r = 0; r < r_; ++r) {
      const CVector b = steering_vector(ch.theta_clutter_ris[q][r], nr_);
      b_q_[q][r] = b.asDiagonal() * ch.G[r];
    }
  }

  auto convert = [&](const PathGeometry& g, Complex alpha, bool clutter) {
    Path p;
    p.clutter = g.clutter;
    p.ris = g.ris;
    p.kind = g.kind;
    p.alpha = alpha;
    p.tau_rel = g.tau - ch.tau_min;
    p.doppler = clutter ? 0.0 : g.doppler;
    if (p.tau_rel < 0 || p.tau_rel > p_ - l_) {
      throw std::invalid_argument("StackedModel: path delay outside the snapshot window");
    }
    return p;
  };
  for (size_t i = 0; i < ch.target_paths.size(); ++i) {
    target_paths_.push_back(convert(ch.target_paths[i], ch.target_gains[i], false));
  }
  for (size_t i = 0; i < ch.clutter_paths.size(); ++i) {
    clutter_paths_.push_back(convert(ch.clutter_paths[i], ch.clutter_gains[i], true));
  }
}

CVector StackedModel::phi_slice(const CVector& phi, int r) const {
  if (phi.size() != phi_dim()) throw std::invalid_argument("phi has wrong length");
  return phi.segment(static_cast<Eigen::Index>(r) * nr_, nr_);
}

void StackedModel::path_factors(const Path& path, const CVector& phi, CVector& left,
                                CVector& right) const {
  const CVector& a = path.clutter < 0 ? a_t_ : a_q_[static_cast<size_t>(path.clutter)];
  if (path.kind == 0) {
    left = a;
    right = a;
    return;
  }
  const CMatrix& b = path.clutter < 0 ? b_t_[static_cast<size_t>(path.ris)]
                                      : b_q_[static_cast<size_t>(path.clutter)][static_cast<size_t>(path.ris)];
  const CVector bphi = b.transpose() * phi_slice(phi, path.ris);
  switch (path.kind) {
    case 1: left = bphi; right = a; break;
    case 2: left = a; right = bphi; break;
    default: left = bphi; right = bphi; break;
  }
}

CMatrix StackedModel::path_channel(const Path& path, const CVector& phi) const {
  CVector left, right;
  path_factors(path, phi, left, right);
  return path.alpha * left * right.transpose();
}

void StackedModel::accumulate(const Path& path, const CVector& x, const CVector& phi,
                              CVector& out) const {
  CVector left, right;
  path_factors(path, phi, left, right);

  const Eigen::Map<const CMatrix> X(x.data(), n_, m_ * l_);
  Eigen::Map<CMatrix> Y(out.data(), n_, m_ * p_);
  // H X_m lands at fast-time offset tau_rel with the pulse-m Doppler phase.
  const Eigen::RowVectorXcd row = right.transpose() * X;  // 1 x (M L)
  const CVector phases = doppler_phases(path.doppler, m_, pri_);
  for (int m = 0; m < m_; ++m) {
    const Complex scale = path.alpha * phases(m);
    Y.block(0, m * p_ + path.tau_rel, n_, l_).noalias() +=
        scale * left * row.segment(m * l_, l_);
  }
}

void StackedModel::accumulate_adjoint(const Path& path, const CVector& w, const CVector& phi,
                                      CVector& out) const {
  CVector left, right;
  path_factors(path, phi, left, right);

  const Eigen::Map<const CMatrix> W(w.data(), n_, m_ * p_);
  Eigen::Map<CMatrix> H(out.data(), n_, m_ * l_);
  const Eigen::RowVectorXcd uw = left.adjoint() * W;  // 1 x (M P)
  const CVector phases = doppler_phases(path.doppler, m_, pri_);
  for (int m = 0; m < m_; ++m) {
    const Complex scale = std::conj(path.alpha * phases(m));
    H.block(0, m * l_, n_, l_).noalias() +=
        scale * right.conjugate() * uw.segment(m * p_ + path.tau_rel, l_);
  }
}

namespace {

template <typename Fn>
CVector apply_paths(const std::vector<StackedModel::Path>& paths, Eigen::Index out_dim,
                    bool direct_only, Fn&& accumulate_one) {
  CVector out = CVector::Zero(out_dim);
  for (const auto& p : paths) {
    if (direct_only && p.kind != 0) continue;
    accumulate_one(p, out);
  }
  return out;
}

}  // namespace

CVector StackedModel::apply_target(const CVector& x, const CVector& phi) const {
  if (x.size() != waveform_dim()) throw std::invalid_argument("x has wrong length");
  return apply_paths(target_paths_, filter_dim(), false,
                     [&](const Path& p, CVector& out) { accumulate(p, x, phi, out); });
}

CVector StackedModel::apply_clutter(const CVector& x, const CVector& phi) const {
  if (x.size() != waveform_dim()) throw std::invalid_argument("x has wrong length");
  return apply_paths(clutter_paths_, filter_dim(), false,
                     [&](const Path& p, CVector& out) { accumulate(p, x, phi, out); });
}

CVector StackedModel::apply_target_direct(const CVector& x) const {
  const CVector phi = CVector::Zero(phi_dim());
  return apply_paths(target_paths_, filter_dim(), true,
                     [&](const Path& p, CVector& out) { accumulate(p, x, phi, out); });
}

CVector StackedModel::apply_clutter_direct(const CVector& x) const {
  const CVector phi = CVector::Zero(phi_dim());
  return apply_paths(clutter_paths_, filter_dim(), true,
                     [&](const Path& p, CVector& out) { accumulate(p, x, phi, out); });
}

CVector StackedModel::adjoint_target(const CVector& w, const CVector& phi) const {
  if (w.size() != filter_dim()) throw std::invalid_argument("w has wrong length");
  return apply_paths(target_paths_, waveform_dim(), false,
                     [&](const Path& p, CVector& out) { accumulate_adjoint(p, w, phi, out); });
}

CVector StackedModel::adjoint_clutter(const CVector& w, const CVector& phi) const {
  if (w.size() != filter_dim()) throw std::invalid_argument("w has wrong length");
  return apply_paths(clutter_paths_, waveform_dim(), false,
                     [&](const Path& p, CVector& out) { accumulate_adjoint(p, w, phi, out); });
}

CVector StackedModel::adjoint_target_direct(const CVector& w) const {
  const CVector phi = CVector::Zero(phi_dim());
  return apply_paths(target_paths_, waveform_dim(), true,
                     [&](const Path& p, CVector& out) { accumulate_adjoint(p, w, phi, out); });
}

CVector StackedModel::adjoint_clutter_direct(const CVector& w) const {
  const CVector phi = CVector::Zero(phi_dim());
  return apply_paths(clutter_paths_, waveform_dim(), true,
                     [&](const Path& p, CVector& out) { accumulate_adjoint(p, w, phi, out); });
}

Real StackedModel::scnr(const CVector& x, const CVector& phi, const CVector& w,
                        Real sigma_r2) const {
  if (w.size() != filter_dim() || w.norm() == 0.0) {
    throw std::invalid_argument("scnr: receive filter must be nonzero");
  }
  const CVector yt = apply_target(x, phi);
  const CVector yc = apply_clutter(x, phi);
  const Real num = std::norm(w.dot(yt));
  const Real den = std::norm(w.dot(yc)) + sigma_r2 * w.squaredNorm();
  return num / den;
}

}  // namespace ristap
