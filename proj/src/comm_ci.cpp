#include "ristap/comm_ci.hpp"

#include <cmath>
#include <stdexcept>

namespace ristap {

Complex SymbolBlock::constellation_point(int q) const {
  const Real ang = half_angle + 2.0 * half_angle * q;
  return {std::cos(ang), std::sin(ang)};
}

SymbolBlock generate_symbols(int n_users, int n_pulses, int n_slots, int psk_order,
                             std::uint64_t seed) {
  if (psk_order < 2) throw std::invalid_argument("generate_symbols: psk_order must be >= 2");
  SymbolBlock b;
  b.n_users = n_users;
  b.n_pulses = n_pulses;
  b.n_slots = n_slots;
  b.psk_order = psk_order;
  b.half_angle = kPi / psk_order;
  const int slots = n_pulses * n_slots;
  b.symbols.resize(n_users, slots);
  b.indices.resize(n_users, slots);
  Rng rng(seed);
  for (int k = 0; k < n_users; ++k) {
    for (int j = 0; j < slots; ++j) {
      const int q = static_cast<int>(rng.uniform() * psk_order) % psk_order;
      b.indices(k, j) = q;
      b.symbols(k, j) = b.constellation_point(q);
    }
  }
  return b;
}

CommChannels::CommChannels(const ChannelSet& ch, const ScenarioConfig& cfg)
    : n_tx(ch.n_tx), n_users(ch.n_users), phi_dim(ch.n_ris * ch.n_ris_elements) {
  h_d.resize(n_users);
  E.resize(n_users);
  for (int k = 0; k < n_users; ++k) {
    h_d[k] = ch.h_d[static_cast<size_t>(k)];
    CMatrix e = CMatrix::Zero(phi_dim, n_tx);
    for (int r = 0; r < ch.n_ris; ++r) {
      e.middleRows(static_cast<Eigen::Index>(r) * ch.n_ris_elements, ch.n_ris_elements) =
          ch.h_r[static_cast<size_t>(r)][static_cast<size_t>(k)].asDiagonal() *
          ch.G[static_cast<size_t>(r)];
    }
    E[k] = e;
    sigma_k2.push_back(cfg.noise_power_user);
    qos_gamma.push_back(cfg.qos_gamma_for(k));
  }
}

CVector CommChannels::equivalent_channel(int k, const CVector& phi) const {
  const auto& e = E[static_cast<size_t>(k)];
  if (phi.size() != e.rows()) throw std::invalid_argument("equivalent_channel: bad phi length");
  return h_d[static_cast<size_t>(k)] + e.transpose() * phi;
}

CiConstraintSet::CiConstraintSet(const SymbolBlock& block, const CommChannels& channels,
                                 std::optional<Real> gamma_override)
    : block_(&block), channels_(&channels), n_users_(channels.n_users),
      slots_(block.slot_count()), n_tx_(channels.n_tx) {
  if (block.n_users != channels.n_users) {
    throw std::invalid_argument("CiConstraintSet: symbol block / channel user mismatch");
  }
  const Real phi_half = block.half_angle;
  const Real sin_phi = std::sin(phi_half);
  const Real cos_phi = std::cos(phi_half);
  xi_.resize(2 * n_users_, slots_);
  gammas_.resize(static_cast<size_t>(size()));
  for (int k = 0; k < n_users_; ++k) {
    const Real gamma_k =
        gamma_override ? *gamma_override
                       : std::sqrt(channels.sigma_k2[static_cast<size_t>(k)] *
                                   channels.qos_gamma[static_cast<size_t>(k)]) *
                             sin_phi;
    for (int j = 0; j < slots_; ++j) {
      const Complex rot = std::conj(block.symbols(k, j));  // e^{-j angle(s)}
      xi_(2 * k, j) = rot * Complex(sin_phi, -cos_phi);
      xi_(2 * k + 1, j) = rot * Complex(sin_phi, cos_phi);
    }
    for (int f = 0; f < 2; ++f) {
      for (int j = 0; j < slots_; ++j) {
        gammas_[static_cast<size_t>((2 * k + f) * slots_ + j)] = gamma_k;
      }
    }
  }
}

Complex CiConstraintSet::xi(int i) const {
  return xi_(2 * user_of(i) + family_of(i), slot_of(i));
}

RVector CiConstraintSet::margins_x(const CVector& x, const CVector& phi) const {
  if (x.size() != static_cast<Eigen::Index>(n_tx_) * slots_) {
    throw std::invalid_argument("margins_x: bad x length");
  }
  const Eigen::Map<const CMatrix> X(x.data(), n_tx_, slots_);
  RVector m(size());
  for (int k = 0; k < n_users_; ++k) {
    const CVector hk = channels_->equivalent_channel(k, phi);
    const Eigen::RowVectorXcd recv = hk.transpose() * X;  // noise-free points
    for (int f = 0; f < 2; ++f) {
      for (int j = 0; j < slots_; ++j) {
        const int i = (2 * k + f) * slots_ + j;
        m(i) = std::real(xi_(2 * k + f, j) * recv(j)) - gammas_[static_cast<size_t>(i)];
      }
    }
  }
  return m;
}

RVector CiConstraintSet::margins_geometric(const CVector& x, const CVector& phi) const {
  const Eigen::Map<const CMatrix> X(x.data(), n_tx_, slots_);
  const Real tan_phi = std::tan(block_->half_angle);
  RVector m(size());
  for (int k = 0; k < n_users_; ++k) {
    const CVector hk = channels_->equivalent_channel(k, phi);
    const Eigen::RowVectorXcd recv = hk.transpose() * X;
    const Real level = std::sqrt(channels_->sigma_k2[static_cast<size_t>(k)] *
                                 channels_->qos_gamma[static_cast<size_t>(k)]);
    for (int j = 0; j < slots_; ++j) {
      const Complex u = recv(j) * std::conj(block_->symbols(k, j));
      const Real slack = (u.real() - level) * tan_phi;
      // Family 0 guards the sector edge where Im rotates positive, family 1
      // the opposite one; both positive iff slack >= |Im{u}|.
      m((2 * k + 0) * slots_ + j) = slack + u.imag();
      m((2 * k + 1) * slots_ + j) = slack - u.imag();
    }
  }
  return m;
}

std::vector<CiConstraintSet::XHalfspace> CiConstraintSet::x_halfspaces(const CVector& phi) const {
  std::vector<XHalfspace> out;
  out.reserve(static_cast<size_t>(size()));
  for (int k = 0; k < n_users_; ++k) {
    const CVector hk = channels_->equivalent_channel(k, phi);
    for (int f = 0; f < 2; ++f) {
      for (int j = 0; j < slots_; ++j) {
        XHalfspace h;
        h.offset = j * n_tx_;
        h.a = (xi_(2 * k + f, j) * hk).conjugate();
        h.gamma = gammas_[static_cast<size_t>((2 * k + f) * slots_ + j)];
        out.push_back(std::move(h));
      }
    }
  }
  return out;
}

CiConstraintSet::PhiForm CiConstraintSet::phi_form(const CVector& x) const {
  const Eigen::Map<const CMatrix> X(x.data(), n_tx_, slots_);
  PhiForm form;
  form.d.resize(static_cast<size_t>(size()));
  form.g.resize(static_cast<size_t>(size()));
  form.gamma = gammas_;
  for (int k = 0; k < n_users_; ++k) {
    const Eigen::RowVectorXcd direct = channels_->h_d[static_cast<size_t>(k)].transpose() * X;
    const CMatrix ex = channels_->E[static_cast<size_t>(k)] * X;  // (R*Nr) x slots
    for (int f = 0; f < 2; ++f) {
      for (int j = 0; j < slots_; ++j) {
        const int i = (2 * k + f) * slots_ + j;
        const Complex xi_v = xi_(2 * k + f, j);
        form.d[static_cast<size_t>(i)] = xi_v * direct(j);
        form.g[static_cast<size_t>(i)] = xi_v * ex.col(j);
      }
    }
  }
  return form;
}

RVector CiConstraintSet::margins_phi(const PhiForm& form, const CVector& phi) const {
  RVector m(size());
  for (int i = 0; i < size(); ++i) {
    const Complex v = form.d[static_cast<size_t>(i)] +
                      (phi.transpose() * form.g[static_cast<size_t>(i)]).value();
    m(i) = v.real() - form.gamma[static_cast<size_t>(i)];
  }
  return m;
}

RVector ber_monte_carlo(const CVector& x, const CVector& phi, const SymbolBlock& block,
                        const CommChannels& channels, int n_noise, std::uint64_t seed) {
  if (n_noise < 1) throw std::invalid_argument("ber_monte_carlo: n_noise must be >= 1");
  const int slots = block.slot_count();
  const Eigen::Map<const CMatrix> X(x.data(), channels.n_tx, slots);
  const Real sector = 2.0 * block.half_angle;
  Rng rng(seed);
  RVector err = RVector::Zero(channels.n_users);
  for (int k = 0; k < channels.n_users; ++k) {
    const CVector hk = channels.equivalent_channel(k, phi);
    const Eigen::RowVectorXcd recv = hk.transpose() * X;
    const Real sigma2 = channels.sigma_k2[static_cast<size_t>(k)];
    long errors = 0;
    for (int t = 0; t < n_noise; ++t) {
      for (int j = 0; j < slots; ++j) {
        const Complex y = recv(j) + rng.cgaussian(sigma2);
        // Nearest-angle sector decision; the constellation is centered off the
        // axes, so sector q spans [q*2Phi, (q+1)*2Phi).
        Real ang = std::arg(y);
        if (ang < 0.0) ang += 2.0 * kPi;
        int q = static_cast<int>(std::floor(ang / sector)) % block.psk_order;
        if (q != block.indices(k, j)) ++errors;
      }
    }
    err(k) = static_cast<Real>(errors) / (static_cast<Real>(n_noise) * slots);
  }
  return err;
}

}  // namespace ristap
