#pragma once

#include <optional>
#include <vector>

#include "ristap/scenario.hpp"
#include "ristap/types.hpp"

namespace ristap {

/// One coherent interval of PSK symbols for all users, plus the constellation
/// geometry used by the constructive-interference margins.
struct SymbolBlock {
  int n_users = 0, n_pulses = 0, n_slots = 0;
  int psk_order = 2;
  Real half_angle = 0.0;  // pi / order
  CMatrix symbols;        // K x (M*L), unit modulus, column j = m*L + l
  Eigen::MatrixXi indices;  // constellation index of each symbol

  int slot_count() const { return n_pulses * n_slots; }
  Complex constellation_point(int q) const;
};

SymbolBlock generate_symbols(int n_users, int n_pulses, int n_slots, int psk_order,
                             std::uint64_t seed);

/// Downlink channels in the form consumed by the margin machinery:
/// h_k(phi) = h_d[k] + E[k]^T phi with E[k] the stacked per-RIS factors
/// diag{h_{r,k}} G_r.
struct CommChannels {
  int n_tx = 0, n_users = 0, phi_dim = 0;
  std::vector<CVector> h_d;  // [k], length N
  std::vector<CMatrix> E;    // [k], (R*Nr) x N
  std::vector<Real> sigma_k2;   // per-user noise power
  std::vector<Real> qos_gamma;  // per-user linear SINR target

  explicit CommChannels() = default;
  CommChannels(const ChannelSet& channels, const ScenarioConfig& config);

  CVector equivalent_channel(int k, const CVector& phi) const;
};

/// The two rotated half-plane constraints per (user, slot) that keep the
/// noise-free receive point inside its constellation sector.
///
/// Constraint i covers user k = i / (2*M*L), family f = (i / (M*L)) % 2 and
/// slot j = i % (M*L); family 0 carries sin+jcos rotation, family 1 the
/// conjugate one.  All margins are Re{h_i(phi)^T x} - gamma_i.
class CiConstraintSet {
 public:
  /// `gamma_override`, when set, replaces every threshold (used to disarm the
  /// QoS constraints without changing the solver path).
  CiConstraintSet(const SymbolBlock& block, const CommChannels& channels,
                  std::optional<Real> gamma_override = {});

  int size() const { return 2 * n_users_ * slots_; }
  int slots() const { return slots_; }
  int n_users() const { return n_users_; }
  int user_of(int i) const { return i / (2 * slots_); }
  int family_of(int i) const { return (i / slots_) % 2; }
  int slot_of(int i) const { return i % slots_; }

  Real gamma(int i) const { return gammas_[static_cast<size_t>(i)]; }
  const std::vector<Real>& gammas() const { return gammas_; }
  Complex xi(int i) const;

  /// Margins Re{h_i(phi)^T x} - gamma_i for all constraints.
  RVector margins_x(const CVector& x, const CVector& phi) const;

  /// Raw sector test on the noise-free receive points: positive when the
  /// rotated real-part slack dominates the rotated imaginary part.  Used as an
  /// independent check of the compact margins.
  RVector margins_geometric(const CVector& x, const CVector& phi) const;

  /// Constraint normal in x for fixed phi, restricted to its support block:
  /// entries of conj(xi * h_k(phi)) at offset slot*N.  The margin equals
  /// Re{a^H x_block} - gamma.
  struct XHalfspace {
    int offset = 0;
    CVector a;
    Real gamma = 0.0;
  };
  std::vector<XHalfspace> x_halfspaces(const CVector& phi) const;

  /// phi-form of the same constraints at fixed x:
  /// Re{d_i + phi^T g_i} >= gamma_i.
  struct PhiForm {
    std::vector<Complex> d;
    std::vector<CVector> g;  // length R*Nr each
    std::vector<Real> gamma;
  };
  PhiForm phi_form(const CVector& x) const;

  RVector margins_phi(const PhiForm& form, const CVector& phi) const;

  const CommChannels& channels() const { return *channels_; }
  const SymbolBlock& block() const { return *block_; }

 private:
  const SymbolBlock* block_;
  const CommChannels* channels_;
  int n_users_ = 0, slots_ = 0, n_tx_ = 0;
  std::vector<Real> gammas_;
  CMatrix xi_;  // (2K) x slots; row 2k family 0, row 2k+1 family 1
};

/// Empirical symbol-error fraction per user under additive receiver noise,
/// minimum-distance PSK demodulation with known channel.
RVector ber_monte_carlo(const CVector& x, const CVector& phi, const SymbolBlock& block,
                        const CommChannels& channels, int n_noise, std::uint64_t seed);

}  // namespace ristap
