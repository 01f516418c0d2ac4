#pragma once

#include <vector>

#include "ristap/scenario.hpp"
#include "ristap/types.hpp"

namespace ristap {

/// Half-wavelength ULA steering vector: entry n = exp(-j pi n sin(theta)).
CVector steering_vector(Real theta, int count);

/// L x P selection matrix with entry (m, n) = 1 iff n = m + tau_rel
/// (zero-based); right-multiplying a pulse by it embeds the L slots at
/// fast-time offset tau_rel inside the P-snapshot window.
/// Throws unless 0 <= tau_rel <= P - L.
RMatrix shift_matrix(int tau_rel, int L, int P);

/// Diagonal of the slow-time Doppler matrix: {1, e^{j f T}, ..., e^{j(M-1) f T}}.
CVector doppler_phases(Real doppler, int M, Real pri);

/// Joint transmit/receive design point.
struct DesignVariables {
  CVector x;    // vectorized waveform, length N*M*L
  CVector phi;  // concatenated reflection coefficients, length R*Nr
  CVector w;    // space-time receive filter, length N*M*P
};

/// Precomputed per-path spatial factors plus delay/Doppler bookkeeping.
///
/// Every composite channel is rank one, H = alpha * left * right^T, where the
/// left/right factors are steering vectors or B^T phi slices; operators are
/// applied in that factored form and never materialize the stacked
/// (N*M*P) x (N*M*L) matrix.
class StackedModel {
 public:
  struct Path {
    int clutter = -1;  // -1 for target paths
    int ris = -1;
    int kind = 0;      // 0 direct, 1..3 reflected variants
    Complex alpha;
    int tau_rel = 0;
    Real doppler = 0.0;  // rad/s; 0 for clutter
  };

  explicit StackedModel(const ChannelSet& channels);

  int n_tx() const { return n_; }
  int n_pulses() const { return m_; }
  int n_slots() const { return l_; }
  int snapshots() const { return p_; }
  int n_ris() const { return r_; }
  int n_ris_elements() const { return nr_; }
  int waveform_dim() const { return n_ * m_ * l_; }
  int filter_dim() const { return n_ * m_ * p_; }
  int phi_dim() const { return r_ * nr_; }
  Real pri() const { return pri_; }

  const std::vector<Path>& target_paths() const { return target_paths_; }
  const std::vector<Path>& clutter_paths() const { return clutter_paths_; }
  const CVector& bs_steering_target() const { return a_t_; }
  const CVector& bs_steering_clutter(int q) const { return a_q_[static_cast<size_t>(q)]; }
  /// B_{t,r} = diag{b(theta_{t,r})} G_r, the phi-side factor of the target
  /// bounce at RIS r; clutter analog below.
  const CMatrix& b_target(int r) const { return b_t_[static_cast<size_t>(r)]; }
  const CMatrix& b_clutter(int q, int r) const {
    return b_q_[static_cast<size_t>(q)][static_cast<size_t>(r)];
  }

  /// N x N composite channel of one path at the given reflection state.
  CMatrix path_channel(const Path& path, const CVector& phi) const;

  /// y_t(x, phi): stacked target echo, length N*M*P.
  CVector apply_target(const CVector& x, const CVector& phi) const;
  /// y_c(x, phi): stacked clutter echo, length N*M*P.
  CVector apply_clutter(const CVector& x, const CVector& phi) const;
  /// Direct-path-only variants (all reflected paths dropped).
  CVector apply_target_direct(const CVector& x) const;
  CVector apply_clutter_direct(const CVector& x) const;

  /// Adjoint pullbacks (H^H w), length N*M*L; used for the rank-one waveform
  /// quadratics.
  CVector adjoint_target(const CVector& w, const CVector& phi) const;
  CVector adjoint_clutter(const CVector& w, const CVector& phi) const;
  CVector adjoint_target_direct(const CVector& w) const;
  CVector adjoint_clutter_direct(const CVector& w) const;

  /// Filter-output signal-to-clutter-plus-noise ratio.  Throws on w = 0.
  Real scnr(const CVector& x, const CVector& phi, const CVector& w, Real sigma_r2) const;

 private:
  CVector phi_slice(const CVector& phi, int r) const;
  void path_factors(const Path& path, const CVector& phi, CVector& left, CVector& right) const;
  void accumulate(const Path& path, const CVector& x, const CVector& phi, CVector& out) const;
  void accumulate_adjoint(const Path& path, const CVector& w, const CVector& phi,
                          CVector& out) const;

  int n_ = 0, m_ = 0, l_ = 0, p_ = 0, r_ = 0, nr_ = 0;
  Real pri_ = 0.0;
  CVector a_t_;
  std::vector<CVector> a_q_;
  std::vector<CMatrix> b_t_;               // [r]
  std::vector<std::vector<CMatrix>> b_q_;  // [q][r]
  std::vector<Path> target_paths_;
  std::vector<Path> clutter_paths_;
};

}  // namespace ristap
