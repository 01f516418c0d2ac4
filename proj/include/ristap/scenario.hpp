#pragma once

#include <string>
#include <vector>

#include "ristap/rng.hpp"
#include "ristap/types.hpp"

namespace ristap {

/// Path-loss exponents per channel family.
struct PathLossExponents {
  Real target_direct = 2.7;
  Real target_indirect = 2.3;
  Real clutter_direct = 2.7;
  Real clutter_indirect = 2.3;
  Real bs_user = 3.0;       // h_dk
  Real ris_user = 2.8;      // h_rk
  Real bs_ris = 2.0;        // G_r
};

enum class RisChannelModel {
  kRayleigh,   // iid circular Gaussian entries scaled by the path-loss amplitude
  kSteered,    // deterministic rank-one b(theta) a(theta)^T alternative
};

/// Full scene description: array sizes, timing, powers, geometry, randomness.
struct ScenarioConfig {
  Vec2 bs_position{0.0, 0.0};
  int n_tx_antennas = 8;     // N
  int n_users = 3;           // K
  int n_ris = 2;             // R
  int n_ris_elements = 25;   // per-RIS element count
  int n_pulses = 8;          // M
  int n_slots = 8;           // L, fast-time slots per pulse
  Real prf = 1000.0;         // Hz
  Real carrier_freq = 2.4e9; // Hz
  Real sampling_interval = 1e-7;  // seconds per fast-time slot
  Real total_power = 50.0;   // W
  Real a_max = 5.0;          // reflection amplitude cap
  std::vector<Real> qos_gamma;   // linear SINR target per user
  Real noise_power_radar = 1e-8; // W
  Real noise_power_user = 1e-8;  // W
  int psk_order = 4;
  Vec2 target_position{0.0, 50.0};
  Vec2 target_velocity{0.0, 30.0};
  std::vector<Vec2> ris_positions;
  std::vector<Vec2> clutter_positions;
  std::vector<Vec2> user_positions;
  PathLossExponents pathloss;
  Real pathloss_ref = 1e-3;  // C0, linear power gain at d0
  Real ref_distance = 1.0;   // d0, meters
  RisChannelModel ris_channel_model = RisChannelModel::kRayleigh;
  std::uint64_t rng_seed = 1;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  Real slot_amplitude() const;  // sqrt(P_BS / (N M L))
  Real qos_gamma_for(int k) const { return qos_gamma.at(static_cast<size_t>(k)); }
};

/// Per-path bookkeeping shared by target and clutter paths.
///
/// kind 0 is the direct round trip; kinds 1..3 are the reflected round trips
/// via RIS `ris` (1: out direct / back via RIS, 2: out via RIS / back direct,
/// 3: both legs via RIS).
struct PathGeometry {
  int clutter = -1;  // -1 for target paths
  int ris = -1;      // -1 for kind 0
  int kind = 0;
  Real length = 0.0;   // total round-trip meters
  int tau = 0;         // fast-time delay in slots
  Real doppler = 0.0;  // angular frequency, rad/s
};

/// Geometry-derived quantities: angles, distances, delay and Doppler tables.
struct Scenario {
  ScenarioConfig config;

  Real theta_target = 0.0;              // bearing of target at the BS
  std::vector<Real> theta_target_ris;   // bearing of target at RIS r
  std::vector<Real> theta_clutter;      // bearing of clutter q at the BS
  std::vector<std::vector<Real>> theta_clutter_ris;  // [q][r]
  std::vector<Real> theta_ris_at_bs;    // bearing of RIS r at the BS
  std::vector<Real> theta_user;         // bearing of user k at the BS

  Real dist_bs_target = 0.0;
  std::vector<Real> dist_ris_target;
  std::vector<Real> dist_bs_ris;
  std::vector<Real> dist_bs_clutter;
  std::vector<std::vector<Real>> dist_ris_clutter;  // [q][r]
  std::vector<Real> dist_bs_user;
  std::vector<std::vector<Real>> dist_ris_user;     // [r][k]

  std::vector<PathGeometry> target_paths;   // direct first, then (r, i)
  std::vector<PathGeometry> clutter_paths;  // per q: direct, then (r, i)

  int tau_min = 0;
  int snapshots = 0;  // P = L + (max tau - min tau)

  Real wavelength() const { return kSpeedOfLight / config.carrier_freq; }
};

/// Random channel realization plus the deterministic path tables it was drawn
/// against.  Everything downstream of here is pure linear algebra.
struct ChannelSet {
  int n_tx = 0, n_ris = 0, n_ris_elements = 0, n_users = 0;
  int n_pulses = 0, n_slots = 0, snapshots = 0;
  Real pri = 0.0;  // pulse repetition interval, seconds

  std::vector<CMatrix> G;                 // [r], Nr x N, BS -> RIS
  std::vector<CVector> h_d;               // [k], length N, BS -> user
  std::vector<std::vector<CVector>> h_r;  // [r][k], length Nr, RIS -> user

  Real theta_target = 0.0;
  std::vector<Real> theta_target_ris;
  std::vector<Real> theta_clutter;
  std::vector<std::vector<Real>> theta_clutter_ris;

  std::vector<PathGeometry> target_paths;   // with sampled gains below
  std::vector<PathGeometry> clutter_paths;
  std::vector<Complex> target_gains;        // alpha per target path
  std::vector<Complex> clutter_gains;       // alpha per clutter path
  int tau_min = 0;

  int n_clutter() const { return static_cast<int>(theta_clutter.size()); }
};

/// Amplitude-domain path loss: sqrt(C0 (d0/d)^exponent).  Throws on d <= 0.
Real path_loss(Real d, Real exponent, Real c0, Real d0);

/// Signed bearing of `point` as seen from `origin` with the given broadside
/// direction; positive toward the +x side when broadside is +y.
Real bearing(const Vec2& origin, const Vec2& broadside, const Vec2& point);

/// Computes all angles, distances, delays, Dopplers, and the snapshot count.
/// Throws on coincident positions (zero-length propagation legs).
Scenario build_scenario(const ScenarioConfig& config);

/// Round-trip delay table in fast-time slots, one entry per path.
std::vector<int> path_delays(const Scenario& scenario);

/// Doppler angular-frequency table (rad/s) for the target paths.
std::vector<Real> path_dopplers(const Scenario& scenario);

/// Draws the Rayleigh channels and per-path reflection phases.  Deterministic
/// given (scenario, seed); distinct seeds give independent draws.
ChannelSet sample_channels(const Scenario& scenario, std::uint64_t seed);

}  // namespace ristap
