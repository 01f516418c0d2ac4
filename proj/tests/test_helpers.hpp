#pragma once

#include <vector>

#include "ristap/comm_ci.hpp"
#include "ristap/rng.hpp"
#include "ristap/scenario.hpp"
#include "ristap/stap_model.hpp"

namespace ristap::testing {

/// Hand-assembled tiny channel realization (bypasses geometry) used by the
/// operator and algebra tests: N=2, M=2, L=2, Nr=2, R=1, Q=1, P <= 6.
inline ChannelSet tiny_channels(std::uint64_t seed, int n_tx = 2, int n_pulses = 2,
                                int n_slots = 2, int nr = 2, int n_ris = 1, int n_clutter = 1) {
  Rng rng(seed);
  ChannelSet ch;
  ch.n_tx = n_tx;
  ch.n_ris = n_ris;
  ch.n_ris_elements = nr;
  ch.n_users = 1;
  ch.n_pulses = n_pulses;
  ch.n_slots = n_slots;
  ch.pri = 1e-3;
  ch.tau_min = 0;

  ch.theta_target = rng.uniform(-1.2, 1.2);
  for (int r = 0; r < n_ris; ++r) ch.theta_target_ris.push_back(rng.uniform(-1.2, 1.2));
  for (int q = 0; q < n_clutter; ++q) {
    ch.theta_clutter.push_back(rng.uniform(-1.2, 1.2));
    std::vector<Real> row;
    for (int r = 0; r < n_ris; ++r) row.push_back(rng.uniform(-1.2, 1.2));
    ch.theta_clutter_ris.push_back(row);
  }

  for (int r = 0; r < n_ris; ++r) {
    CMatrix g(nr, n_tx);
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < n_tx; ++j) g(i, j) = rng.cgaussian();
    ch.G.push_back(g);
  }
  ch.h_d.resize(1);
  ch.h_d[0] = CVector::Zero(n_tx);
  for (int j = 0; j < n_tx; ++j) ch.h_d[0](j) = rng.cgaussian();
  ch.h_r.assign(n_ris, std::vector<CVector>(1));
  for (int r = 0; r < n_ris; ++r) {
    ch.h_r[r][0] = CVector::Zero(nr);
    for (int j = 0; j < nr; ++j) ch.h_r[r][0](j) = rng.cgaussian();
  }

  int tau_max = 0;
  auto add_path = [&](int clutter, int ris, int kind) {
    PathGeometry p;
    p.clutter = clutter;
    p.ris = ris;
    p.kind = kind;
    p.tau = static_cast<int>(rng.uniform() * 4.0);  // spread <= 4 keeps P <= 6
    tau_max = std::max(tau_max, p.tau);
    p.doppler = clutter < 0 ? rng.uniform(-3000.0, 3000.0) : 0.0;
    if (clutter < 0) {
      ch.target_paths.push_back(p);
      ch.target_gains.push_back(rng.cgaussian());
    } else {
      ch.clutter_paths.push_back(p);
      ch.clutter_gains.push_back(rng.cgaussian());
    }
  };
  add_path(-1, -1, 0);
  for (int r = 0; r < n_ris; ++r)
    for (int kind = 1; kind <= 3; ++kind) add_path(-1, r, kind);
  for (int q = 0; q < n_clutter; ++q) {
    add_path(q, -1, 0);
    for (int r = 0; r < n_ris; ++r)
      for (int kind = 1; kind <= 3; ++kind) add_path(q, r, kind);
  }
  ch.snapshots = n_slots + tau_max;
  return ch;
}

inline CVector random_cvector(Rng& rng, int n, Real scale = 1.0) {
  CVector v(n);
  for (int j = 0; j < n; ++j) v(j) = scale * rng.cgaussian();
  return v;
}

/// Random point inside the per-coordinate discs |phi_n| <= a_max.
inline CVector random_disc_point(Rng& rng, int n, Real a_max) {
  CVector v(n);
  for (int j = 0; j < n; ++j) {
    const Real mag = a_max * std::sqrt(rng.uniform());
    v(j) = mag * rng.phase();
  }
  return v;
}

/// Small desk-like scenario used by the driver tests.
inline ScenarioConfig desk_config() {
  ScenarioConfig cfg;
  cfg.n_tx_antennas = 4;
  cfg.n_users = 2;
  cfg.n_ris = 2;
  cfg.n_ris_elements = 8;
  cfg.n_pulses = 2;
  cfg.n_slots = 4;
  cfg.prf = 5000.0;
  cfg.carrier_freq = 2.4e9;
  cfg.sampling_interval = 1e-7;
  cfg.total_power = 50.0;
  cfg.a_max = 5.0;
  cfg.qos_gamma = {10.0, 10.0};
  cfg.noise_power_radar = 1e-16;
  cfg.noise_power_user = 5e-11;
  cfg.psk_order = 4;
  cfg.target_position = {0.0, 50.0};
  cfg.target_velocity = {0.0, 30.0};
  cfg.ris_positions = {{-12.0, 45.0}, {12.0, 45.0}};
  cfg.clutter_positions = {{0.4, 49.3}, {-0.5, 49.6}, {0.3, 50.6}};
  cfg.user_positions = {{-5.0, 65.0}, {-3.5, 63.5}};
  cfg.pathloss_ref = 1e-3;
  cfg.ref_distance = 1.0;
  cfg.rng_seed = 1;
  return cfg;
}

}  // namespace ristap::testing
