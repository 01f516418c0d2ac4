#include "ristap/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace ristap {

namespace {

bool is_power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("scenario: " + what);
}

Real checked_distance(const Vec2& a, const Vec2& b, const std::string& what) {
  const Real d = (a - b).norm();
  if (d <= 0.0) {
    throw std::invalid_argument("scenario: degenerate geometry, coincident positions (" + what + ")");
  }
  return d;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_tx_antennas >= 1, "n_tx_antennas must be >= 1");
  require(n_users >= 1, "n_users must be >= 1");
  require(n_ris >= 0, "n_ris must be >= 0");
  require(n_ris_elements >= 1, "n_ris_elements must be >= 1");
  require(n_pulses >= 1, "n_pulses must be >= 1");
  require(n_slots >= 1, "n_slots must be >= 1");
  require(prf > 0.0, "prf must be positive");
  require(carrier_freq > 0.0, "carrier_freq must be positive");
  require(sampling_interval > 0.0, "sampling_interval must be positive");
  require(total_power > 0.0, "total_power must be positive");
  require(a_max > 0.0, "a_max must be positive");
  require(noise_power_radar > 0.0, "noise_power_radar must be positive");
  require(noise_power_user > 0.0, "noise_power_user must be positive");
  require(is_power_of_two(psk_order) && psk_order >= 2, "psk_order must be a power of two >= 2");
  require(static_cast<int>(qos_gamma.size()) == n_users, "qos_gamma must have one entry per user");
  for (Real g : qos_gamma) require(g > 0.0, "qos_gamma entries must be positive (linear)");
  require(static_cast<int>(ris_positions.size()) == n_ris, "ris_positions must have n_ris entries");
  require(static_cast<int>(user_positions.size()) == n_users, "user_positions must have n_users entries");
  require(pathloss_ref > 0.0, "pathloss_ref must be positive");
  require(ref_distance > 0.0, "ref_distance must be positive");
  // The full pulse (L slots) must fit within one pulse repetition interval.
  require(static_cast<Real>(n_slots) * sampling_interval <= 1.0 / prf + 1e-15,
          "n_slots * sampling_interval must not exceed 1/prf");
}

Real ScenarioConfig::slot_amplitude() const {
  return std::sqrt(total_power / (static_cast<Real>(n_tx_antennas) * n_pulses * n_slots));
}

Real path_loss(Real d, Real exponent, Real c0, Real d0) {
  if (d <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
  return std::sqrt(c0 * std::pow(d0 / d, exponent));
}

Real bearing(const Vec2& origin, const Vec2& broadside, const Vec2& point) {
  const Vec2 d = point - origin;
  return std::atan2(broadside.y() * d.x() - broadside.x() * d.y(), broadside.dot(d));
}

namespace {

/// Round-trip lengths for the four path kinds toward a scatterer at direct
/// distance d_bs and RIS-leg distance d_ris (BS->RIS distance d_bs_ris).
Real round_trip_length(int kind, Real d_bs, Real d_ris, Real d_bs_ris) {
  switch (kind) {
    case 0: return 2.0 * d_bs;
    case 1: return d_bs + d_ris + d_bs_ris;   // out direct, back via RIS
    case 2: return d_bs_ris + d_ris + d_bs;   // out via RIS, back direct
    case 3: return 2.0 * (d_bs_ris + d_ris);  // both legs via RIS
    default: throw std::invalid_argument("round_trip_length: bad path kind");
  }
}

int quantize_delay(Real length, Real ts) {
  return static_cast<int>(std::llround(length / (kSpeedOfLight * ts)));
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario s;
  s.config = config;

  const Vec2 bs = config.bs_position;
  const Vec2 bs_broadside{0.0, 1.0};
  const int R = config.n_ris;
  const int Q = static_cast<int>(config.clutter_positions.size());
  const int K = config.n_users;

  s.dist_bs_target = checked_distance(bs, config.target_position, "BS/target");
  s.theta_target = bearing(bs, bs_broadside, config.target_position);

  s.theta_ris_at_bs.resize(R);
  s.dist_bs_ris.resize(R);
  s.dist_ris_target.resize(R);
  s.theta_target_ris.resize(R);
  for (int r = 0; r < R; ++r) {
    const Vec2 ris = config.ris_positions[static_cast<size_t>(r)];
    s.dist_bs_ris[r] = checked_distance(bs, ris, "BS/RIS");
    s.theta_ris_at_bs[r] = bearing(bs, bs_broadside, ris);
    // Each RIS array faces the BS: its broadside is the RIS -> BS direction.
    const Vec2 ris_broadside = (bs - ris).normalized();
    s.dist_ris_target[r] = checked_distance(ris, config.target_position, "RIS/target");
    s.theta_target_ris[r] = bearing(ris, ris_broadside, config.target_position);
  }

  s.theta_clutter.resize(Q);
  s.dist_bs_clutter.resize(Q);
  s.theta_clutter_ris.assign(Q, std::vector<Real>(R, 0.0));
  s.dist_ris_clutter.assign(Q, std::vector<Real>(R, 0.0));
  for (int q = 0; q < Q; ++q) {
    const Vec2 c = config.clutter_positions[static_cast<size_t>(q)];
    s.dist_bs_clutter[q] = checked_distance(bs, c, "BS/clutter");
    s.theta_clutter[q] = bearing(bs, bs_broadside, c);
    for (int r = 0; r < R; ++r) {
      const Vec2 ris = config.ris_positions[static_cast<size_t>(r)];
      const Vec2 ris_broadside = (bs - ris).normalized();
      s.dist_ris_clutter[q][r] = checked_distance(ris, c, "RIS/clutter");
      s.theta_clutter_ris[q][r] = bearing(ris, ris_broadside, c);
    }
  }

  s.theta_user.resize(K);
  s.dist_bs_user.resize(K);
  s.dist_ris_user.assign(R, std::vector<Real>(K, 0.0));
  for (int k = 0; k < K; ++k) {
    const Vec2 u = config.user_positions[static_cast<size_t>(k)];
    s.dist_bs_user[k] = checked_distance(bs, u, "BS/user");
    s.theta_user[k] = bearing(bs, bs_broadside, u);
    for (int r = 0; r < R; ++r) {
      s.dist_ris_user[r][k] =
          checked_distance(config.ris_positions[static_cast<size_t>(r)], u, "RIS/user");
    }
  }

  // Path tables: lengths, quantized delays, Dopplers.
  const Real ts = config.sampling_interval;
  const Real lambda = s.wavelength();
  const Vec2 v = config.target_velocity;

  auto doppler_for = [&](int kind, int r) -> Real {
    const Vec2 to_bs = (bs - config.target_position).normalized();
    Real closing = 0.0;
    switch (kind) {
      case 0: closing = 2.0 * v.dot(to_bs); break;
      case 3: {
        const Vec2 to_ris =
            (config.ris_positions[static_cast<size_t>(r)] - config.target_position).normalized();
        closing = 2.0 * v.dot(to_ris);
        break;
      }
      default: {  // kinds 1 and 2 share one BS leg and one RIS leg
        const Vec2 to_ris =
            (config.ris_positions[static_cast<size_t>(r)] - config.target_position).normalized();
        closing = v.dot(to_bs) + v.dot(to_ris);
        break;
      }
    }
    return 2.0 * kPi * closing / lambda;
  };

  {
    PathGeometry direct;
    direct.kind = 0;
    direct.length = round_trip_length(0, s.dist_bs_target, 0.0, 0.0);
    direct.tau = quantize_delay(direct.length, ts);
    direct.doppler = doppler_for(0, -1);
    s.target_paths.push_back(direct);
    for (int r = 0; r < R; ++r) {
      for (int kind = 1; kind <= 3; ++kind) {
        PathGeometry p;
        p.ris = r;
        p.kind = kind;
        p.length = round_trip_length(kind, s.dist_bs_target, s.dist_ris_target[r], s.dist_bs_ris[r]);
        p.tau = quantize_delay(p.length, ts);
        p.doppler = doppler_for(kind, r);
        s.target_paths.push_back(p);
      }
    }
  }
  for (int q = 0; q < Q; ++q) {
    PathGeometry direct;
    direct.clutter = q;
    direct.kind = 0;
    direct.length = round_trip_length(0, s.dist_bs_clutter[q], 0.0, 0.0);
    direct.tau = quantize_delay(direct.length, ts);
    s.clutter_paths.push_back(direct);
    for (int r = 0; r < R; ++r) {
      for (int kind = 1; kind <= 3; ++kind) {
        PathGeometry p;
        p.clutter = q;
        p.ris = r;
        p.kind = kind;
        p.length =
            round_trip_length(kind, s.dist_bs_clutter[q], s.dist_ris_clutter[q][r], s.dist_bs_ris[r]);
        p.tau = quantize_delay(p.length, ts);
        s.clutter_paths.push_back(p);
      }
    }
  }

  int tau_min = s.target_paths.front().tau;
  int tau_max = tau_min;
  for (const auto& p : s.target_paths) {
    tau_min = std::min(tau_min, p.tau);
    tau_max = std::max(tau_max, p.tau);
  }
  for (const auto& p : s.clutter_paths) {
    tau_min = std::min(tau_min, p.tau);
    tau_max = std::max(tau_max, p.tau);
  }
  s.tau_min = tau_min;
  s.snapshots = config.n_slots + (tau_max - tau_min);
  return s;
}

std::vector<int> path_delays(const Scenario& scenario) {
  std::vector<int> taus;
  taus.reserve(scenario.target_paths.size() + scenario.clutter_paths.size());
  for (const auto& p : scenario.target_paths) taus.push_back(p.tau);
  for (const auto& p : scenario.clutter_paths) taus.push_back(p.tau);
  return taus;
}

std::vector<Real> path_dopplers(const Scenario& scenario) {
  std::vector<Real> fds;
  fds.reserve(scenario.target_paths.size());
  for (const auto& p : scenario.target_paths) fds.push_back(p.doppler);
  return fds;
}

ChannelSet sample_channels(const Scenario& scenario, std::uint64_t seed) {
  const ScenarioConfig& cfg = scenario.config;
  const int N = cfg.n_tx_antennas;
  const int R = cfg.n_ris;
  const int Nr = cfg.n_ris_elements;
  const int K = cfg.n_users;
  const int Q = static_cast<int>(cfg.clutter_positions.size());
  const Real c0 = cfg.pathloss_ref;
  const Real d0 = cfg.ref_distance;

  Rng rng(seed);
  ChannelSet ch;
  ch.n_tx = N;
  ch.n_ris = R;
  ch.n_ris_elements = Nr;
  ch.n_users = K;
  ch.n_pulses = cfg.n_pulses;
  ch.n_slots = cfg.n_slots;
  ch.snapshots = scenario.snapshots;
  ch.pri = 1.0 / cfg.prf;
  ch.theta_target = scenario.theta_target;
  ch.theta_target_ris = scenario.theta_target_ris;
  ch.theta_clutter = scenario.theta_clutter;
  ch.theta_clutter_ris = scenario.theta_clutter_ris;
  ch.target_paths = scenario.target_paths;
  ch.clutter_paths = scenario.clutter_paths;
  ch.tau_min = scenario.tau_min;

  // Draw order is fixed: h_d per user, h_r per (r, k), G per r, then path phases.
  ch.h_d.resize(K);
  for (int k = 0; k < K; ++k) {
    const Real amp = path_loss(scenario.dist_bs_user[k], cfg.pathloss.bs_user, c0, d0);
    CVector h(N);
    for (int n = 0; n < N; ++n) h(n) = amp * rng.cgaussian();
    ch.h_d[k] = h;
  }
  ch.h_r.assign(R, std::vector<CVector>(K));
  for (int r = 0; r < R; ++r) {
    for (int k = 0; k < K; ++k) {
      const Real amp = path_loss(scenario.dist_ris_user[r][k], cfg.pathloss.ris_user, c0, d0);
      CVector h(Nr);
      for (int n = 0; n < Nr; ++n) h(n) = amp * rng.cgaussian();
      ch.h_r[r][k] = h;
    }
  }
  ch.G.resize(R);
  for (int r = 0; r < R; ++r) {
    const Real amp = path_loss(scenario.dist_bs_ris[r], cfg.pathloss.bs_ris, c0, d0);
    if (cfg.ris_channel_model == RisChannelModel::kRayleigh) {
      CMatrix g(Nr, N);
      for (int j = 0; j < N; ++j)
        for (int i = 0; i < Nr; ++i) g(i, j) = amp * rng.cgaussian();
      ch.G[r] = g;
    } else {
      // Rank-one LoS alternative: RIS faces the BS, so the BS sits at the RIS
      // broadside; the RIS is seen from the BS at theta_ris_at_bs.
      CVector b(Nr), a(N);
      for (int i = 0; i < Nr; ++i) b(i) = Complex(1.0, 0.0);
      const Real st = std::sin(scenario.theta_ris_at_bs[r]);
      for (int n = 0; n < N; ++n) {
        const Real ph = -kPi * n * st;
        a(n) = Complex(std::cos(ph), std::sin(ph));
      }
      ch.G[r] = amp * b * a.transpose();
    }
  }

  const Real iota_td = cfg.pathloss.target_direct;
  const Real iota_ti = cfg.pathloss.target_indirect;
  const Real iota_cd = cfg.pathloss.clutter_direct;
  const Real iota_ci = cfg.pathloss.clutter_indirect;

  // Path gain magnitude: product of the amplitude losses of the legs not
  // already carried by G_r; unit-magnitude scatter phase per path.
  auto gain_magnitude = [&](const PathGeometry& p, Real d_bs, const std::vector<Real>& d_ris,
                            Real iota_direct, Real iota_indirect) -> Real {
    if (p.kind == 0) {
      const Real leg = path_loss(d_bs, iota_direct, c0, d0);
      return leg * leg;
    }
    const Real d_r = d_ris[static_cast<size_t>(p.ris)];
    switch (p.kind) {
      case 1:
      case 2: {
        return path_loss(d_bs, iota_indirect, c0, d0) * path_loss(d_r, iota_indirect, c0, d0);
      }
      default: {
        const Real leg = path_loss(d_r, iota_indirect, c0, d0);
        return leg * leg;
      }
    }
  };

  ch.target_gains.reserve(ch.target_paths.size());
  for (const auto& p : ch.target_paths) {
    const Real mag = gain_magnitude(p, scenario.dist_bs_target, scenario.dist_ris_target,
                                    iota_td, iota_ti);
    ch.target_gains.push_back(mag * rng.phase());
  }
  ch.clutter_gains.reserve(ch.clutter_paths.size());
  for (const auto& p : ch.clutter_paths) {
    const int q = p.clutter;
    const Real mag = gain_magnitude(p, scenario.dist_bs_clutter[static_cast<size_t>(q)],
                                    scenario.dist_ris_clutter[static_cast<size_t>(q)],
                                    iota_cd, iota_ci);
    ch.clutter_gains.push_back(mag * rng.phase());
  }
  (void)Q;
  return ch;
}

}  // namespace ristap
