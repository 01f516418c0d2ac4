#include <doctest.h>

#include "ristap/scenario.hpp"
#include "test_helpers.hpp"

using namespace ristap;

TEST_SUITE_BEGIN("scenario");

TEST_CASE("path_loss reference and scaling") {
  const Real c0 = 1e-3;
  CHECK(path_loss(1.0, 2.7, c0, 1.0) == doctest::Approx(std::sqrt(c0)));
  // One decade with exponent 2 costs a factor 10 in amplitude.
  CHECK(path_loss(10.0, 2.0, c0, 1.0) == doctest::Approx(std::sqrt(c0) / 10.0));
  CHECK_THROWS_AS(path_loss(0.0, 2.0, c0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(path_loss(-3.0, 2.0, c0, 1.0), std::invalid_argument);
}

TEST_CASE("bearings from broadside geometry") {
  const auto cfg = testing::desk_config();
  const Scenario s = build_scenario(cfg);
  // Target sits exactly on the broadside axis.
  CHECK(s.theta_target == doctest::Approx(0.0));
  // Hand-checked trigonometry for an off-axis scatterer.
  ScenarioConfig cfg2 = cfg;
  cfg2.clutter_positions = {{6.0, 55.0}};
  const Scenario s2 = build_scenario(cfg2);
  CHECK(s2.theta_clutter[0] == doctest::Approx(std::atan2(6.0, 55.0)));
}

TEST_CASE("scenario counts follow the configuration") {
  auto cfg = testing::desk_config();
  cfg.n_ris_elements = 25;
  const Scenario s = build_scenario(cfg);
  CHECK(s.config.n_ris == 2);
  CHECK(s.config.n_ris_elements == 25);
  CHECK(static_cast<int>(s.target_paths.size()) == 1 + 3 * cfg.n_ris);
  CHECK(static_cast<int>(s.clutter_paths.size()) ==
        static_cast<int>(cfg.clutter_positions.size()) * (1 + 3 * cfg.n_ris));
  CHECK(s.snapshots >= cfg.n_slots);
}

TEST_CASE("coincident positions are rejected") {
  auto cfg = testing::desk_config();
  cfg.target_position = cfg.bs_position;
  CHECK_THROWS_WITH_AS(build_scenario(cfg), doctest::Contains("degenerate"),
                       std::invalid_argument);
}

TEST_CASE("angles invariant to uniform scaling about the BS") {
  const auto cfg = testing::desk_config();
  const Scenario a = build_scenario(cfg);
  auto scaled = cfg;
  const Real k = 3.7;
  scaled.target_position *= k;
  for (auto& p : scaled.ris_positions) p *= k;
  for (auto& p : scaled.clutter_positions) p *= k;
  for (auto& p : scaled.user_positions) p *= k;
  const Scenario b = build_scenario(scaled);
  CHECK(b.theta_target == doctest::Approx(a.theta_target));
  for (size_t r = 0; r < a.theta_target_ris.size(); ++r) {
    CHECK(b.theta_target_ris[r] == doctest::Approx(a.theta_target_ris[r]));
  }
  for (size_t q = 0; q < a.theta_clutter.size(); ++q) {
    CHECK(b.theta_clutter[q] == doctest::Approx(a.theta_clutter[q]));
  }
}

TEST_CASE("delays match the straight-line oracle and respect monotonicity") {
  const auto cfg = testing::desk_config();
  const Scenario s = build_scenario(cfg);
  // Independent recomputation from leg sums.
  const Real c_ts = kSpeedOfLight * cfg.sampling_interval;
  const Real d_bt = (cfg.target_position - cfg.bs_position).norm();
  CHECK(s.target_paths[0].tau == static_cast<int>(std::llround(2.0 * d_bt / c_ts)));
  for (int r = 0; r < cfg.n_ris; ++r) {
    const Real d_br = (cfg.ris_positions[r] - cfg.bs_position).norm();
    const Real d_rt = (cfg.ris_positions[r] - cfg.target_position).norm();
    const int tau1 = s.target_paths[1 + 3 * r + 0].tau;
    const int tau2 = s.target_paths[1 + 3 * r + 1].tau;
    const int tau3 = s.target_paths[1 + 3 * r + 2].tau;
    CHECK(tau1 == static_cast<int>(std::llround((d_bt + d_rt + d_br) / c_ts)));
    // Out-via-RIS and back-via-RIS traverse the same total length.
    CHECK(tau1 == tau2);
    CHECK(tau3 == static_cast<int>(std::llround(2.0 * (d_br + d_rt) / c_ts)));
  }
  // Delay monotone in path length.
  auto paths = s.target_paths;
  std::sort(paths.begin(), paths.end(),
            [](const auto& a, const auto& b) { return a.length < b.length; });
  for (size_t i = 1; i < paths.size(); ++i) CHECK(paths[i].tau >= paths[i - 1].tau);
}

TEST_CASE("dopplers: projections, zero velocity, antisymmetry") {
  auto cfg = testing::desk_config();
  SUBCASE("static target has zero doppler everywhere") {
    cfg.target_velocity = {0.0, 0.0};
    for (Real fd : path_dopplers(build_scenario(cfg))) CHECK(fd == 0.0);
  }
  SUBCASE("hand-computed projections") {
    cfg.target_velocity = {0.0, 30.0};
    const Scenario s = build_scenario(cfg);
    const Real lambda = kSpeedOfLight / cfg.carrier_freq;
    const Vec2 to_bs = (cfg.bs_position - cfg.target_position).normalized();
    CHECK(s.target_paths[0].doppler ==
          doctest::Approx(2.0 * kPi * 2.0 * cfg.target_velocity.dot(to_bs) / lambda));
    const Vec2 to_ris = (cfg.ris_positions[0] - cfg.target_position).normalized();
    const Real expect_mixed =
        2.0 * kPi * (cfg.target_velocity.dot(to_bs) + cfg.target_velocity.dot(to_ris)) / lambda;
    CHECK(s.target_paths[1].doppler == doctest::Approx(expect_mixed));
    CHECK(s.target_paths[2].doppler == doctest::Approx(expect_mixed));
    CHECK(s.target_paths[3].doppler ==
          doctest::Approx(2.0 * kPi * 2.0 * cfg.target_velocity.dot(to_ris) / lambda));
  }
  SUBCASE("negating the velocity negates the table") {
    cfg.target_velocity = {11.0, -23.0};
    const auto fwd = path_dopplers(build_scenario(cfg));
    cfg.target_velocity = -cfg.target_velocity;
    const auto bwd = path_dopplers(build_scenario(cfg));
    for (size_t i = 0; i < fwd.size(); ++i) CHECK(fwd[i] == doctest::Approx(-bwd[i]));
  }
  SUBCASE("velocity orthogonal to both sight lines") {
    // Place RIS behind the target on the same axis so both unit vectors are
    // vertical; horizontal motion then closes on nothing.
    cfg.ris_positions = {{0.0, 30.0}, {0.0, 20.0}};
    cfg.target_velocity = {40.0, 0.0};
    for (Real fd : path_dopplers(build_scenario(cfg))) CHECK(fd == doctest::Approx(0.0));
  }
}

TEST_CASE("channel sampling: determinism, distinctness, and power scaling") {
  const auto cfg = testing::desk_config();
  const Scenario s = build_scenario(cfg);
  const ChannelSet a = sample_channels(s, 42);
  const ChannelSet b = sample_channels(s, 42);
  const ChannelSet c = sample_channels(s, 43);
  CHECK(a.h_d[0] == b.h_d[0]);
  CHECK(a.G[0] == b.G[0]);
  CHECK(a.target_gains[0] == b.target_gains[0]);
  CHECK(a.h_d[0] != c.h_d[0]);

  // Monte Carlo second moment of h_d entries ~ PL(d) within 5%.
  Real acc = 0.0;
  const int draws = 10000;
  const Real expect =
      std::pow(path_loss(s.dist_bs_user[0], cfg.pathloss.bs_user, cfg.pathloss_ref, cfg.ref_distance), 2);
  for (int t = 0; t < draws; ++t) {
    const ChannelSet ch = sample_channels(s, 1000 + static_cast<std::uint64_t>(t));
    acc += std::norm(ch.h_d[0](0));
  }
  CHECK(acc / draws == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("config invariants rejected with named errors") {
  auto cfg = testing::desk_config();
  cfg.psk_order = 3;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("psk_order"), std::invalid_argument);
  cfg = testing::desk_config();
  cfg.n_slots = 2000000;  // pulse no longer fits in the repetition interval
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("prf"), std::invalid_argument);
  cfg = testing::desk_config();
  cfg.qos_gamma = {10.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
