// Experiment harness entry point: validate configs, run sweep experiments,
// and execute the named verification oracles.

#include <cstdio>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "ristap/detection.hpp"
#include "ristap/experiments.hpp"
#include "ristap/oracles.hpp"
#include "ristap/waveform_opt.hpp"
#include "ristap_profiles.hpp"

namespace {

using namespace ristap;

ParsedConfig load_config(const std::string& path, const std::string& profile) {
  ParsedConfig parsed = parse_config(path);
  if (!profile.empty()) {
    const std::string text = profile == "desk" ? kDeskProfileText : kPaperProfileText;
    parsed.scenario = parse_config_text(text, "<profile:" + profile + ">").scenario;
  }
  return parsed;
}

int cmd_validate(const std::string& path) {
  try {
    const ParsedConfig parsed = parse_config(path);
    const Scenario scenario = build_scenario(parsed.scenario);
    std::printf("ok: %s\n", path.c_str());
    std::printf("  N=%d K=%d R=%d Nr=%d M=%d L=%d P=%d\n", parsed.scenario.n_tx_antennas,
                parsed.scenario.n_users, parsed.scenario.n_ris, parsed.scenario.n_ris_elements,
                parsed.scenario.n_pulses, parsed.scenario.n_slots, scenario.snapshots);
    if (parsed.experiment) {
      std::printf("  experiment: %s, %zu grid points, %zu schemes, %zu seeds\n",
                  experiment_kind_name(parsed.experiment->kind), parsed.experiment->grid.size(),
                  parsed.experiment->schemes.size(), parsed.experiment->seeds.size());
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return 1;
  }
}

int cmd_run(const std::string& path, const std::string& profile, const std::string& out_dir,
            int jobs, const std::vector<std::uint64_t>& seed_override) {
  ParsedConfig parsed = load_config(path, profile);
  if (!parsed.experiment) {
    std::fprintf(stderr, "config has no [experiment] section; nothing to run\n");
    return 1;
  }
  if (!seed_override.empty()) parsed.experiment->seeds = seed_override;
  const std::string profile_name = profile.empty() ? "custom" : profile;
  const ExperimentOutput out =
      run_experiment(parsed.scenario, *parsed.experiment, out_dir, jobs, profile_name);
  std::printf("%zu rows\n", out.rows.size());
  for (const auto& f : out.files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int oracle_delays(const ScenarioConfig& cfg) {
  const auto paths = oracles::geometric_paths(cfg);
  std::printf("# straight-line round-trip delays (slot = %g m)\n",
              kSpeedOfLight * cfg.sampling_interval);
  std::printf("%-8s %-4s %-5s %-12s %-6s\n", "scatter", "ris", "kind", "length_m", "tau");
  for (const auto& p : paths) {
    std::printf("%-8s %-4d %-5d %-12.4f %-6d\n", p.clutter < 0 ? "target" : "clutter", p.ris,
                p.kind, p.length_m, p.tau);
  }
  return 0;
}

int oracle_dopplers(const ScenarioConfig& cfg) {
  const auto paths = oracles::geometric_paths(cfg);
  std::printf("# bistatic closing-speed dopplers, v = (%g, %g) m/s\n", cfg.target_velocity.x(),
              cfg.target_velocity.y());
  std::printf("%-4s %-5s %-14s\n", "ris", "kind", "doppler_rad_s");
  for (const auto& p : paths) {
    if (p.clutter >= 0) continue;
    std::printf("%-4d %-5d %-14.4f\n", p.ris, p.kind, p.doppler);
  }
  return 0;
}

int oracle_pathloss(const ScenarioConfig& cfg) {
  std::printf("# amplitude path loss sqrt(C0 (d0/d)^iota), C0=%g d0=%g\n", cfg.pathloss_ref,
              cfg.ref_distance);
  for (Real d : {1.0, 10.0, 50.0, 100.0}) {
    std::printf("d=%-8g direct(%.2f)=%.6e indirect(%.2f)=%.6e\n", d, cfg.pathloss.target_direct,
                path_loss(d, cfg.pathloss.target_direct, cfg.pathloss_ref, cfg.ref_distance),
                cfg.pathloss.target_indirect,
                path_loss(d, cfg.pathloss.target_indirect, cfg.pathloss_ref, cfg.ref_distance));
  }
  return 0;
}

int oracle_detection_mc() {
  std::printf("# coherent detector: closed form vs Monte Carlo (1e6 trials)\n");
  std::printf("%-8s %-10s %-12s %-12s %-10s\n", "scnr", "p_fa", "pd_closed", "pd_mc", "abs_err");
  int fails = 0;
  for (Real scnr : {0.0, 1.0, 4.0, 9.0}) {
    for (Real pfa : {1e-3, 1e-2}) {
      const Real pd = detection_probability(scnr, pfa);
      const Real mc = detection_probability_mc(scnr, pfa, 1000000, 12345);
      const Real err = std::abs(pd - mc);
      if (err > 0.01) ++fails;
      std::printf("%-8g %-10g %-12.6f %-12.6f %-10.2e\n", scnr, pfa, pd, mc, err);
    }
  }
  return fails == 0 ? 0 : 1;
}

int oracle_psi_grid() {
  std::printf("# phase projection vs per-coordinate grid minimization (1e4 points)\n");
  Rng rng(99);
  int fails = 0;
  for (int trial = 0; trial < 5; ++trial) {
    CVector x(6), lambda(6);
    for (int j = 0; j < 6; ++j) {
      x(j) = rng.cgaussian();
      lambda(j) = rng.cgaussian();
    }
    const Real rho = 0.5 + rng.uniform();
    const CVector closed = psi_update(x, lambda, rho, 1.0);
    const CVector grid = oracles::psi_grid_search(x, lambda, rho, 1.0, 10000);
    const Real err = (closed - grid).lpNorm<Eigen::Infinity>();
    if (err > 2.0 * kPi / 10000 + 1e-9) ++fails;
    std::printf("trial %d: max |closed - grid| = %.3e\n", trial, err);
  }
  return fails == 0 ? 0 : 1;
}

int oracle_operator_dense(const ScenarioConfig& cfg) {
  const Scenario scenario = build_scenario(cfg);
  const ChannelSet channels = sample_channels(scenario, 5);
  const StackedModel model(channels);
  if (model.filter_dim() > 4096) {
    std::fprintf(stderr, "scenario too large for dense assembly; use a desk-scale config\n");
    return 1;
  }
  Rng rng(7);
  CVector x(model.waveform_dim()), phi(model.phi_dim());
  for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = rng.cgaussian();
  for (Eigen::Index j = 0; j < phi.size(); ++j) phi(j) = rng.cgaussian();
  const CMatrix ht = oracles::dense_target_operator(model, phi);
  const CMatrix hc = oracles::dense_clutter_operator(model, phi);
  const Real err_t = (model.apply_target(x, phi) - ht * x).norm() / std::max(1e-300, (ht * x).norm());
  const Real err_c = (model.apply_clutter(x, phi) - hc * x).norm() / std::max(1e-300, (hc * x).norm());
  std::printf("target operator vs dense: rel err %.3e\n", err_t);
  std::printf("clutter operator vs dense: rel err %.3e\n", err_c);
  return err_t < 1e-12 && err_c < 1e-12 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time waveform / reflection / filter co-design harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string profile;
  std::string out_dir = "out";
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  std::vector<std::uint64_t> seeds;

  auto* validate = app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("config", config_path, "config file")->required();

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--profile", profile, "replace the scenario with a shipped profile")
      ->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--out-dir", out_dir, "output directory");
  run->add_option("--jobs", jobs, "worker threads");
  run->add_option("--seeds", seeds, "override the seed list")->delimiter(',');

  std::string oracle_name;
  auto* oracle = app.add_subcommand("oracle", "run a named verification oracle");
  oracle->add_option("name", oracle_name, "delays|dopplers|pathloss|detection-mc|psi-grid|operator-dense")
      ->required();
  oracle->add_option("--config", config_path, "config file (defaults to the desk profile)");
  oracle->add_option("--profile", profile, "desk|paper")->check(CLI::IsMember({"desk", "paper"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(config_path);
    if (run->parsed()) return cmd_run(config_path, profile, out_dir, std::max(1, jobs), seeds);
    if (oracle->parsed()) {
      ScenarioConfig cfg;
      if (!config_path.empty()) {
        cfg = load_config(config_path, profile).scenario;
      } else {
        const std::string text = profile == "paper" ? kPaperProfileText : kDeskProfileText;
        cfg = parse_config_text(text, "<profile>").scenario;
      }
      if (oracle_name == "delays") return oracle_delays(cfg);
      if (oracle_name == "dopplers") return oracle_dopplers(cfg);
      if (oracle_name == "pathloss") return oracle_pathloss(cfg);
      if (oracle_name == "detection-mc") return oracle_detection_mc();
      if (oracle_name == "psi-grid") return oracle_psi_grid();
      if (oracle_name == "operator-dense") return oracle_operator_dense(cfg);
      std::fprintf(stderr, "unknown oracle '%s'\n", oracle_name.c_str());
      return 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
