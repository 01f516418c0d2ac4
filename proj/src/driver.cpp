#include "ristap/driver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "ristap/filter_fp.hpp"

namespace ristap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Real modulus_deviation(const CVector& x, Real amplitude) {
  Real dev = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) dev = std::max(dev, std::abs(std::abs(x(j)) - amplitude));
  return dev;
}

constexpr Real kRadarOnlyGamma = -1e9;

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kProposed: return "proposed";
    case Scheme::kRandomRis: return "random_ris";
    case Scheme::kNoRis: return "no_ris";
    case Scheme::kRadarOnly: return "radar_only";
  }
  return "?";
}

std::optional<Scheme> scheme_from_name(const std::string& name) {
  if (name == "proposed") return Scheme::kProposed;
  if (name == "random_ris") return Scheme::kRandomRis;
  if (name == "no_ris") return Scheme::kNoRis;
  if (name == "radar_only") return Scheme::kRadarOnly;
  return {};
}

const char* run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return "converged";
    case RunStatus::kMaxOuter: return "max_outer";
    case RunStatus::kInfeasibleInit: return "infeasible";
  }
  return "?";
}

bool SolverReport::accepted(Real amplitude) const {
  (void)amplitude;
  return status != RunStatus::kInfeasibleInit && final_modulus_dev <= 1e-6 &&
         final_min_margin >= -1e-5;
}

ChannelSet strip_ris(const ChannelSet& channels) {
  ChannelSet out = channels;
  out.n_ris = 0;
  out.G.clear();
  out.h_r.clear();
  out.theta_target_ris.clear();
  for (auto& row : out.theta_clutter_ris) row.clear();
  std::vector<PathGeometry> tp, cp;
  std::vector<Complex> tg, cg;
  for (size_t i = 0; i < out.target_paths.size(); ++i) {
    if (out.target_paths[i].kind == 0) {
      tp.push_back(out.target_paths[i]);
      tg.push_back(out.target_gains[i]);
    }
  }
  for (size_t i = 0; i < out.clutter_paths.size(); ++i) {
    if (out.clutter_paths[i].kind == 0) {
      cp.push_back(out.clutter_paths[i]);
      cg.push_back(out.clutter_gains[i]);
    }
  }
  out.target_paths = std::move(tp);
  out.clutter_paths = std::move(cp);
  out.target_gains = std::move(tg);
  out.clutter_gains = std::move(cg);
  // The snapshot window keeps the original reference so reports stay
  // comparable across schemes; direct paths always fit inside it.
  return out;
}

SolverReport run_solver(const Scenario& scenario, const ChannelSet& channels_in,
                        const DriverOptions& options) {
  const auto t_start = Clock::now();
  const ScenarioConfig& cfg = scenario.config;
  const Real sigma_r2 = cfg.noise_power_radar;
  const Real amplitude = cfg.slot_amplitude();

  const bool no_ris = options.scheme == Scheme::kNoRis;
  const ChannelSet channels = no_ris ? strip_ris(channels_in) : channels_in;
  const StackedModel model(channels);

  const SymbolBlock symbols = generate_symbols(cfg.n_users, cfg.n_pulses, cfg.n_slots,
                                               cfg.psk_order, options.symbol_seed);
  const CommChannels comm(channels, cfg);
  const std::optional<Real> gamma_override =
      options.scheme == Scheme::kRadarOnly ? std::optional<Real>(kRadarOnlyGamma) : std::nullopt;
  const CiConstraintSet ci(symbols, comm, gamma_override);
  // Every scheme initializes against the true thresholds so that runs on the
  // same channels start from the same design point.
  const CiConstraintSet ci_init(symbols, comm);

  SolverReport report;
  report.scheme = options.scheme;

  // Reflection initialization.
  CVector phi;
  const bool optimize_phi =
      model.phi_dim() > 0 &&
      (options.scheme == Scheme::kProposed || options.scheme == Scheme::kRadarOnly);
  if (model.phi_dim() == 0) {
    phi = CVector();
  } else if (options.scheme == Scheme::kRandomRis) {
    Rng rng(options.scheme_seed);
    phi.resize(model.phi_dim());
    for (Eigen::Index j = 0; j < phi.size(); ++j) phi(j) = cfg.a_max * rng.phase();
  } else {
    phi = initial_phi(model, cfg.a_max, options.rcg);
  }

  CVector x;
  if (options.warm_start) {
    x = options.warm_start->x;
    if (options.warm_start->phi.size() == phi.size()) phi = options.warm_start->phi;
    report.init_delta = ci.margins_x(x, phi).minCoeff();
    if (report.init_delta < -options.waveform.margin_restore_tol) {
      report.status = RunStatus::kInfeasibleInit;
      report.vars = {x, phi, CVector()};
      report.wall_seconds = seconds_since(t_start);
      return report;
    }
  } else {
    // Waveform initialization: worst-margin program at the fixed reflections.
    const InitXResult x0 = init_x(ci_init, phi, amplitude, options.init_qp);
    report.init_delta = x0.delta;
    if (!x0.feasible) {
      report.status = RunStatus::kInfeasibleInit;
      report.vars = {x0.x, phi, CVector()};
      report.wall_seconds = seconds_since(t_start);
      return report;
    }
    x = x0.x;
  }

  // Bring the (relaxed-amplitude) initial waveform onto the modulus sphere
  // with its margins intact, so every trace entry refers to a legal design.
  // Warm starts arrive on the sphere already and are used as-is.
  if (!options.warm_start) {
    const auto hs_src = ci_init.x_halfspaces(phi);
    std::vector<Halfspace> hs;
    hs.reserve(hs_src.size());
    for (const auto& h : hs_src) hs.push_back({h.offset, h.a, h.gamma});

    const CVector legal = sphere_margin_ascent(x, hs, amplitude);
    Real worst = std::numeric_limits<Real>::infinity();
    for (const auto& h : hs) {
      worst = std::min(worst, std::real(h.a.dot(legal.segment(h.offset, h.a.size()))) - h.rhs);
    }
    if (worst < -options.waveform.margin_restore_tol && !gamma_override) {
      report.status = RunStatus::kInfeasibleInit;
      report.vars = {x, phi, CVector()};
      report.wall_seconds = seconds_since(t_start);
      return report;
    }
    x = legal;
  }
  CVector w = mvdr_filter(model, x, phi, sigma_r2);
  Real eta = dinkelbach_eta(model, x, phi, w, sigma_r2);

  AdmmState admm = AdmmState::initialize(x, amplitude);
  report.scnr_trace.push_back(eta);
  report.eta_trace.push_back(eta);
  report.min_margin_trace.push_back(ci.margins_x(x, phi).minCoeff());
  report.modulus_dev_trace.push_back(modulus_deviation(x, amplitude));

  RunStatus status = RunStatus::kMaxOuter;
  for (int outer = 1; outer <= options.outer_max; ++outer) {
    report.outer_iterations = outer;

    // Waveform stage: majorize at the current iterate, split to consensus,
    // accept only if the exact objective (and hence the SCNR at fixed w, eta)
    // did not degrade.
    {
      const auto t0 = Clock::now();
      const WaveformSurrogate surr =
          waveform_surrogate(model, x, w, phi, eta, sigma_r2);
      const auto halfspaces_src = ci.x_halfspaces(phi);
      std::vector<Halfspace> halfspaces;
      halfspaces.reserve(halfspaces_src.size());
      for (const auto& h : halfspaces_src) halfspaces.push_back({h.offset, h.a, h.gamma});

      AdmmState trial = admm;
      const WaveformRoundResult round =
          run_waveform_round(surr, halfspaces, amplitude, trial, options.waveform);
      report.total_admm_iterations += round.admm_iterations;

      const Real f1_prev = surr.f1(x);
      const Real scnr_prev = model.scnr(x, phi, w, sigma_r2);

      auto min_margin_of = [&](const CVector& cand) {
        Real worst = std::numeric_limits<Real>::infinity();
        for (const auto& h : halfspaces) {
          worst = std::min(worst,
                           std::real(h.a.dot(cand.segment(h.offset, h.a.size()))) - h.rhs);
        }
        return halfspaces.empty() ? Real(0.0) : worst;
      };

      // The consensus point plus extrapolations along the move, re-projected
      // to the modulus sphere; every candidate is vetted against the exact
      // surrogate objective and the QoS margins.
      CVector best_x = round.x;
      Real best_f1 = surr.f1(round.x);
      bool have_candidate = round.status != WaveformStatus::kInfeasible &&
                            round.min_ci_margin >= -options.waveform.margin_restore_tol;
      if (have_candidate) {
        const CVector zero = CVector::Zero(x.size());
        for (Real t : {2.0, 4.0, 8.0}) {
          const CVector cand =
              psi_update((x + t * (round.x - x)).eval(), zero, 1.0, amplitude);
          if (min_margin_of(cand) < -options.waveform.margin_restore_tol) continue;
          const Real f1_cand = surr.f1(cand);
          if (f1_cand < best_f1) {
            best_f1 = f1_cand;
            best_x = cand;
          }
        }
      }

      const Real scnr_new =
          have_candidate ? model.scnr(best_x, phi, w, sigma_r2) : scnr_prev;
      const bool improves = have_candidate && best_f1 <= f1_prev && scnr_new >= scnr_prev;
      if (improves) {
        if (best_x != round.x) {
          trial.x = best_x;
          trial.psi = best_x;
        }
        x = best_x;
        admm = trial;
      } else {
        ++report.x_rejects;
        admm = AdmmState::initialize(x, amplitude);
      }
      if (options.debug_checks && have_candidate &&
          best_f1 > f1_prev + 1e-6 * std::max(Real(1.0), std::abs(f1_prev))) {
        throw std::logic_error("waveform stage produced a meaningfully worse step");
      }
      report.stage_seconds_x += seconds_since(t0);
    }

    // Reflection stage: one majorizer + QP; the solve itself refuses
    // objective-increasing steps.
    if (optimize_phi) {
      const auto t0 = Clock::now();
      const FMatrices f = build_F_matrices(model, x);
      const RisTerms terms = assemble_f2_terms(f, model, w, x, eta, sigma_r2);
      const auto phi_form = ci.phi_form(x);
      const Real scnr_prev = model.scnr(x, phi, w, sigma_r2);
      const RisQpResult rres = ris_step(terms, phi_form, phi, cfg.a_max, options.ris_qp,
                                        options.waveform.margin_restore_tol);
      if (rres.accepted) {
        const Real scnr_new = model.scnr(x, rres.phi, w, sigma_r2);
        const Real margin_new = ci.margins_x(x, rres.phi).minCoeff();
        if (scnr_new >= scnr_prev && margin_new >= -options.waveform.margin_restore_tol) {
          phi = rres.phi;
        } else {
          ++report.phi_rejects;
        }
      } else {
        ++report.phi_rejects;
      }
      report.stage_seconds_phi += seconds_since(t0);
    }

    // Filter stage: closed form is optimal; keep the old filter on the (fp)
    // off chance the closed form evaluates worse.
    {
      const auto t0 = Clock::now();
      const CVector w_new = mvdr_filter(model, x, phi, sigma_r2);
      const Real scnr_old = model.scnr(x, phi, w, sigma_r2);
      const Real scnr_new = model.scnr(x, phi, w_new, sigma_r2);
      if (options.debug_checks && scnr_new < scnr_old * (1.0 - 1e-9) - 1e-15) {
        throw std::logic_error("filter stage decreased the SCNR");
      }
      if (scnr_new >= scnr_old) w = w_new;
      report.stage_seconds_w += seconds_since(t0);
    }

    // Ratio auxiliary: the new SCNR; nondecreasing by the stage safeguards.
    const Real eta_new = dinkelbach_eta(model, x, phi, w, sigma_r2);
    report.scnr_trace.push_back(eta_new);
    report.eta_trace.push_back(eta_new);
    report.min_margin_trace.push_back(ci.margins_x(x, phi).minCoeff());
    report.modulus_dev_trace.push_back(modulus_deviation(x, amplitude));
    if (options.debug_checks && eta_new + 1e-12 < eta) {
      throw std::logic_error("outer iteration decreased the SCNR trace");
    }

    const Real rel_change = std::abs(eta_new - eta) / std::max(eta, Real(1e-300));
    eta = eta_new;
    if (rel_change <= options.outer_tol) {
      status = RunStatus::kConverged;
      break;
    }
  }

  report.status = status;
  report.vars = {x, phi, w};
  report.final_scnr = eta;
  report.final_min_margin = report.min_margin_trace.back();
  report.final_modulus_dev = report.modulus_dev_trace.back();
  report.final_phi_max = phi.size() > 0 ? phi.cwiseAbs().maxCoeff() : 0.0;
  report.wall_seconds = seconds_since(t_start);
  return report;
}

SolverReport run_algorithm1(const Scenario& scenario, const ChannelSet& channels,
                            DriverOptions options) {
  options.scheme = Scheme::kProposed;
  return run_solver(scenario, channels, options);
}

SolverReport run_baseline(Scheme scheme, const Scenario& scenario, const ChannelSet& channels,
                          DriverOptions options) {
  options.scheme = scheme;
  return run_solver(scenario, channels, options);
}

}  // namespace ristap
