#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ristap/comm_ci.hpp"
#include "ristap/init.hpp"
#include "ristap/ris_opt.hpp"
#include "ristap/scenario.hpp"
#include "ristap/stap_model.hpp"
#include "ristap/waveform_opt.hpp"

namespace ristap {

enum class Scheme { kProposed, kRandomRis, kNoRis, kRadarOnly };

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

struct DriverOptions {
  Scheme scheme = Scheme::kProposed;
  Real outer_tol = 1e-4;   // relative SCNR change
  int outer_max = 50;
  WaveformAdmmOptions waveform;
  ConeQpOptions ris_qp;
  ConeQpOptions init_qp;
  RcgOptions rcg;
  std::uint64_t symbol_seed = 7;
  std::uint64_t scheme_seed = 11;  // random reflection phases
  bool debug_checks = false;       // assert per-stage monotonicity
  bool collect_timing = true;
  /// When set, skip the cold initialization and start the loop from this
  /// design point (used by continuation sweeps; the point must satisfy the
  /// run's own constraints).
  std::optional<DesignVariables> warm_start;
};

enum class RunStatus { kConverged, kMaxOuter, kInfeasibleInit };

const char* run_status_name(RunStatus s);

/// Per-run record: the SCNR trace, feasibility margins, stage bookkeeping,
/// and the final design point.
struct SolverReport {
  RunStatus status = RunStatus::kMaxOuter;
  Scheme scheme = Scheme::kProposed;
  std::vector<Real> scnr_trace;  // entry 0 at initialization, then per outer iteration
  std::vector<Real> eta_trace;
  std::vector<Real> min_margin_trace;
  std::vector<Real> modulus_dev_trace;
  Real final_scnr = 0.0;
  Real final_min_margin = 0.0;
  Real final_modulus_dev = 0.0;
  Real final_phi_max = 0.0;
  Real init_delta = 0.0;
  int outer_iterations = 0;
  int x_rejects = 0;
  int phi_rejects = 0;
  int total_admm_iterations = 0;
  double wall_seconds = 0.0;
  double stage_seconds_x = 0.0, stage_seconds_phi = 0.0, stage_seconds_w = 0.0;
  DesignVariables vars;

  /// Feasible end state: exact-modulus waveform, QoS margins within slack,
  /// amplitudes within the cap.
  bool accepted(Real amplitude) const;
};

/// Block-coordinate solve: initialize reflections (phase-only ascent), the
/// waveform (worst-margin program), the filter and the ratio auxiliary; then
/// cycle waveform / reflections / filter / auxiliary until the SCNR trace
/// flattens.  Every stage keeps its previous block unless the exact objective
/// improves, so the recorded trace is nondecreasing by construction.
SolverReport run_solver(const Scenario& scenario, const ChannelSet& channels,
                        const DriverOptions& options);

SolverReport run_algorithm1(const Scenario& scenario, const ChannelSet& channels,
                            DriverOptions options = {});

SolverReport run_baseline(Scheme scheme, const Scenario& scenario, const ChannelSet& channels,
                          DriverOptions options = {});

/// Copy of `channels` with every reflection surface removed (direct paths and
/// BS-user links only).
ChannelSet strip_ris(const ChannelSet& channels);

}  // namespace ristap
