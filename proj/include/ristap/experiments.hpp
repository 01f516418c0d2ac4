#pragma once

#include <string>
#include <vector>

#include "ristap/config_io.hpp"
#include "ristap/driver.hpp"

namespace ristap {

/// One result line: (sweep point, scheme, seed) plus the quantities every
/// figure draws from.  `param` carries the secondary coordinate where a sweep
/// has one (the probing velocity for the detector curves), else 0.
struct ExperimentRow {
  Real sweep = 0.0;
  Real param = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;
  Real scnr_linear = 0.0;
  Real scnr_db = 0.0;
  Real min_margin = 0.0;
  Real ber = 0.0;
  Real pd = 0.0;
  int iterations = 0;
  Real runtime_s = 0.0;
  std::string status;
};

struct TraceRow {
  Real sweep = 0.0;
  std::string scheme;
  std::uint64_t seed = 0;
  int iteration = 0;
  Real scnr_db = 0.0;
};

struct ExperimentOutput {
  std::vector<ExperimentRow> rows;
  std::vector<TraceRow> traces;  // convergence runs only
  std::vector<std::string> files;
};

/// Scenario for one sweep point.
ScenarioConfig apply_sweep(const ScenarioConfig& base, ExperimentKind kind, Real value);

/// Derived per-purpose seeds so channel, symbol, reflection-phase, and noise
/// draws use disjoint streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

/// Runs the full (sweep x scheme x seed) grid on `jobs` workers, writes the
/// CSV outputs and a gnuplot script into `out_dir`, and returns everything
/// written.  Row order is deterministic regardless of scheduling.
ExperimentOutput run_experiment(const ScenarioConfig& base, const ExperimentSpec& spec,
                                const std::string& out_dir, int jobs,
                                const std::string& profile_name);

/// CSV bodies (used by tests for byte-identity checks).
std::string render_rows_csv(const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows,
                            const std::string& profile_name);

Real median(std::vector<Real> values);

}  // namespace ristap
