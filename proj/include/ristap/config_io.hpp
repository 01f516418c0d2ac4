#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ristap/driver.hpp"
#include "ristap/scenario.hpp"

namespace ristap {

enum class ExperimentKind {
  kConvergence,
  kPowerSweep,
  kRisPositionSweep,
  kRisCountSweep,
  kVelocityMagnitudeSweep,
  kVelocityDirectionSweep,
  kRoc,
  kQosTradeoff,
};

const char* experiment_kind_name(ExperimentKind k);
std::optional<ExperimentKind> experiment_kind_from_name(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kConvergence;
  std::vector<Real> grid;
  std::vector<Scheme> schemes;
  std::vector<std::uint64_t> seeds;
  int ber_noise_draws = 200;
  Real p_fa = 1e-4;
  bool real_timing = false;  // when false, runtime columns are written as 0

  void validate() const;
  bool operator==(const ExperimentSpec&) const = default;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedConfig {
  ScenarioConfig scenario;
  std::optional<ExperimentSpec> experiment;
};

/// Sectioned key/value parser; rejects unknown keys and reports errors with
/// their line number.  The scenario section is fully explicit: every scalar
/// key is required.
ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
ParsedConfig parse_config(const std::string& path);

/// Canonical full-precision rendering; parse(serialize(cfg)) reproduces cfg
/// exactly.
std::string serialize_config(const ScenarioConfig& scenario,
                             const std::optional<ExperimentSpec>& experiment = {});

bool config_equal(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace ristap
