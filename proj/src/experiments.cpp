#include "ristap/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "ristap/detection.hpp"

#ifndef RISTAP_GIT_DESCRIBE
#define RISTAP_GIT_DESCRIBE "unknown"
#endif

namespace ristap {

namespace {

std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Velocities probed by the detector-curve experiment (m/s, radial).
constexpr Real kRocVelocities[] = {0.0, 30.0, 60.0};

struct Task {
  Real sweep = 0.0;   // grid value (or velocity for the detector curves)
  Scheme scheme = Scheme::kProposed;
  std::uint64_t seed = 0;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
  // splitmix64 over the (seed, purpose) pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (purpose + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ScenarioConfig apply_sweep(const ScenarioConfig& base, ExperimentKind kind, Real value) {
  ScenarioConfig cfg = base;
  switch (kind) {
    case ExperimentKind::kConvergence:
      cfg.a_max = value;
      break;
    case ExperimentKind::kPowerSweep:
      cfg.total_power = value;
      break;
    case ExperimentKind::kRisPositionSweep:
      for (auto& p : cfg.ris_positions) p.y() = value;
      break;
    case ExperimentKind::kRisCountSweep: {
      const int count = static_cast<int>(value);
      if (count < 0 || count > static_cast<int>(base.ris_positions.size())) {
        throw ConfigError("ris_count_sweep: grid value exceeds configured RIS positions");
      }
      cfg.n_ris = count;
      cfg.ris_positions.assign(base.ris_positions.begin(), base.ris_positions.begin() + count);
      break;
    }
    case ExperimentKind::kVelocityMagnitudeSweep:
      cfg.target_velocity = Vec2(0.0, value);
      break;
    case ExperimentKind::kVelocityDirectionSweep: {
      const Real rad = value * kPi / 180.0;
      const Real speed = 30.0;
      cfg.target_velocity = Vec2(speed * std::cos(rad), speed * std::sin(rad));
      break;
    }
    case ExperimentKind::kRoc:
      cfg.target_velocity = Vec2(0.0, value);  // value is the probing velocity
      break;
    case ExperimentKind::kQosTradeoff:
      cfg.qos_gamma.assign(static_cast<size_t>(cfg.n_users), db_to_linear(value));
      break;
  }
  return cfg;
}

Real median(std::vector<Real> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string render_rows_csv(const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows,
                            const std::string& profile_name) {
  std::ostringstream o;
  o << "# ristap experiment: " << experiment_kind_name(spec.kind) << "\n";
  o << "# git: " << RISTAP_GIT_DESCRIBE << "\n";
  o << "# profile: " << profile_name << "\n";
  o << "# seeds:";
  for (auto s : spec.seeds) o << " " << s;
  o << "\n# schemes:";
  for (auto s : spec.schemes) o << " " << scheme_name(s);
  o << "\n";
  o << "# columns: sweep,param,scheme,seed,scnr_linear,scnr_db,min_ci_margin,ber,pd,iterations,"
       "runtime_s,status\n";
  for (const auto& r : rows) {
    o << fmt(r.sweep) << "," << fmt(r.param) << "," << r.scheme << "," << r.seed << ","
      << fmt(r.scnr_linear) << "," << fmt(r.scnr_db) << "," << fmt(r.min_margin) << ","
      << fmt(r.ber) << "," << fmt(r.pd) << "," << r.iterations << "," << fmt(r.runtime_s) << ","
      << r.status << "\n";
  }
  return o.str();
}

namespace {

std::string render_traces_csv(const std::vector<TraceRow>& traces) {
  std::ostringstream o;
  o << "# columns: sweep,scheme,seed,iteration,scnr_db\n";
  for (const auto& t : traces) {
    o << fmt(t.sweep) << "," << t.scheme << "," << t.seed << "," << t.iteration << ","
      << fmt(t.scnr_db) << "\n";
  }
  return o.str();
}

std::string render_median_csv(const std::vector<ExperimentRow>& rows) {
  std::map<std::pair<std::pair<Real, Real>, std::string>, std::vector<const ExperimentRow*>> groups;
  for (const auto& r : rows) groups[{{r.sweep, r.param}, r.scheme}].push_back(&r);
  std::ostringstream o;
  o << "# columns: sweep,param,scheme,scnr_db_median,ber_median,pd_median\n";
  for (const auto& [key, group] : groups) {
    std::vector<Real> scnr, ber, pd;
    for (const auto* r : group) {
      scnr.push_back(r->scnr_db);
      ber.push_back(r->ber);
      pd.push_back(r->pd);
    }
    o << fmt(key.first.first) << "," << fmt(key.first.second) << "," << key.second << ","
      << fmt(median(scnr)) << "," << fmt(median(ber)) << "," << fmt(median(pd)) << "\n";
  }
  return o.str();
}

std::string render_gnuplot(const ExperimentSpec& spec, const std::string& stem) {
  std::ostringstream o;
  const std::string kind = experiment_kind_name(spec.kind);
  o << "# gnuplot script generated by ristap; run: gnuplot " << stem << ".gnuplot\n";
  o << "set datafile separator ','\n";
  o << "set datafile commentschars '#'\n";
  o << "set key bottom right\n";
  o << "set grid\n";
  o << "set term pngcairo size 900,600\n";
  o << "set output '" << stem << ".png'\n";
  if (spec.kind == ExperimentKind::kConvergence) {
    o << "set xlabel 'outer iteration'\n";
    o << "set ylabel 'SCNR (dB)'\n";
    o << "plot \\\n";
    bool first = true;
    for (Real g : spec.grid) {
      if (!first) o << ", \\\n";
      first = false;
      o << "  '" << stem << "_traces.csv' using 4:(strcol(2) eq 'proposed' && $1 == " << fmt(g)
        << " ? $5 : 1/0) with linespoints title 'a_{max}=" << fmt(g) << "'";
    }
    o << "\n";
    return o.str();
  }
  if (spec.kind == ExperimentKind::kRoc) {
    o << "set logscale x\n";
    o << "set xlabel 'false alarm probability'\n";
    o << "set ylabel 'detection probability'\n";
    o << "plot \\\n";
    bool first = true;
    for (Scheme s : spec.schemes) {
      for (Real v : kRocVelocities) {
        if (!first) o << ", \\\n";
        first = false;
        o << "  '" << stem << "_median.csv' using 1:(strcol(3) eq '" << scheme_name(s)
          << "' && $2 == " << fmt(v) << " ? $6 : 1/0) with linespoints title '" << scheme_name(s)
          << " v=" << fmt(v) << "'";
      }
    }
    o << "\n";
    return o.str();
  }
  const char* xlabel = kind.c_str();
  const bool ber_axis = spec.kind == ExperimentKind::kQosTradeoff;
  o << "set xlabel '" << xlabel << "'\n";
  o << "set ylabel 'SCNR (dB)'\n";
  if (ber_axis) {
    o << "set y2label 'BER'\n";
    o << "set logscale y2\n";
    o << "set y2tics\n";
  }
  o << "plot \\\n";
  bool first = true;
  for (Scheme s : spec.schemes) {
    if (!first) o << ", \\\n";
    first = false;
    o << "  '" << stem << "_median.csv' using 1:(strcol(3) eq '" << scheme_name(s)
      << "' ? $4 : 1/0) with linespoints title '" << scheme_name(s) << " SCNR'";
    if (ber_axis) {
      o << ", \\\n  '" << stem << "_median.csv' using 1:(strcol(3) eq '" << scheme_name(s)
        << "' ? $5 : 1/0) axes x1y2 with linespoints dt 2 title '" << scheme_name(s) << " BER'";
    }
  }
  o << "\n";
  return o.str();
}

}  // namespace

ExperimentOutput run_experiment(const ScenarioConfig& base, const ExperimentSpec& spec,
                                const std::string& out_dir, int jobs,
                                const std::string& profile_name) {
  spec.validate();
  const bool roc = spec.kind == ExperimentKind::kRoc;
  const bool continuation = spec.kind == ExperimentKind::kQosTradeoff;

  std::vector<Task> tasks;
  if (continuation) {
    // One chained task per (scheme, seed); the grid is swept inside, tightest
    // threshold first, warm-starting each point from the previous solution.
    for (Scheme scheme : spec.schemes) {
      for (auto seed : spec.seeds) tasks.push_back({0.0, scheme, seed});
    }
  } else {
    const std::vector<Real> points =
        roc ? std::vector<Real>(std::begin(kRocVelocities), std::end(kRocVelocities)) : spec.grid;
    for (Real point : points) {
      for (Scheme scheme : spec.schemes) {
        for (auto seed : spec.seeds) tasks.push_back({point, scheme, seed});
      }
    }
  }

  std::vector<std::vector<ExperimentRow>> row_chunks(tasks.size());
  std::vector<std::vector<TraceRow>> trace_chunks(tasks.size());
  std::atomic<size_t> next{0};

  auto run_point = [&](size_t chunk, Real sweep_value, Scheme scheme, std::uint64_t seed,
                       const std::optional<DesignVariables>& warm) -> SolverReport {
    const ScenarioConfig cfg = apply_sweep(base, spec.kind, sweep_value);
    const Scenario scenario = build_scenario(cfg);
    const ChannelSet channels = sample_channels(scenario, derive_seed(seed, 0));

    DriverOptions opts;
    opts.scheme = scheme;
    opts.symbol_seed = derive_seed(seed, 1);
    opts.scheme_seed = derive_seed(seed, 2);
    opts.warm_start = warm;
    const SolverReport report = run_solver(scenario, channels, opts);

    ExperimentRow row;
    row.sweep = sweep_value;
    row.param = 0.0;
    row.scheme = scheme_name(scheme);
    row.seed = seed;
    row.scnr_linear = report.final_scnr;
    row.scnr_db = report.final_scnr > 0.0 ? linear_to_db(report.final_scnr) : -999.0;
    row.min_margin = report.final_min_margin;
    row.iterations = report.outer_iterations;
    row.runtime_s = spec.real_timing ? report.wall_seconds : 0.0;
    row.status = report.status == RunStatus::kInfeasibleInit
                     ? "infeasible"
                     : (report.accepted(cfg.slot_amplitude()) ? run_status_name(report.status)
                                                              : "flagged");
    if (report.status != RunStatus::kInfeasibleInit) {
      const ChannelSet stripped = scheme == Scheme::kNoRis ? strip_ris(channels) : channels;
      const CommChannels comm(stripped, cfg);
      const SymbolBlock symbols = generate_symbols(cfg.n_users, cfg.n_pulses, cfg.n_slots,
                                                   cfg.psk_order, opts.symbol_seed);
      const RVector ber = ber_monte_carlo(report.vars.x, report.vars.phi, symbols, comm,
                                          spec.ber_noise_draws, derive_seed(seed, 3));
      row.ber = ber.mean();
    } else {
      row.ber = 1.0;
    }

    if (roc) {
      row.param = sweep_value;  // velocity
      for (Real pfa : spec.grid) {
        ExperimentRow r = row;
        r.sweep = pfa;
        r.pd = report.final_scnr > 0.0 ? detection_probability(report.final_scnr, pfa) : pfa;
        row_chunks[chunk].push_back(r);
      }
    } else {
      row.pd = report.final_scnr > 0.0 ? detection_probability(report.final_scnr, spec.p_fa)
                                       : spec.p_fa;
      row_chunks[chunk].push_back(row);
    }
    if (spec.kind == ExperimentKind::kConvergence) {
      for (size_t it = 0; it < report.scnr_trace.size(); ++it) {
        TraceRow t;
        t.sweep = sweep_value;
        t.scheme = scheme_name(scheme);
        t.seed = seed;
        t.iteration = static_cast<int>(it);
        t.scnr_db = report.scnr_trace[it] > 0.0 ? linear_to_db(report.scnr_trace[it]) : -999.0;
        trace_chunks[chunk].push_back(t);
      }
    }
    return report;
  };

  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      if (continuation) {
        std::vector<Real> grid = spec.grid;
        std::sort(grid.begin(), grid.end(), std::greater<Real>());
        std::optional<DesignVariables> warm;
        for (Real g : grid) {
          const SolverReport rep = run_point(i, g, task.scheme, task.seed, warm);
          if (rep.status != RunStatus::kInfeasibleInit) warm = rep.vars;
        }
      } else {
        run_point(i, task.sweep, task.scheme, task.seed, {});
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  ExperimentOutput out;
  for (auto& chunk : row_chunks) {
    out.rows.insert(out.rows.end(), chunk.begin(), chunk.end());
  }
  for (auto& chunk : trace_chunks) {
    out.traces.insert(out.traces.end(), chunk.begin(), chunk.end());
  }
  auto row_key = [](const ExperimentRow& r) {
    return std::make_tuple(r.sweep, r.param, r.scheme, r.seed);
  };
  std::sort(out.rows.begin(), out.rows.end(),
            [&](const auto& a, const auto& b) { return row_key(a) < row_key(b); });
  std::sort(out.traces.begin(), out.traces.end(), [](const auto& a, const auto& b) {
    return std::tie(a.sweep, a.scheme, a.seed, a.iteration) <
           std::tie(b.sweep, b.scheme, b.seed, b.iteration);
  });

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem = (fs::path(out_dir) / experiment_kind_name(spec.kind)).string();

  auto write_file = [&](const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
    out.files.push_back(path);
  };
  write_file(stem + ".csv", render_rows_csv(spec, out.rows, profile_name));
  write_file(stem + "_median.csv", render_median_csv(out.rows));
  if (spec.kind == ExperimentKind::kConvergence) {
    write_file(stem + "_traces.csv", render_traces_csv(out.traces));
  }
  write_file(stem + ".gnuplot", render_gnuplot(spec, stem));
  return out;
}

}  // namespace ristap
