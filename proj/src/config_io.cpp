#include "ristap/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ristap {

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kPowerSweep: return "power_sweep";
    case ExperimentKind::kRisPositionSweep: return "ris_position_sweep";
    case ExperimentKind::kRisCountSweep: return "ris_count_sweep";
    case ExperimentKind::kVelocityMagnitudeSweep: return "velocity_magnitude_sweep";
    case ExperimentKind::kVelocityDirectionSweep: return "velocity_direction_sweep";
    case ExperimentKind::kRoc: return "roc";
    case ExperimentKind::kQosTradeoff: return "qos_tradeoff";
  }
  return "?";
}

std::optional<ExperimentKind> experiment_kind_from_name(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ExperimentKind::kQosTradeoff); ++k) {
    if (name == experiment_kind_name(static_cast<ExperimentKind>(k))) {
      return static_cast<ExperimentKind>(k);
    }
  }
  return {};
}

void ExperimentSpec::validate() const {
  if (grid.empty()) throw ConfigError("experiment: grid must be nonempty");
  if (schemes.empty()) throw ConfigError("experiment: schemes must be nonempty");
  if (seeds.empty()) throw ConfigError("experiment: seeds must be nonempty");
  std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
  if (uniq.size() != seeds.size()) throw ConfigError("experiment: seeds must be distinct");
  if (ber_noise_draws < 1) throw ConfigError("experiment: ber_noise_draws must be >= 1");
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw ConfigError("experiment: p_fa must be in (0,1)");
}

namespace {

struct Line {
  int number = 0;
  std::string section;
  std::string key;
  std::string value;
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

std::vector<Line> tokenize(const std::string& text, const std::string& origin) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(origin, number, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) fail(origin, number, "empty section name");
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(origin, number, "expected 'key = value'");
    Line l;
    l.number = number;
    l.section = section;
    l.key = trim(s.substr(0, eq));
    l.value = trim(s.substr(eq + 1));
    if (l.key.empty()) fail(origin, number, "empty key");
    if (section.empty()) fail(origin, number, "key '" + l.key + "' outside any section");
    lines.push_back(std::move(l));
  }
  return lines;
}

Real parse_real(const Line& l, const std::string& origin) {
  try {
    size_t pos = 0;
    const Real v = std::stod(l.value, &pos);
    if (pos != l.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(origin, l.number, "key '" + l.key + "': expected a number, got '" + l.value + "'");
  }
}

long long parse_int(const Line& l, const std::string& origin) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(l.value, &pos);
    if (pos != l.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(origin, l.number, "key '" + l.key + "': expected an integer, got '" + l.value + "'");
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<Real> parse_real_list(const Line& l, const std::string& origin) {
  std::vector<Real> out;
  for (const auto& tok : split_ws(l.value)) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument("");
    } catch (...) {
      fail(origin, l.number, "key '" + l.key + "': bad list entry '" + tok + "'");
    }
  }
  return out;
}

Vec2 parse_pair(const Line& l, const std::string& origin) {
  const auto v = parse_real_list(l, origin);
  if (v.size() != 2) fail(origin, l.number, "key '" + l.key + "': expected two coordinates");
  return {v[0], v[1]};
}

std::vector<Vec2> parse_pair_list(const Line& l, const std::string& origin) {
  std::vector<Vec2> out;
  std::stringstream in(l.value);
  std::string chunk;
  while (std::getline(in, chunk, ';')) {
    chunk = trim(chunk);
    if (chunk.empty()) continue;
    Line sub = l;
    sub.value = chunk;
    out.push_back(parse_pair(sub, origin));
  }
  return out;
}

std::string fmt(Real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_pair(const Vec2& v) { return fmt(v.x()) + " " + fmt(v.y()); }

}  // namespace

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
  const auto lines = tokenize(text, origin);

  ParsedConfig out;
  ScenarioConfig& sc = out.scenario;
  sc.qos_gamma.clear();
  sc.ris_positions.clear();
  sc.clutter_positions.clear();
  sc.user_positions.clear();

  std::set<std::string> seen;
  bool have_experiment = false;
  ExperimentSpec spec;

  auto mark = [&](const Line& l) {
    const std::string full = l.section + "/" + l.key;
    if (!seen.insert(full).second) fail(origin, l.number, "duplicate key '" + l.key + "'");
  };

  for (const auto& l : lines) {
    mark(l);
    if (l.section == "scenario") {
      if (l.key == "n_tx_antennas") sc.n_tx_antennas = static_cast<int>(parse_int(l, origin));
      else if (l.key == "n_users") sc.n_users = static_cast<int>(parse_int(l, origin));
      else if (l.key == "n_ris") sc.n_ris = static_cast<int>(parse_int(l, origin));
      else if (l.key == "n_ris_elements") sc.n_ris_elements = static_cast<int>(parse_int(l, origin));
      else if (l.key == "n_pulses") sc.n_pulses = static_cast<int>(parse_int(l, origin));
      else if (l.key == "n_slots") sc.n_slots = static_cast<int>(parse_int(l, origin));
      else if (l.key == "prf") sc.prf = parse_real(l, origin);
      else if (l.key == "carrier_freq") sc.carrier_freq = parse_real(l, origin);
      else if (l.key == "sampling_interval") sc.sampling_interval = parse_real(l, origin);
      else if (l.key == "total_power") sc.total_power = parse_real(l, origin);
      else if (l.key == "a_max") sc.a_max = parse_real(l, origin);
      else if (l.key == "qos_gamma") sc.qos_gamma = parse_real_list(l, origin);
      else if (l.key == "qos_gamma_db") {
        sc.qos_gamma.clear();
        for (Real db : parse_real_list(l, origin)) sc.qos_gamma.push_back(db_to_linear(db));
      } else if (l.key == "noise_power_radar") sc.noise_power_radar = parse_real(l, origin);
      else if (l.key == "noise_power_user") sc.noise_power_user = parse_real(l, origin);
      else if (l.key == "psk_order") sc.psk_order = static_cast<int>(parse_int(l, origin));
      else if (l.key == "rng_seed") sc.rng_seed = static_cast<std::uint64_t>(parse_int(l, origin));
      else if (l.key == "ris_channel_model") {
        if (l.value == "rayleigh") sc.ris_channel_model = RisChannelModel::kRayleigh;
        else if (l.value == "steered") sc.ris_channel_model = RisChannelModel::kSteered;
        else fail(origin, l.number, "key 'ris_channel_model': expected rayleigh|steered");
      } else fail(origin, l.number, "unknown key '" + l.key + "' in section [scenario]");
    } else if (l.section == "scenario.positions") {
      if (l.key == "bs") sc.bs_position = parse_pair(l, origin);
      else if (l.key == "target") sc.target_position = parse_pair(l, origin);
      else if (l.key == "target_velocity") sc.target_velocity = parse_pair(l, origin);
      else if (l.key == "ris") sc.ris_positions = parse_pair_list(l, origin);
      else if (l.key == "clutter") sc.clutter_positions = parse_pair_list(l, origin);
      else if (l.key == "users") sc.user_positions = parse_pair_list(l, origin);
      else fail(origin, l.number, "unknown key '" + l.key + "' in section [scenario.positions]");
    } else if (l.section == "scenario.pathloss") {
      if (l.key == "target_direct") sc.pathloss.target_direct = parse_real(l, origin);
      else if (l.key == "target_indirect") sc.pathloss.target_indirect = parse_real(l, origin);
      else if (l.key == "clutter_direct") sc.pathloss.clutter_direct = parse_real(l, origin);
      else if (l.key == "clutter_indirect") sc.pathloss.clutter_indirect = parse_real(l, origin);
      else if (l.key == "bs_user") sc.pathloss.bs_user = parse_real(l, origin);
      else if (l.key == "ris_user") sc.pathloss.ris_user = parse_real(l, origin);
      else if (l.key == "bs_ris") sc.pathloss.bs_ris = parse_real(l, origin);
      else if (l.key == "ref_gain") sc.pathloss_ref = parse_real(l, origin);
      else if (l.key == "ref_gain_db") sc.pathloss_ref = db_to_linear(parse_real(l, origin));
      else if (l.key == "ref_distance") sc.ref_distance = parse_real(l, origin);
      else fail(origin, l.number, "unknown key '" + l.key + "' in section [scenario.pathloss]");
    } else if (l.section == "experiment") {
      have_experiment = true;
      if (l.key == "kind") {
        const auto k = experiment_kind_from_name(l.value);
        if (!k) fail(origin, l.number, "key 'kind': unknown experiment '" + l.value + "'");
        spec.kind = *k;
      } else if (l.key == "grid") spec.grid = parse_real_list(l, origin);
      else if (l.key == "schemes") {
        spec.schemes.clear();
        for (const auto& tok : split_ws(l.value)) {
          const auto s = scheme_from_name(tok);
          if (!s) fail(origin, l.number, "key 'schemes': unknown scheme '" + tok + "'");
          spec.schemes.push_back(*s);
        }
      } else if (l.key == "seeds") {
        spec.seeds.clear();
        for (Real v : parse_real_list(l, origin)) spec.seeds.push_back(static_cast<std::uint64_t>(v));
      } else if (l.key == "ber_noise_draws") spec.ber_noise_draws = static_cast<int>(parse_int(l, origin));
      else if (l.key == "p_fa") spec.p_fa = parse_real(l, origin);
      else if (l.key == "timing") {
        if (l.value == "real") spec.real_timing = true;
        else if (l.value == "none") spec.real_timing = false;
        else fail(origin, l.number, "key 'timing': expected real|none");
      } else fail(origin, l.number, "unknown key '" + l.key + "' in section [experiment]");
    } else {
      fail(origin, l.number, "unknown section [" + l.section + "]");
    }
  }

  // Required keys: the whole scenario is explicit.
  static const char* kRequiredScenario[] = {
      "n_tx_antennas", "n_users", "n_ris", "n_ris_elements", "n_pulses", "n_slots", "prf",
      "carrier_freq",  "sampling_interval", "total_power", "a_max", "noise_power_radar",
      "noise_power_user", "psk_order", "rng_seed"};
  for (const char* key : kRequiredScenario) {
    if (!seen.count(std::string("scenario/") + key)) {
      throw ConfigError(origin + ": missing required key '" + key + "' in section [scenario]");
    }
  }
  if (!seen.count("scenario/qos_gamma") && !seen.count("scenario/qos_gamma_db")) {
    throw ConfigError(origin + ": missing required key 'qos_gamma' (or 'qos_gamma_db')");
  }
  for (const char* key : {"bs", "target", "target_velocity", "users"}) {
    if (!seen.count(std::string("scenario.positions/") + key)) {
      throw ConfigError(origin + ": missing required key '" + std::string(key) +
                        "' in section [scenario.positions]");
    }
  }
  if (sc.n_ris > 0 && !seen.count("scenario.positions/ris")) {
    throw ConfigError(origin + ": missing required key 'ris' in section [scenario.positions]");
  }
  for (const char* key : {"target_direct", "target_indirect", "clutter_direct", "clutter_indirect",
                          "bs_user", "ris_user", "bs_ris", "ref_distance"}) {
    if (!seen.count(std::string("scenario.pathloss/") + key)) {
      throw ConfigError(origin + ": missing required key '" + std::string(key) +
                        "' in section [scenario.pathloss]");
    }
  }
  if (!seen.count("scenario.pathloss/ref_gain") && !seen.count("scenario.pathloss/ref_gain_db")) {
    throw ConfigError(origin + ": missing required key 'ref_gain' (or 'ref_gain_db')");
  }

  // Broadcast a single QoS value across users.
  if (static_cast<int>(sc.qos_gamma.size()) == 1 && sc.n_users > 1) {
    sc.qos_gamma.assign(static_cast<size_t>(sc.n_users), sc.qos_gamma[0]);
  }

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (have_experiment) {
    static const char* kRequiredExperiment[] = {"kind", "grid", "schemes", "seeds"};
    for (const char* key : kRequiredExperiment) {
      if (!seen.count(std::string("experiment/") + key)) {
        throw ConfigError(origin + ": missing required key '" + std::string(key) +
                          "' in section [experiment]");
      }
    }
    spec.validate();
    out.experiment = spec;
  }
  return out;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string serialize_config(const ScenarioConfig& sc,
                             const std::optional<ExperimentSpec>& experiment) {
  std::ostringstream o;
  o << "[scenario]\n";
  o << "n_tx_antennas = " << sc.n_tx_antennas << "\n";
  o << "n_users = " << sc.n_users << "\n";
  o << "n_ris = " << sc.n_ris << "\n";
  o << "n_ris_elements = " << sc.n_ris_elements << "\n";
  o << "n_pulses = " << sc.n_pulses << "\n";
  o << "n_slots = " << sc.n_slots << "\n";
  o << "prf = " << fmt(sc.prf) << "\n";
  o << "carrier_freq = " << fmt(sc.carrier_freq) << "\n";
  o << "sampling_interval = " << fmt(sc.sampling_interval) << "\n";
  o << "total_power = " << fmt(sc.total_power) << "\n";
  o << "a_max = " << fmt(sc.a_max) << "\n";
  o << "qos_gamma =";
  for (Real g : sc.qos_gamma) o << " " << fmt(g);
  o << "\n";
  o << "noise_power_radar = " << fmt(sc.noise_power_radar) << "\n";
  o << "noise_power_user = " << fmt(sc.noise_power_user) << "\n";
  o << "psk_order = " << sc.psk_order << "\n";
  o << "ris_channel_model = "
    << (sc.ris_channel_model == RisChannelModel::kRayleigh ? "rayleigh" : "steered") << "\n";
  o << "rng_seed = " << sc.rng_seed << "\n";
  o << "\n[scenario.positions]\n";
  o << "bs = " << fmt_pair(sc.bs_position) << "\n";
  o << "target = " << fmt_pair(sc.target_position) << "\n";
  o << "target_velocity = " << fmt_pair(sc.target_velocity) << "\n";
  if (!sc.ris_positions.empty()) {
    o << "ris = ";
    for (size_t i = 0; i < sc.ris_positions.size(); ++i) {
      if (i) o << " ; ";
      o << fmt_pair(sc.ris_positions[i]);
    }
    o << "\n";
  }
  if (!sc.clutter_positions.empty()) {
    o << "clutter = ";
    for (size_t i = 0; i < sc.clutter_positions.size(); ++i) {
      if (i) o << " ; ";
      o << fmt_pair(sc.clutter_positions[i]);
    }
    o << "\n";
  }
  o << "users = ";
  for (size_t i = 0; i < sc.user_positions.size(); ++i) {
    if (i) o << " ; ";
    o << fmt_pair(sc.user_positions[i]);
  }
  o << "\n";
  o << "\n[scenario.pathloss]\n";
  o << "target_direct = " << fmt(sc.pathloss.target_direct) << "\n";
  o << "target_indirect = " << fmt(sc.pathloss.target_indirect) << "\n";
  o << "clutter_direct = " << fmt(sc.pathloss.clutter_direct) << "\n";
  o << "clutter_indirect = " << fmt(sc.pathloss.clutter_indirect) << "\n";
  o << "bs_user = " << fmt(sc.pathloss.bs_user) << "\n";
  o << "ris_user = " << fmt(sc.pathloss.ris_user) << "\n";
  o << "bs_ris = " << fmt(sc.pathloss.bs_ris) << "\n";
  o << "ref_gain = " << fmt(sc.pathloss_ref) << "\n";
  o << "ref_distance = " << fmt(sc.ref_distance) << "\n";
  if (experiment) {
    const auto& e = *experiment;
    o << "\n[experiment]\n";
    o << "kind = " << experiment_kind_name(e.kind) << "\n";
    o << "grid =";
    for (Real g : e.grid) o << " " << fmt(g);
    o << "\n";
    o << "schemes =";
    for (Scheme s : e.schemes) o << " " << scheme_name(s);
    o << "\n";
    o << "seeds =";
    for (auto s : e.seeds) o << " " << s;
    o << "\n";
    o << "ber_noise_draws = " << e.ber_noise_draws << "\n";
    o << "p_fa = " << fmt(e.p_fa) << "\n";
    o << "timing = " << (e.real_timing ? "real" : "none") << "\n";
  }
  return o.str();
}

bool config_equal(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto pairs_equal = [](const std::vector<Vec2>& x, const std::vector<Vec2>& y) {
    if (x.size() != y.size()) return false;
    for (size_t i = 0; i < x.size(); ++i) {
      if (x[i] != y[i]) return false;
    }
    return true;
  };
  return a.bs_position == b.bs_position && a.n_tx_antennas == b.n_tx_antennas &&
         a.n_users == b.n_users && a.n_ris == b.n_ris && a.n_ris_elements == b.n_ris_elements &&
         a.n_pulses == b.n_pulses && a.n_slots == b.n_slots && a.prf == b.prf &&
         a.carrier_freq == b.carrier_freq && a.sampling_interval == b.sampling_interval &&
         a.total_power == b.total_power && a.a_max == b.a_max && a.qos_gamma == b.qos_gamma &&
         a.noise_power_radar == b.noise_power_radar && a.noise_power_user == b.noise_power_user &&
         a.psk_order == b.psk_order && a.target_position == b.target_position &&
         a.target_velocity == b.target_velocity && pairs_equal(a.ris_positions, b.ris_positions) &&
         pairs_equal(a.clutter_positions, b.clutter_positions) &&
         pairs_equal(a.user_positions, b.user_positions) &&
         a.pathloss.target_direct == b.pathloss.target_direct &&
         a.pathloss.target_indirect == b.pathloss.target_indirect &&
         a.pathloss.clutter_direct == b.pathloss.clutter_direct &&
         a.pathloss.clutter_indirect == b.pathloss.clutter_indirect &&
         a.pathloss.bs_user == b.pathloss.bs_user && a.pathloss.ris_user == b.pathloss.ris_user &&
         a.pathloss.bs_ris == b.pathloss.bs_ris && a.pathloss_ref == b.pathloss_ref &&
         a.ref_distance == b.ref_distance && a.ris_channel_model == b.ris_channel_model &&
         a.rng_seed == b.rng_seed;
}

}  // namespace ristap
