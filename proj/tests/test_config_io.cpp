#include <doctest.h>

#include <fstream>
#include <sstream>

#include "ristap/config_io.hpp"

using namespace ristap;

TEST_SUITE_BEGIN("config_io");

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("shipped full-scale profile carries the reference parameters") {
  const ParsedConfig p = parse_config(std::string(RISTAP_SOURCE_DIR) + "/configs/paper.cfg");
  CHECK(p.scenario.n_tx_antennas == 8);
  CHECK(p.scenario.n_users == 3);
  CHECK(p.scenario.n_ris == 2);
  CHECK(p.scenario.n_ris_elements == 25);
  CHECK(p.scenario.n_pulses == 8);
  CHECK(p.scenario.n_slots == 8);
  CHECK(p.scenario.prf == 1000.0);
  CHECK(p.scenario.carrier_freq == 2.4e9);
  CHECK(p.scenario.total_power == 50.0);
  CHECK(p.scenario.a_max == 5.0);
  CHECK(p.scenario.qos_gamma[0] == doctest::Approx(10.0));
  CHECK(p.scenario.ris_positions[0] == Vec2(-12.0, 45.0));
  CHECK(p.scenario.ris_positions[1] == Vec2(12.0, 45.0));
  CHECK(p.scenario.target_position == Vec2(0.0, 50.0));
  CHECK(p.scenario.pathloss.target_direct == 2.7);
  CHECK(p.scenario.pathloss.target_indirect == 2.3);
  CHECK(p.scenario.pathloss.bs_user == 3.0);
  CHECK(p.scenario.pathloss.ris_user == 2.8);
  CHECK(p.scenario.pathloss.bs_ris == 2.0);
}

TEST_CASE("round trip: parse, serialize, parse") {
  const std::string desk = read_file(std::string(RISTAP_SOURCE_DIR) + "/configs/desk.cfg");
  const ParsedConfig a = parse_config_text(desk, "desk");
  const std::string text = serialize_config(a.scenario, a.experiment);
  const ParsedConfig b = parse_config_text(text, "serialized");
  CHECK(config_equal(a.scenario, b.scenario));
  CHECK(a.experiment.has_value() == b.experiment.has_value());

  // With an experiment section too.
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kPowerSweep;
  spec.grid = {40.0, 50.0};
  spec.schemes = {Scheme::kProposed, Scheme::kNoRis};
  spec.seeds = {1, 2, 3};
  spec.p_fa = 1e-4;
  const std::string text2 = serialize_config(a.scenario, spec);
  const ParsedConfig c = parse_config_text(text2, "serialized2");
  REQUIRE(c.experiment.has_value());
  CHECK(*c.experiment == spec);
}

TEST_CASE("errors name the offending key and line") {
  const std::string good = read_file(std::string(RISTAP_SOURCE_DIR) + "/configs/desk.cfg");

  SUBCASE("unknown key") {
    const std::string bad = good + "\n[scenario]\nbogus_key = 3\n";
    CHECK_THROWS_WITH_AS(parse_config_text(bad, "t"), doctest::Contains("bogus_key"), ConfigError);
  }
  SUBCASE("unknown section") {
    const std::string bad = good + "\n[nonsense]\nx = 1\n";
    CHECK_THROWS_WITH_AS(parse_config_text(bad, "t"), doctest::Contains("nonsense"), ConfigError);
  }
  SUBCASE("missing required key") {
    std::istringstream in(good);
    std::string line, pruned;
    while (std::getline(in, line)) {
      if (line.rfind("total_power", 0) == 0) continue;
      pruned += line + "\n";
    }
    CHECK_THROWS_WITH_AS(parse_config_text(pruned, "t"), doctest::Contains("total_power"),
                         ConfigError);
  }
  SUBCASE("malformed number carries its line") {
    const std::string bad = "[scenario]\nn_tx_antennas = four\n";
    CHECK_THROWS_WITH_AS(parse_config_text(bad, "t"), doctest::Contains("t:2"), ConfigError);
  }
  SUBCASE("duplicate key rejected") {
    const std::string bad = good + "\n[scenario]\nn_users = 2\n";
    CHECK_THROWS_WITH_AS(parse_config_text(bad, "t"), doctest::Contains("duplicate"), ConfigError);
  }
  SUBCASE("validation failures carry the origin") {
    std::string mutated = good;
    const auto pos = mutated.find("psk_order = 4");
    REQUIRE(pos != std::string::npos);
    mutated.replace(pos, 13, "psk_order = 3");
    CHECK_THROWS_WITH_AS(parse_config_text(mutated, "t"), doctest::Contains("psk_order"),
                         ConfigError);
  }
}

TEST_CASE("experiment validation") {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::kRoc;
  spec.grid = {};
  spec.schemes = {Scheme::kProposed};
  spec.seeds = {1};
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("grid"), ConfigError);
  spec.grid = {1e-4};
  spec.seeds = {1, 1};
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("distinct"), ConfigError);
}

TEST_SUITE_END();
