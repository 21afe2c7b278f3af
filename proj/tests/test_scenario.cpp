#include <string>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "bets/scenario.hpp"

using namespace bets;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("default configuration is valid") {
  ScenarioConfig c;
  REQUIRE_NOTHROW(validate(c));
}

TEST_CASE("SI accessors agree with the configured hours and speeds") {
  ScenarioConfig c;
  REQUIRE(c.period_s() == 86400.0);
  REQUIRE(c.sample_s() == 900.0);
  REQUIRE(c.ticks_per_period() == 96);
  REQUIRE(c.lambda_c() == Catch::Approx(0.5));
  REQUIRE(c.speed_min_mps() == Catch::Approx(30.0 / 3.6));
  REQUIRE(c.circumference_m() == 10000.0);
  // Horizon defaults to one sampling interval; an explicit value wins.
  REQUIRE(c.trade_horizon_s() == 900.0);
  c.trade_window_horizon_s = 30.0;
  REQUIRE(c.trade_horizon_s() == 30.0);
}

TEST_CASE("minimal document loads with defaults") {
  const ScenarioConfig c = load_scenario(nlohmann::json{{"schema_version", 1}});
  REQUIRE(c == ScenarioConfig{});
  REQUIRE(c.rng_seed == 42);
  REQUIRE(c.behavior_policy == BehaviorPolicy::Baseline);
}

TEST_CASE("schema_version is mandatory") {
  REQUIRE_THROWS_WITH(load_scenario(nlohmann::json::object()), ContainsSubstring("schema"));
  REQUIRE_THROWS_WITH(load_scenario(nlohmann::json{{"schema_version", 2}}),
                      ContainsSubstring("schema_version"));
}

TEST_CASE("unknown enum strings are rejected") {
  REQUIRE_THROWS_WITH(
      load_scenario(nlohmann::json{{"schema_version", 1}, {"behavior_policy", "anarchy"}}),
      ContainsSubstring("behavior_policy"));
  REQUIRE_THROWS_WITH(
      load_scenario(nlohmann::json{{"schema_version", 1}, {"road", {{"model", "moebius"}}}}),
      ContainsSubstring("road model"));
}

TEST_CASE("sampling interval must divide the period") {
  ScenarioConfig c;
  c.period_hours = 24.0;
  c.sample_hours = 0.7;
  REQUIRE_THROWS_WITH(validate(c), ContainsSubstring("integer multiple"));
  c.sample_hours = 24.0;
  REQUIRE_THROWS_AS(validate(c), Error);
}

TEST_CASE("a period must start with positive headroom") {
  ScenarioConfig c;
  c.initial_balance = 0.0;
  REQUIRE_THROWS_WITH(validate(c), ContainsSubstring("Remark 1"));
  c.initial_balance = -10.0;
  REQUIRE_THROWS_WITH(validate(c), ContainsSubstring("Remark 1"));
}

TEST_CASE("emission curve minimum must sit inside the moderate band") {
  ScenarioConfig c;
  // v* = (a / (2c))^(1/3); c = 0.05 drags the minimum down to ~31 km/h.
  c.emissions.coeff_c = 0.05;
  REQUIRE_THROWS_WITH(validate(c), ContainsSubstring("v*"));
  // A vanishing aerodynamic term pushes v* far beyond the band.
  c.emissions.coeff_c = 1e-6;
  REQUIRE_THROWS_AS(validate(c), Error);
}

TEST_CASE("trading policy needs at least two vehicles") {
  ScenarioConfig c;
  c.behavior_policy = BehaviorPolicy::DltControlled;
  c.n_vehicles = 1;
  REQUIRE_THROWS_AS(validate(c), Error);
  c.behavior_policy = BehaviorPolicy::Baseline;
  REQUIRE_NOTHROW(validate(c));
}

TEST_CASE("block size must hold at least one digest") {
  ScenarioConfig c;
  c.block_size_bits = 500;
  REQUIRE_THROWS_WITH(validate(c), ContainsSubstring("704"));
}

TEST_CASE("serialization round-trips a customized configuration") {
  ScenarioConfig c;
  c.rng_seed = 7;
  c.behavior_policy = BehaviorPolicy::DltControlled;
  c.road_model = RoadModel::OpenPlane;
  c.n_vehicles = 17;
  c.n_periods = 2;
  c.sample_hours = 0.5;
  c.initial_balance = 12.5;
  c.miner_count = 9;
  c.trade_window_horizon_s = 45.0;
  c.emissions.coeff_c = 0.004;
  const ScenarioConfig back = load_scenario(to_json(c));
  REQUIRE(back == c);
}

TEST_CASE("config hash is stable and input-sensitive") {
  ScenarioConfig a;
  ScenarioConfig b;
  REQUIRE(config_hash_hex(a) == config_hash_hex(b));
  REQUIRE(config_hash_hex(a).size() == 64);
  b.rng_seed = 43;
  REQUIRE(config_hash_hex(a) != config_hash_hex(b));
}

TEST_CASE("scenario files that do not exist or do not parse are reported") {
  REQUIRE_THROWS_WITH(load_scenario_file("/nonexistent/scenario.json"),
                      ContainsSubstring("cannot open scenario file"));
}

TEST_CASE("derived streams depend only on the seed") {
  ScenarioConfig a;
  ScenarioConfig b;
  b.n_vehicles = 999; // unrelated field
  StreamSet sa = derive_streams(a);
  StreamSet sb = derive_streams(b);
  for (int i = 0; i < 10; ++i) {
    REQUIRE(sa.mobility.next_u64() == sb.mobility.next_u64());
  }
}
