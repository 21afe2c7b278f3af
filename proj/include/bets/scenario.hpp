#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

#include "bets/emissions.hpp"
#include "bets/error.hpp"
#include "bets/hash.hpp"
#include "bets/rng.hpp"
#include "bets/units.hpp"

namespace bets {

enum class RoadModel { RingRoad, OpenPlane };
enum class BehaviorPolicy { Baseline, DltControlled };

inline std::string to_string(RoadModel m) {
  return m == RoadModel::RingRoad ? "ring-road" : "open-plane";
}

inline std::string to_string(BehaviorPolicy p) {
  return p == BehaviorPolicy::Baseline ? "baseline" : "dlt-controlled";
}

/// Full experiment description. Stored in the units of the scenario file
/// (hours, km/h, ...); SI values are exposed through accessors so this module
/// owns every unit conversion.
struct ScenarioConfig {
  int schema_version = 1;
  uint64_t rng_seed = 42;
  BehaviorPolicy behavior_policy = BehaviorPolicy::Baseline;

  // Periods
  double period_hours = 24.0;  // T
  double sample_hours = 0.25;  // T_s
  int n_periods = 1;

  // Fleet / market
  int n_vehicles = 120;
  double initial_balance = 5.0;       // B_i(0), credits
  double threshold_g_per_km = 160.0;  // cap on grams CO2 per km
  double penalty_alpha = 0.05;        // credits per (g/km) excess per km
  double subsidy_beta = 0.01;         // credits per (g/km) headroom per km
  double subsidy_cap = 2.0;           // credits per sample
  double trade_target_fraction = 0.25;

  EmissionCurve emissions;

  // Comms
  double comm_range_m = 300.0;
  double data_rate_bps = 6.0e6;       // effective rate in bits/second
  double trade_window_horizon_s = 0;  // 0 = one sampling interval
  double report_rel_speed_kmh = 50.0; // reference relative speed for sweeps

  // Ledger
  double block_size_bits = 1.0e6; // S_B
  int miner_count = 4;            // M
  double lambda0 = 0.01;          // 1/(joule*second)
  double power_watts = 50.0;      // P_c; miner rate lambda_c = lambda0 * P_c

  // Road / mobility
  RoadModel road_model = RoadModel::RingRoad;
  double circumference_km = 10.0;
  double plane_size_m = 2000.0;
  double speed_min_kmh = 30.0;
  double speed_max_kmh = 130.0;
  double speed_limit_kmh = 130.0;
  double redraw_interval_s = 60.0;
  double mobility_step_s = 1.0;
  double speed_cap_kmh = 72.0; // applied on a speed alert in dlt mode

  // Cost accounting rates
  double gas_price_gwei = 1.897;
  double gwei_per_usd = 4182471.9949;

  bool operator==(const ScenarioConfig&) const = default;

  // SI accessors
  double period_s() const { return seconds_from_hours(period_hours); }
  double sample_s() const { return seconds_from_hours(sample_hours); }
  long ticks_per_period() const { return std::lround(period_hours / sample_hours); }
  double speed_min_mps() const { return mps_from_kmh(speed_min_kmh); }
  double speed_max_mps() const { return mps_from_kmh(speed_max_kmh); }
  double speed_limit_mps() const { return mps_from_kmh(speed_limit_kmh); }
  double circumference_m() const { return circumference_km * kMetersPerKm; }
  double lambda_c() const { return lambda0 * power_watts; }
  double trade_horizon_s() const {
    return trade_window_horizon_s > 0 ? trade_window_horizon_s : sample_s();
  }
};

namespace detail {

inline void check(bool cond, const std::string& rule) {
  if (!cond) throw Error("invariant: " + rule);
}

} // namespace detail

inline void validate(const ScenarioConfig& c) {
  using detail::check;
  check(c.schema_version == 1, "schema_version must be 1");
  check(c.period_hours > 0 && c.sample_hours > 0,
        "period_T and sample_Ts must be strictly positive");
  check(c.sample_hours < c.period_hours, "sample_Ts must be smaller than period_T");
  const double ratio = c.period_hours / c.sample_hours;
  check(std::abs(ratio - std::round(ratio)) < 1e-9,
        "period_T must be an integer multiple of sample_Ts");
  check(c.n_periods >= 1, "n_periods must be >= 1");
  check(c.initial_balance > 0, "Remark 1: initial_balance_B0 must be > 0");
  check(c.n_vehicles >= 1, "n_vehicles must be >= 1");
  if (c.behavior_policy == BehaviorPolicy::DltControlled) {
    check(c.n_vehicles >= 2, "n_vehicles must be >= 2 when the policy trades allowances");
  }
  check(c.threshold_g_per_km > 0, "threshold_T_cal must be > 0");
  check(c.penalty_alpha >= 0, "penalty_alpha must be >= 0");
  check(c.subsidy_beta >= 0, "subsidy_beta must be >= 0");
  check(c.subsidy_cap >= 0, "subsidy_cap must be >= 0");
  check(c.trade_target_fraction > 0 && c.trade_target_fraction <= 1,
        "trade_target_fraction must be in (0, 1]");

  const auto& e = c.emissions;
  check(e.coeff_a > 0 && e.coeff_b > 0 && e.coeff_c > 0,
        "emission curve coefficients must be strictly positive");
  const double v_star = min_emission_speed_kmh(e);
  check(v_star >= 64.0 && v_star <= 97.0,
        "emission curve minimum speed v* must lie in [64, 97] km/h");
  check(e.idle_anchor_kmh > 0, "idle_anchor_kmh must be > 0");
  check(e.idle_g_per_h >= 0, "idle_g_per_h must be >= 0");
  check(e.nox_scale >= 0, "nox_scale must be >= 0");

  check(c.comm_range_m > 0, "comm_range_r must be > 0");
  check(c.data_rate_bps > 0, "data_rate_R must be > 0");
  check(c.block_size_bits > 0, "block_size_SB must be > 0");
  check(c.block_size_bits >= 448 + 256,
        "block_size_SB must fit at least one digest (>= 704 bits)");
  check(c.miner_count >= 1, "miner_count_M must be >= 1");
  check(c.lambda0 > 0, "lambda0 must be > 0");
  check(c.power_watts > 0, "power_Pc must be > 0");
  check(c.trade_window_horizon_s >= 0, "trade_window_horizon_s must be >= 0");
  check(c.report_rel_speed_kmh > 0, "report_rel_speed_kmh must be > 0");

  check(c.circumference_km > 0, "circumference_km must be > 0");
  check(c.plane_size_m > 0, "plane_size_m must be > 0");
  check(c.speed_min_kmh > 0, "speed_min_kmh must be > 0");
  check(c.speed_min_kmh <= c.speed_max_kmh, "speed_min_kmh must be <= speed_max_kmh");
  check(c.speed_max_kmh <= c.speed_limit_kmh, "speed_max_kmh must be <= speed_limit_kmh");
  check(c.redraw_interval_s > 0, "redraw_interval_s must be > 0");
  check(c.mobility_step_s > 0, "mobility_step_s must be > 0");
  check(c.speed_cap_kmh > 0, "speed_cap_kmh must be > 0");

  check(c.gas_price_gwei > 0, "gas_price_gwei must be > 0");
  check(c.gwei_per_usd > 0, "gwei_per_usd must be > 0");
}

inline nlohmann::json to_json(const ScenarioConfig& c) {
  return nlohmann::json{
      {"schema_version", c.schema_version},
      {"rng_seed", c.rng_seed},
      {"behavior_policy", to_string(c.behavior_policy)},
      {"period",
       {{"hours", c.period_hours}, {"sample_hours", c.sample_hours}, {"count", c.n_periods}}},
      {"fleet", {{"n_vehicles", c.n_vehicles}, {"initial_balance", c.initial_balance}}},
      {"market",
       {{"threshold_g_per_km", c.threshold_g_per_km},
        {"penalty_alpha", c.penalty_alpha},
        {"subsidy_beta", c.subsidy_beta},
        {"subsidy_cap", c.subsidy_cap},
        {"trade_target_fraction", c.trade_target_fraction}}},
      {"emissions",
       {{"coeff_a", c.emissions.coeff_a},
        {"coeff_b", c.emissions.coeff_b},
        {"coeff_c", c.emissions.coeff_c},
        {"idle_anchor_kmh", c.emissions.idle_anchor_kmh},
        {"idle_g_per_h", c.emissions.idle_g_per_h},
        {"nox_scale", c.emissions.nox_scale}}},
      {"comms",
       {{"range_m", c.comm_range_m},
        {"data_rate_bps", c.data_rate_bps},
        {"trade_window_horizon_s", c.trade_window_horizon_s},
        {"report_rel_speed_kmh", c.report_rel_speed_kmh}}},
      {"ledger",
       {{"block_size_bits", c.block_size_bits},
        {"miner_count", c.miner_count},
        {"lambda0", c.lambda0},
        {"power_watts", c.power_watts}}},
      {"road",
       {{"model", to_string(c.road_model)},
        {"circumference_km", c.circumference_km},
        {"plane_size_m", c.plane_size_m},
        {"speed_min_kmh", c.speed_min_kmh},
        {"speed_max_kmh", c.speed_max_kmh},
        {"speed_limit_kmh", c.speed_limit_kmh},
        {"redraw_interval_s", c.redraw_interval_s},
        {"mobility_step_s", c.mobility_step_s},
        {"speed_cap_kmh", c.speed_cap_kmh}}},
      {"gas", {{"gas_price_gwei", c.gas_price_gwei}, {"gwei_per_usd", c.gwei_per_usd}}},
  };
}

/// Parse and validate a scenario document. Every field except schema_version
/// is optional and falls back to the defaults above.
inline ScenarioConfig load_scenario(const nlohmann::json& j) {
  ScenarioConfig c;
  try {
    c.schema_version = j.at("schema_version").get<int>();
    c.rng_seed = j.value("rng_seed", c.rng_seed);
    if (j.contains("behavior_policy")) {
      const std::string p = j.at("behavior_policy").get<std::string>();
      if (p == "baseline") {
        c.behavior_policy = BehaviorPolicy::Baseline;
      } else if (p == "dlt-controlled") {
        c.behavior_policy = BehaviorPolicy::DltControlled;
      } else {
        throw Error("schema: unknown behavior_policy '" + p + "'");
      }
    }
    if (j.contains("period")) {
      const auto& p = j.at("period");
      c.period_hours = p.value("hours", c.period_hours);
      c.sample_hours = p.value("sample_hours", c.sample_hours);
      c.n_periods = p.value("count", c.n_periods);
    }
    if (j.contains("fleet")) {
      const auto& f = j.at("fleet");
      c.n_vehicles = f.value("n_vehicles", c.n_vehicles);
      c.initial_balance = f.value("initial_balance", c.initial_balance);
    }
    if (j.contains("market")) {
      const auto& m = j.at("market");
      c.threshold_g_per_km = m.value("threshold_g_per_km", c.threshold_g_per_km);
      c.penalty_alpha = m.value("penalty_alpha", c.penalty_alpha);
      c.subsidy_beta = m.value("subsidy_beta", c.subsidy_beta);
      c.subsidy_cap = m.value("subsidy_cap", c.subsidy_cap);
      c.trade_target_fraction = m.value("trade_target_fraction", c.trade_target_fraction);
    }
    if (j.contains("emissions")) {
      const auto& e = j.at("emissions");
      c.emissions.coeff_a = e.value("coeff_a", c.emissions.coeff_a);
      c.emissions.coeff_b = e.value("coeff_b", c.emissions.coeff_b);
      c.emissions.coeff_c = e.value("coeff_c", c.emissions.coeff_c);
      c.emissions.idle_anchor_kmh = e.value("idle_anchor_kmh", c.emissions.idle_anchor_kmh);
      c.emissions.idle_g_per_h = e.value("idle_g_per_h", c.emissions.idle_g_per_h);
      c.emissions.nox_scale = e.value("nox_scale", c.emissions.nox_scale);
    }
    if (j.contains("comms")) {
      const auto& m = j.at("comms");
      c.comm_range_m = m.value("range_m", c.comm_range_m);
      c.data_rate_bps = m.value("data_rate_bps", c.data_rate_bps);
      c.trade_window_horizon_s = m.value("trade_window_horizon_s", c.trade_window_horizon_s);
      c.report_rel_speed_kmh = m.value("report_rel_speed_kmh", c.report_rel_speed_kmh);
    }
    if (j.contains("ledger")) {
      const auto& l = j.at("ledger");
      c.block_size_bits = l.value("block_size_bits", c.block_size_bits);
      c.miner_count = l.value("miner_count", c.miner_count);
      c.lambda0 = l.value("lambda0", c.lambda0);
      c.power_watts = l.value("power_watts", c.power_watts);
    }
    if (j.contains("road")) {
      const auto& r = j.at("road");
      if (r.contains("model")) {
        const std::string m = r.at("model").get<std::string>();
        if (m == "ring-road") {
          c.road_model = RoadModel::RingRoad;
        } else if (m == "open-plane") {
          c.road_model = RoadModel::OpenPlane;
        } else {
          throw Error("schema: unknown road model '" + m + "'");
        }
      }
      c.circumference_km = r.value("circumference_km", c.circumference_km);
      c.plane_size_m = r.value("plane_size_m", c.plane_size_m);
      c.speed_min_kmh = r.value("speed_min_kmh", c.speed_min_kmh);
      c.speed_max_kmh = r.value("speed_max_kmh", c.speed_max_kmh);
      c.speed_limit_kmh = r.value("speed_limit_kmh", c.speed_limit_kmh);
      c.redraw_interval_s = r.value("redraw_interval_s", c.redraw_interval_s);
      c.mobility_step_s = r.value("mobility_step_s", c.mobility_step_s);
      c.speed_cap_kmh = r.value("speed_cap_kmh", c.speed_cap_kmh);
    }
    if (j.contains("gas")) {
      const auto& g = j.at("gas");
      c.gas_price_gwei = g.value("gas_price_gwei", c.gas_price_gwei);
      c.gwei_per_usd = g.value("gwei_per_usd", c.gwei_per_usd);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("schema: ") + e.what());
  }
  validate(c);
  return c;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("schema: ") + e.what());
  }
  return load_scenario(j);
}

inline StreamSet derive_streams(const ScenarioConfig& c) {
  return derive_streams_from_seed(c.rng_seed);
}

/// SHA-256 over the canonical JSON dump; recorded in the run manifest.
inline std::string config_hash_hex(const ScenarioConfig& c) {
  const std::string dump = to_json(c).dump();
  return to_hex(sha256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(dump.data()), dump.size())));
}

} // namespace bets
