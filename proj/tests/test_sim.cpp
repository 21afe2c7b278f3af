#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bets/sim.hpp"

using namespace bets;

namespace {

ScenarioConfig small_cfg() {
  ScenarioConfig c;
  c.n_vehicles = 40;
  c.period_hours = 2.0;
  c.sample_hours = 0.25;
  c.rng_seed = 2024;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::map<std::string, std::string> dir_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      out[std::filesystem::relative(entry.path(), root).string()] = slurp(entry.path());
    }
  }
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("sim_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

} // namespace

TEST_CASE("a lone vehicle runs the full market loop without trading") {
  ScenarioConfig c = small_cfg();
  c.n_vehicles = 1;
  const RunResult rr = run(c);
  REQUIRE(rr.summary.ticks == 8);
  REQUIRE(rr.summary.periods == 1);
  REQUIRE(rr.summary.trades_proposed == 0);
  REQUIRE(rr.summary.trades_settled == 0);
  REQUIRE(rr.summary.total_distance_km > 0);
  REQUIRE(rr.summary.mean_epsilon_g_per_km ==
          Catch::Approx(rr.summary.total_co2_g / rr.summary.total_distance_km).epsilon(1e-12));
  REQUIRE(rr.summary.total_nox_g ==
          Catch::Approx(0.004 * rr.summary.total_co2_g).epsilon(1e-12));
  REQUIRE(rr.summary.blocks_sealed >= 1);
  REQUIRE(rr.ledger.pending_count() == 0);
  REQUIRE(rr.summary.txs_committed == rr.ledger.sealed_txs().size());
  REQUIRE(rr.ledger.verify_chain());
}

TEST_CASE("identical configurations replay bit-identically") {
  const ScenarioConfig c = small_cfg();
  const RunResult a = run(c);
  const RunResult b = run(c);
  REQUIRE(summary_to_json(a).dump() == summary_to_json(b).dump());
  REQUIRE(events_to_csv(a.events) == events_to_csv(b.events));
  REQUIRE(a.ledger.blocks().size() == b.ledger.blocks().size());
  for (size_t i = 0; i < a.ledger.blocks().size(); ++i) {
    REQUIRE(a.ledger.blocks()[i].block_hash == b.ledger.blocks()[i].block_hash);
  }

  ScenarioConfig other = c;
  other.rng_seed = c.rng_seed + 1;
  const RunResult d = run(other);
  REQUIRE(summary_to_json(a).dump() != summary_to_json(d).dump());
}

TEST_CASE("event timestamps never go backwards") {
  ScenarioConfig c = small_cfg();
  c.behavior_policy = BehaviorPolicy::DltControlled;
  const RunResult rr = run(c);
  for (size_t i = 1; i < rr.events.size(); ++i) {
    REQUIRE(rr.events[i].t_s >= rr.events[i - 1].t_s);
  }
}

TEST_CASE("settlements follow confirmations for the same pair") {
  ScenarioConfig c = small_cfg();
  c.behavior_policy = BehaviorPolicy::DltControlled;
  const RunResult rr = run(c);
  REQUIRE(rr.summary.trades_settled > 0);
  for (size_t i = 0; i < rr.events.size(); ++i) {
    const auto& e = rr.events[i];
    if (e.kind != SimEventKind::TradeSettled) continue;
    bool confirmed = false;
    for (size_t k = 0; k < i; ++k) {
      const auto& p = rr.events[k];
      if (p.kind == SimEventKind::TradeConfirmed && p.t_s == e.t_s && p.id_a == e.id_a &&
          p.id_b == e.id_b) {
        confirmed = true;
        break;
      }
    }
    REQUIRE(confirmed);
  }
}

TEST_CASE("fleet balance moves only by subsidies minus penalties") {
  ScenarioConfig c = small_cfg();
  c.behavior_policy = BehaviorPolicy::DltControlled;
  const RunResult rr = run(c);

  std::map<double, double> delta_by_t; // subsidies - penalties per market instant
  for (const auto& e : rr.events) {
    if (e.kind == SimEventKind::Penalty) delta_by_t[e.t_s] -= e.v1;
    if (e.kind == SimEventKind::Subsidy) delta_by_t[e.t_s] += e.v1;
  }

  double prev = c.initial_balance * c.n_vehicles;
  for (const auto& tick : rr.tick_series) {
    const double expect = prev + delta_by_t[tick.t_s];
    REQUIRE(tick.sum_balance ==
            Catch::Approx(expect).margin(1e-6 * std::max(1.0, std::abs(expect))));
    prev = tick.sum_balance;
  }
}

TEST_CASE("replay from the sealed chain reproduces the final balances") {
  for (const auto policy : {BehaviorPolicy::Baseline, BehaviorPolicy::DltControlled}) {
    ScenarioConfig c = small_cfg();
    c.behavior_policy = policy;
    const RunResult rr = run(c);
    const auto balances = replay_balances(rr.ledger.sealed_txs());
    REQUIRE(balances.size() == rr.summary.final_balances.size());
    for (const auto& [id, bal] : rr.summary.final_balances) {
      REQUIRE(balances.at(id) == bal); // bitwise
    }
  }
}

TEST_CASE("replay works from an exported chain directory") {
  const auto dir = temp_dir("replay");
  ScenarioConfig c = small_cfg();
  c.behavior_policy = BehaviorPolicy::DltControlled;
  const RunResult rr = run(c);
  rr.ledger.export_to_dir(dir);
  const auto balances = replay_balances(import_chain_txs(dir));
  for (const auto& [id, bal] : rr.summary.final_balances) {
    REQUIRE(balances.at(id) == bal);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("paired arms share the clock and the ledger adds confirmation latency") {
  ScenarioConfig c = small_cfg();
  const CompareResult cr = compare(c);
  REQUIRE(cr.baseline.summary.ticks == cr.dlt.summary.ticks);
  REQUIRE(cr.baseline.tick_series.size() == cr.dlt.tick_series.size());
  REQUIRE(cr.baseline.cfg.behavior_policy == BehaviorPolicy::Baseline);
  REQUIRE(cr.dlt.cfg.behavior_policy == BehaviorPolicy::DltControlled);

  const double floor_s = trans_latency(c.block_size_bits, c.data_rate_bps);
  REQUIRE(cr.baseline.summary.trades_settled > 0);
  REQUIRE(cr.dlt.summary.trades_settled > 0);
  // The no-ledger control pays transmission only.
  REQUIRE(cr.baseline.summary.mean_trade_latency_s == Catch::Approx(floor_s).epsilon(1e-12));
  // Confirmation can only add to the floor.
  REQUIRE(cr.dlt.summary.mean_trade_latency_s >= floor_s);
  REQUIRE(cr.dlt.summary.mean_trade_latency_s > cr.baseline.summary.mean_trade_latency_s);

  const auto report = compare_report(cr);
  REQUIRE(report["ticks"] == cr.baseline.summary.ticks);
  REQUIRE(report["latency_overhead_s"].get<double>() > 0.0);
}

TEST_CASE("every period starts from a fresh budget") {
  ScenarioConfig c = small_cfg();
  c.n_vehicles = 6;
  c.period_hours = 1.0;
  c.sample_hours = 0.25;
  c.n_periods = 2;
  const RunResult rr = run(c);
  REQUIRE(rr.summary.periods == 2);
  REQUIRE(rr.summary.ticks == 8);

  size_t resets = 0;
  size_t second_period_resets = 0;
  for (const auto& e : rr.events) {
    if (e.kind != SimEventKind::PeriodReset) continue;
    ++resets;
    REQUIRE(e.v1 == c.initial_balance);
    if (e.t_s == 3600.0) ++second_period_resets;
  }
  REQUIRE(resets == 12);
  REQUIRE(second_period_resets == 6);

  // The chain records the same resets.
  size_t reset_txs = 0;
  for (const auto& tx : rr.ledger.sealed_txs()) {
    if (tx.kind == TxKind::BalanceReset) {
      ++reset_txs;
      REQUIRE(decode_balance_reset(tx.payload).balance == c.initial_balance);
    }
  }
  REQUIRE(reset_txs == 12);
}

TEST_CASE("a light client can follow the run's chain") {
  const RunResult rr = run(small_cfg());
  LightClient lc;
  lc.sync(rr.ledger);
  REQUIRE(lc.header_count() == rr.ledger.blocks().size());
  for (const auto& b : rr.ledger.blocks()) {
    for (const auto& d : b.tx_digests) REQUIRE(lc.verify_inclusion(d));
  }
}

TEST_CASE("run outputs are byte-identical across writes") {
  ScenarioConfig c = small_cfg();
  c.n_vehicles = 10; // keep the chain export small
  c.behavior_policy = BehaviorPolicy::DltControlled;
  const auto dir_a = temp_dir("out_a");
  const auto dir_b = temp_dir("out_b");
  const RunResult ra = run(c);
  write_run_outputs(ra, dir_a);
  const RunResult rb = run(c);
  write_run_outputs(rb, dir_b);

  const auto ca = dir_contents(dir_a);
  const auto cb = dir_contents(dir_b);
  REQUIRE(ca.size() == cb.size());
  REQUIRE(ca == cb);
  for (const char* name : {"summary.json", "events.csv", "accounts.csv", "trajectories.csv",
                           "windows.csv", "manifest.json"}) {
    REQUIRE(ca.count(name) == 1);
  }
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

TEST_CASE("compare outputs include both arms and the shared timeseries") {
  ScenarioConfig c = small_cfg();
  c.n_vehicles = 10;
  const auto dir = temp_dir("cmp");
  write_compare_outputs(compare(c), dir);
  REQUIRE(std::filesystem::exists(dir / "compare.json"));
  REQUIRE(std::filesystem::exists(dir / "compare_timeseries.csv"));
  REQUIRE(std::filesystem::exists(dir / "baseline" / "summary.json"));
  REQUIRE(std::filesystem::exists(dir / "dlt" / "summary.json"));
  const std::string ts = slurp(dir / "compare_timeseries.csv");
  REQUIRE(ts.rfind("t_s,baseline_cum_co2_g,dlt_cum_co2_g,baseline_cum_nox_g,dlt_cum_nox_g\n",
                   0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the engine surfaces stage context on failure") {
  ScenarioConfig c = small_cfg();
  c.n_vehicles = 0;
  REQUIRE_THROWS_AS(run(c), Error); // rejected by validation before any tick
}
