#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bets/allowance.hpp"
#include "bets/csv.hpp"
#include "bets/emissions.hpp"
#include "bets/error.hpp"
#include "bets/latency.hpp"
#include "bets/ledger.hpp"
#include "bets/mobility.hpp"
#include "bets/scenario.hpp"
#include "bets/version.hpp"

namespace bets {

// ---------------------------------------------------------------------------
// Events

enum class SimEventKind : uint8_t {
  Sample = 0,
  Penalty,
  Subsidy,
  Alert,
  TradeProposed,
  TradeConfirmed,
  TradeSettled,
  TradeAborted,
  BlockSealed,
  PeriodReset,
};

inline const char* to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::Sample: return "Sample";
    case SimEventKind::Penalty: return "Penalty";
    case SimEventKind::Subsidy: return "Subsidy";
    case SimEventKind::Alert: return "Alert";
    case SimEventKind::TradeProposed: return "TradeProposed";
    case SimEventKind::TradeConfirmed: return "TradeConfirmed";
    case SimEventKind::TradeSettled: return "TradeSettled";
    case SimEventKind::TradeAborted: return "TradeAborted";
    case SimEventKind::BlockSealed: return "BlockSealed";
    case SimEventKind::PeriodReset: return "PeriodReset";
  }
  return "?";
}

/// Compact kind-specific record; v1/v2 meaning by kind:
///   Sample         a=vehicle           v1=epsilon_g_per_km  v2=distance_km
///   Penalty        a=vehicle           v1=amount            v2=balance_after
///   Subsidy        a=vehicle           v1=amount            v2=balance_after
///   Alert          a=vehicle           v1=1 speed, 2 red    v2=balance
///   TradeProposed  a=buyer  b=seller   v1=amount
///   TradeConfirmed a=buyer  b=seller   v1=amount
///   TradeSettled   a=buyer  b=seller   v1=amount            v2=latency_s
///   TradeAborted   a=buyer  b=seller   v1=amount            v2=reason code
///                  (1 seller cannot cover, 2 confirmation missed the window,
///                   3 cover check failed again at settlement)
///   BlockSealed    a=miner  b=height   v1=latency_s         v2=tx_count
///   PeriodReset    a=vehicle           v1=balance
struct SimEventRec {
  double t_s = 0;
  SimEventKind kind = SimEventKind::Sample;
  uint32_t id_a = 0;
  uint32_t id_b = 0;
  double v1 = 0;
  double v2 = 0;
};

struct TickStats {
  uint64_t tick = 0; // global tick index across periods
  double t_s = 0;
  double co2_g = 0;       // emitted this tick
  double cum_co2_g = 0;   // cumulative over the run
  double cum_nox_g = 0;
  uint32_t settled = 0;
  uint32_t aborted = 0;
  double sum_balance = 0; // fleet balance after the tick
};

struct TrajectoryRow {
  double t_s = 0;
  uint32_t id = 0;
  double x_m = 0;
  double y_m = 0;
  double speed_kmh = 0;
};

struct WindowRow {
  double t_s = 0;
  uint32_t buyer = 0;
  uint32_t seller = 0;
  double l_total_s = 0;
  bool open_ended = false;
  double bound_s = 0;
  double l_trans_s = 0;
  double l_comp_s = 0;
  bool succeeded = false;
};

struct SimSummary {
  double total_co2_g = 0;
  double total_nox_g = 0;
  double total_distance_km = 0;
  double mean_epsilon_g_per_km = 0;
  uint64_t trades_proposed = 0;
  uint64_t trades_settled = 0;
  uint64_t trades_aborted = 0;
  double mean_trade_latency_s = 0; // over settled trades; 0 when none settled
  uint64_t speed_alerts = 0;
  uint64_t red_alerts = 0;
  uint64_t blocks_sealed = 0;
  uint64_t txs_committed = 0;
  uint64_t ticks = 0;
  uint64_t periods = 0;
  std::vector<std::pair<uint32_t, double>> final_balances; // ascending id
};

struct RunResult {
  ScenarioConfig cfg;
  SimSummary summary;
  std::vector<SimEventRec> events;
  std::vector<TickStats> tick_series;
  std::vector<TrajectoryRow> trajectories;
  std::vector<WindowRow> windows;
  Ledger ledger{1e6};
};

// ---------------------------------------------------------------------------
// Engine internals

namespace detail {

struct VehicleSim {
  AllowanceAccount account;
  VehicleState state;
  RingKinematics ring;
  PlaneKinematics plane;
  double target_speed_kmh = 0;
  std::vector<SpeedSegment> trace;
  EmissionSample last_sample;
};

inline double applied_speed_kmh(const VehicleSim& v) {
  if (v.state.mode == DriveMode::SpeedCapped) {
    return std::min(v.target_speed_kmh, v.state.cap_kmh);
  }
  return v.target_speed_kmh;
}

inline void set_kinematic_speed(VehicleSim& v, RoadModel model) {
  const double mps = mps_from_kmh(applied_speed_kmh(v));
  if (model == RoadModel::RingRoad) {
    v.ring.speed_mps = mps;
  } else {
    v.plane.speed_mps = mps;
  }
}

inline void embed(VehicleSim& v, const ScenarioConfig& cfg) {
  if (cfg.road_model == RoadModel::RingRoad) {
    embed_on_ring(v.state, v.ring, cfg.circumference_m());
  } else {
    embed_on_plane(v.state, v.plane);
  }
}

} // namespace detail

// ---------------------------------------------------------------------------
// run

/// Executes the configured number of periods tick by tick. Stage order
/// within a tick is fixed: mobility sub-steps, emission sampling, emission
/// control, allowance trading, block sealing. Every balance-affecting action
/// is backed by a ledger transaction, and the pending queue is flushed at the
/// end of the run so the exported chain covers the entire history.
inline RunResult run(const ScenarioConfig& cfg) {
  validate(cfg);
  StreamSet streams = derive_streams(cfg);
  const MinerPool pool = MinerPool::from_rates(cfg.lambda0, cfg.power_watts, cfg.miner_count);
  const MarketRule rule{cfg.threshold_g_per_km, cfg.penalty_alpha, cfg.subsidy_beta,
                        cfg.subsidy_cap};
  const double sample_s = cfg.sample_s();
  const double period_s = cfg.period_s();
  const long ticks_per_period = cfg.ticks_per_period();
  const long n_substeps = std::lround(sample_s / cfg.mobility_step_s);
  const double dt = cfg.mobility_step_s;
  const double l_trans = trans_latency(cfg.block_size_bits, cfg.data_rate_bps);
  const bool dlt = cfg.behavior_policy == BehaviorPolicy::DltControlled;

  RunResult rr;
  rr.cfg = cfg;
  rr.ledger = Ledger(cfg.block_size_bits);

  // Fleet setup: positions, directions/headings, and initial target speeds
  // all come from the mobility stream in vehicle-id order.
  std::vector<detail::VehicleSim> fleet(static_cast<size_t>(cfg.n_vehicles));
  for (size_t i = 0; i < fleet.size(); ++i) {
    auto& v = fleet[i];
    v.account.id = static_cast<uint32_t>(i);
    v.state.id = static_cast<uint32_t>(i);
    if (cfg.road_model == RoadModel::RingRoad) {
      v.ring.arc_m = streams.mobility.uniform(0, cfg.circumference_m());
      v.ring.direction = streams.mobility.bernoulli(0.5) ? 1 : -1;
    } else {
      v.plane.pos_m = Vec2{streams.mobility.uniform(0, cfg.plane_size_m),
                           streams.mobility.uniform(0, cfg.plane_size_m)};
      v.plane.heading_rad = streams.mobility.uniform(0, 2 * std::numbers::pi);
    }
    v.target_speed_kmh = streams.mobility.uniform(cfg.speed_min_kmh, cfg.speed_max_kmh);
    detail::set_kinematic_speed(v, cfg.road_model);
    detail::embed(v, cfg);
  }

  double trade_latency_sum = 0;
  double cum_co2 = 0;
  double cum_km = 0;
  auto stage_guard = [](uint64_t tick, const char* stage, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      throw Error("tick " + std::to_string(tick) + ", stage " + stage + ": " + e.what());
    }
  };

  uint64_t global_tick = 0;
  for (int period = 0; period < cfg.n_periods; ++period) {
    const double period_start = period * period_s;

    stage_guard(global_tick, "period-reset", [&] {
      std::vector<AllowanceAccount> accounts;
      accounts.reserve(fleet.size());
      for (auto& v : fleet) accounts.push_back(v.account);
      const auto resets = reset_period(accounts, cfg.initial_balance, period_start);
      for (size_t i = 0; i < fleet.size(); ++i) {
        fleet[i].account = accounts[i];
        fleet[i].state.mode = DriveMode::Free; // caps lapse with the period
        fleet[i].state.cap_kmh = 0;
        fleet[i].state.cumulative_grams = 0;
        fleet[i].state.odometer_km = 0;
        detail::set_kinematic_speed(fleet[i], cfg.road_model);
        rr.ledger.submit(TxKind::BalanceReset, fleet[i].account.id, resets[i]);
        rr.events.push_back({period_start, SimEventKind::PeriodReset, fleet[i].account.id, 0,
                             resets[i].balance, 0});
        const EmissionSample zero = period_start_sample(fleet[i].account.id, period_start);
        rr.ledger.submit(TxKind::EmissionRecord, fleet[i].account.id,
                         EmissionRecordPayload{zero.vehicle_id, zero.timestamp_s,
                                               zero.epsilon_g_per_km, zero.distance_km,
                                               static_cast<uint8_t>(2)});
        rr.events.push_back({period_start, SimEventKind::Sample, fleet[i].account.id, 0, 0, 0});
      }
    });

    for (long tick = 0; tick < ticks_per_period; ++tick, ++global_tick) {
      const double t_begin = period_start + tick * sample_s;
      const double t_s = t_begin + sample_s; // market instant: end of the tick

      stage_guard(global_tick, "mobility", [&] {
        for (auto& v : fleet) v.trace.clear();
        for (long s = 0; s < n_substeps; ++s) {
          const double global_t = t_begin + s * dt;
          const bool redraw =
              global_t > 0 && std::fmod(global_t, cfg.redraw_interval_s) < 0.5 * dt;
          for (auto& v : fleet) {
            if (redraw) {
              v.target_speed_kmh = streams.mobility.uniform(cfg.speed_min_kmh, cfg.speed_max_kmh);
              detail::set_kinematic_speed(v, cfg.road_model);
            }
            const double speed_kmh = detail::applied_speed_kmh(v);
            if (v.trace.empty() || v.trace.back().speed_kmh != speed_kmh) {
              v.trace.push_back(SpeedSegment{speed_kmh, dt});
            } else {
              v.trace.back().duration_s += dt;
            }
            if (cfg.road_model == RoadModel::RingRoad) {
              advance_ring(v.ring, dt, cfg.circumference_m());
            } else {
              advance_plane(v.plane, dt);
            }
          }
        }
        for (auto& v : fleet) {
          detail::embed(v, cfg);
          rr.trajectories.push_back(
              {t_s, v.state.id, v.state.pos_m.x, v.state.pos_m.y, v.state.speed_kmh()});
        }
      });

      double tick_co2 = 0;
      stage_guard(global_tick, "sampling", [&] {
        for (auto& v : fleet) {
          const GramsDistance gd = integrate_trace(cfg.emissions, v.trace);
          v.last_sample = sample_emissions(v.account.id, t_s, v.trace, cfg.emissions, sample_s);
          v.state.cumulative_grams += gd.grams;
          v.state.odometer_km += gd.km;
          tick_co2 += gd.grams;
          cum_km += gd.km;
          uint8_t flags = 0;
          if (v.last_sample.all_idle) flags |= 1;
          rr.ledger.submit(TxKind::EmissionRecord, v.account.id,
                           EmissionRecordPayload{v.account.id, t_s,
                                                 v.last_sample.epsilon_g_per_km,
                                                 v.last_sample.distance_km, flags});
          rr.events.push_back({t_s, SimEventKind::Sample, v.account.id, 0,
                               v.last_sample.epsilon_g_per_km, v.last_sample.distance_km});
        }
        cum_co2 += tick_co2;
      });

      double balance_before = 0;
      for (const auto& v : fleet) balance_before += v.account.balance;
      double penalties = 0;
      double subsidies = 0;

      stage_guard(global_tick, "control", [&] {
        for (auto& v : fleet) {
          const ControlOutcome out = apply_emission_control(v.account, v.last_sample, rule);
          penalties += out.penalty;
          subsidies += out.subsidy;
          if (out.tx) {
            rr.ledger.submit(out.tx_kind, v.account.id, *out.tx);
            rr.events.push_back({t_s,
                                 out.tx_kind == TxKind::Penalty ? SimEventKind::Penalty
                                                                : SimEventKind::Subsidy,
                                 v.account.id, 0, out.tx->amount, out.tx->balance_after});
          }
          if (v.account.alert != AlertState::None) {
            const double code = v.account.alert == AlertState::SpeedAlert ? 1 : 2;
            rr.events.push_back(
                {t_s, SimEventKind::Alert, v.account.id, 0, code, v.account.balance});
            if (v.account.alert == AlertState::SpeedAlert) {
              ++rr.summary.speed_alerts;
            } else {
              ++rr.summary.red_alerts;
            }
          }
          const VehicleState next = apply_behavior_policy(
              v.state, v.account.alert != AlertState::None, cfg.behavior_policy,
              cfg.speed_cap_kmh);
          if (next.mode != v.state.mode) {
            v.state = next;
            detail::set_kinematic_speed(v, cfg.road_model);
            detail::embed(v, cfg);
          }
        }
      });

      uint32_t tick_settled = 0;
      uint32_t tick_aborted = 0;
      stage_guard(global_tick, "trading", [&] {
        for (auto& buyer : fleet) {
          if (!(buyer.account.balance < 0)) continue;

          // Nearest compliant seller inside communication range; ties go to
          // the lowest id because the scan ascends and requires strict
          // improvement.
          const detail::VehicleSim* seller = nullptr;
          double best_d = 0;
          for (const auto& cand : fleet) {
            if (cand.account.id == buyer.account.id) continue;
            if (!(cand.account.balance > 0)) continue;
            if (cand.account.last_epsilon_g_per_km > rule.threshold_g_per_km) continue;
            const double d = distance(buyer.state, cand.state);
            if (d > cfg.comm_range_m) continue;
            if (seller == nullptr || d < best_d) {
              seller = &cand;
              best_d = d;
            }
          }
          if (!seller) continue;
          auto& seller_mut = fleet[seller->account.id];

          // Ask for enough to restore the target balance, clamped so the
          // seller can cover it from its own allowance.
          const double need =
              cfg.trade_target_fraction * cfg.initial_balance - buyer.account.balance;
          const double amount = std::min(need, seller_mut.account.balance);
          TradeOrder order = propose_trade(buyer.account, seller_mut.account.id, amount, t_s);
          ++rr.summary.trades_proposed;
          rr.ledger.submit(TxKind::TradeBuy, buyer.account.id,
                           TradePayload{order.buyer, order.seller, t_s, order.amount});
          rr.events.push_back(
              {t_s, SimEventKind::TradeProposed, order.buyer, order.seller, order.amount, 0});

          confirm_trade(order, seller_mut.account);
          if (order.status == TradeStatus::Aborted) {
            ++rr.summary.trades_aborted;
            ++tick_aborted;
            rr.events.push_back(
                {t_s, SimEventKind::TradeAborted, order.buyer, order.seller, order.amount, 1});
            continue;
          }
          rr.ledger.submit(TxKind::TradeSell, seller_mut.account.id,
                           TradePayload{order.buyer, order.seller, t_s, order.amount});
          rr.events.push_back(
              {t_s, SimEventKind::TradeConfirmed, order.buyer, order.seller, order.amount, 0});

          const auto window = contact_window(buyer.state, seller_mut.state, cfg.comm_range_m,
                                             t_s, cfg.trade_horizon_s());
          if (!window) throw Error("trading: seller left range between matching and attempt");
          TradeAttempt attempt;
          if (dlt) {
            attempt = attempt_trade(*window, cfg.block_size_bits, cfg.data_rate_bps, pool,
                                    streams.mining);
          } else {
            // No-ledger control: confirmation costs only the transmission.
            attempt.l_total_s = window->l_total_s;
            attempt.open_ended = window->open_ended;
            attempt.l_trans_s = l_trans;
            attempt.l_comp_s = 0;
            attempt.succeeded = window->open_ended || l_trans <= window->l_total_s;
          }
          rr.windows.push_back({t_s, order.buyer, order.seller, window->l_total_s,
                                window->open_ended, window->bound_lprime_s, attempt.l_trans_s,
                                attempt.l_comp_s, attempt.succeeded});

          const auto settlement = settle_trade(order, buyer.account, seller_mut.account, rule,
                                               attempt.succeeded, t_s);
          if (settlement) {
            ++rr.summary.trades_settled;
            ++tick_settled;
            const double latency = attempt.l_trans_s + attempt.l_comp_s;
            trade_latency_sum += latency;
            rr.ledger.submit(TxKind::Settlement, order.buyer, *settlement);
            rr.events.push_back(
                {t_s, SimEventKind::TradeSettled, order.buyer, order.seller, order.amount,
                 latency});
          } else {
            ++rr.summary.trades_aborted;
            ++tick_aborted;
            const double reason =
                order.abort_reason.rfind("Remark 2", 0) == 0 ? 3.0 : 2.0;
            rr.events.push_back({t_s, SimEventKind::TradeAborted, order.buyer, order.seller,
                                 order.amount, reason});
          }
        }
      });

      stage_guard(global_tick, "sealing", [&] {
        if (rr.ledger.pending_count() > 0) {
          const auto [block, latency] = rr.ledger.seal_block(pool, streams.mining, t_s);
          ++rr.summary.blocks_sealed;
          rr.events.push_back({t_s, SimEventKind::BlockSealed, block.miner_id,
                               static_cast<uint32_t>(block.height), latency,
                               static_cast<double>(block.tx_digests.size())});
        }
      });

      // Conservation audit: trades move credits between accounts, so the
      // fleet total can only change by subsidies minus penalties.
      double balance_after = 0;
      for (const auto& v : fleet) balance_after += v.account.balance;
      const double drift = (balance_after - balance_before) - (subsidies - penalties);
      if (std::abs(drift) > 1e-6 * std::max(1.0, std::abs(balance_after))) {
        throw Error("tick " + std::to_string(global_tick) +
                    ": conservation audit failed (fleet balance drifted)");
      }

      rr.tick_series.push_back({global_tick, t_s, tick_co2, cum_co2,
                                cfg.emissions.nox_scale * cum_co2, tick_settled, tick_aborted,
                                balance_after});
    }
  }

  // Flush so the exported chain covers every transaction of the run.
  const double t_end = cfg.n_periods * period_s;
  while (rr.ledger.pending_count() > 0) {
    const auto [block, latency] = rr.ledger.seal_block(pool, streams.mining, t_end);
    ++rr.summary.blocks_sealed;
    rr.events.push_back({t_end, SimEventKind::BlockSealed, block.miner_id,
                         static_cast<uint32_t>(block.height), latency,
                         static_cast<double>(block.tx_digests.size())});
  }

  rr.summary.total_co2_g = cum_co2;
  rr.summary.total_nox_g = cfg.emissions.nox_scale * cum_co2;
  rr.summary.total_distance_km = cum_km;
  rr.summary.mean_epsilon_g_per_km = cum_km > 0 ? cum_co2 / cum_km : 0;
  rr.summary.mean_trade_latency_s =
      rr.summary.trades_settled > 0
          ? trade_latency_sum / static_cast<double>(rr.summary.trades_settled)
          : 0;
  rr.summary.ticks = static_cast<uint64_t>(ticks_per_period) * cfg.n_periods;
  rr.summary.periods = static_cast<uint64_t>(cfg.n_periods);
  for (const auto& b : rr.ledger.blocks()) rr.summary.txs_committed += b.tx_digests.size();
  for (const auto& v : fleet) {
    rr.summary.final_balances.emplace_back(v.account.id, v.account.balance);
  }
  return rr;
}

// ---------------------------------------------------------------------------
// compare

struct CompareResult {
  RunResult baseline;
  RunResult dlt;
};

/// Paired experiment: both arms run from the same seed, so they share fleet
/// placement and every speed draw; only the control policy differs.
inline CompareResult compare(const ScenarioConfig& cfg) {
  ScenarioConfig base_cfg = cfg;
  base_cfg.behavior_policy = BehaviorPolicy::Baseline;
  ScenarioConfig dlt_cfg = cfg;
  dlt_cfg.behavior_policy = BehaviorPolicy::DltControlled;
  return CompareResult{run(base_cfg), run(dlt_cfg)};
}

inline nlohmann::json summary_to_json(const RunResult& rr) {
  nlohmann::json balances = nlohmann::json::array();
  for (const auto& [id, bal] : rr.summary.final_balances) {
    balances.push_back({{"id", id}, {"balance", bal}});
  }
  return nlohmann::json{
      {"policy", to_string(rr.cfg.behavior_policy)},
      {"total_co2_g", rr.summary.total_co2_g},
      {"total_nox_g", rr.summary.total_nox_g},
      {"total_distance_km", rr.summary.total_distance_km},
      {"mean_epsilon_g_per_km", rr.summary.mean_epsilon_g_per_km},
      {"trades_proposed", rr.summary.trades_proposed},
      {"trades_settled", rr.summary.trades_settled},
      {"trades_aborted", rr.summary.trades_aborted},
      {"mean_trade_latency_s", rr.summary.mean_trade_latency_s},
      {"speed_alerts", rr.summary.speed_alerts},
      {"red_alerts", rr.summary.red_alerts},
      {"blocks_sealed", rr.summary.blocks_sealed},
      {"txs_committed", rr.summary.txs_committed},
      {"ticks", rr.summary.ticks},
      {"periods", rr.summary.periods},
      {"final_balances", balances},
  };
}

/// Side-by-side report: emissions in both arms plus the extra settlement
/// latency the ledger's confirmation adds over the no-ledger control.
inline nlohmann::json compare_report(const CompareResult& cr) {
  const auto& b = cr.baseline.summary;
  const auto& d = cr.dlt.summary;
  nlohmann::json j;
  j["baseline"] = summary_to_json(cr.baseline);
  j["dlt"] = summary_to_json(cr.dlt);
  j["co2_reduction_pct"] =
      b.total_co2_g > 0 ? 100.0 * (b.total_co2_g - d.total_co2_g) / b.total_co2_g : 0.0;
  j["nox_reduction_pct"] =
      b.total_nox_g > 0 ? 100.0 * (b.total_nox_g - d.total_nox_g) / b.total_nox_g : 0.0;
  j["latency_overhead_s"] = d.mean_trade_latency_s - b.mean_trade_latency_s;
  j["ticks"] = b.ticks;
  return j;
}

// ---------------------------------------------------------------------------
// Output files

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write output file '" + path.string() + "'");
  out << text;
}

} // namespace detail

inline nlohmann::json run_manifest(const ScenarioConfig& cfg) {
  return nlohmann::json{
      {"code_version", kVersion},
      {"digest_algorithm", kDigestAlgorithm},
      {"rng_seed", cfg.rng_seed},
      {"config_hash", config_hash_hex(cfg)},
      {"scenario", to_json(cfg)},
  };
}

inline std::string events_to_csv(const std::vector<SimEventRec>& events) {
  std::string out = "t_s,kind,id_a,id_b,v1,v2\n";
  for (const auto& e : events) {
    out += format_double(e.t_s);
    out += ',';
    out += to_string(e.kind);
    out += ',';
    out += format_u64(e.id_a);
    out += ',';
    out += format_u64(e.id_b);
    out += ',';
    out += format_double(e.v1);
    out += ',';
    out += format_double(e.v2);
    out += '\n';
  }
  return out;
}

/// Writes summary.json, events.csv, accounts.csv, trajectories.csv,
/// windows.csv, manifest.json, and the chain/ export under out_dir.
inline void write_run_outputs(const RunResult& rr, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  nlohmann::json summary = summary_to_json(rr);
  summary["config_hash"] = config_hash_hex(rr.cfg);
  summary["rng_seed"] = rr.cfg.rng_seed;
  summary["code_version"] = kVersion;
  detail::write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");

  detail::write_text_file(out_dir / "events.csv", events_to_csv(rr.events));

  std::string accounts = "id,balance,alert\n";
  for (const auto& [id, bal] : rr.summary.final_balances) {
    accounts += format_u64(id);
    accounts += ',';
    accounts += format_double(bal);
    accounts += ',';
    accounts += bal < 0 ? "RedAlert" : "None";
    accounts += '\n';
  }
  detail::write_text_file(out_dir / "accounts.csv", accounts);

  std::string traj = "t_s,id,x_m,y_m,speed_kmh\n";
  for (const auto& r : rr.trajectories) {
    traj += format_double(r.t_s);
    traj += ',';
    traj += format_u64(r.id);
    traj += ',';
    traj += format_double(r.x_m);
    traj += ',';
    traj += format_double(r.y_m);
    traj += ',';
    traj += format_double(r.speed_kmh);
    traj += '\n';
  }
  detail::write_text_file(out_dir / "trajectories.csv", traj);

  std::string win = "t_s,buyer,seller,l_total_s,open_ended,bound_s,l_trans_s,l_comp_s,succeeded\n";
  for (const auto& w : rr.windows) {
    win += format_double(w.t_s);
    win += ',';
    win += format_u64(w.buyer);
    win += ',';
    win += format_u64(w.seller);
    win += ',';
    win += format_double(w.l_total_s);
    win += ',';
    win += w.open_ended ? "1" : "0";
    win += ',';
    win += format_double(w.bound_s);
    win += ',';
    win += format_double(w.l_trans_s);
    win += ',';
    win += format_double(w.l_comp_s);
    win += ',';
    win += w.succeeded ? "1" : "0";
    win += '\n';
  }
  detail::write_text_file(out_dir / "windows.csv", win);

  detail::write_text_file(out_dir / "manifest.json", run_manifest(rr.cfg).dump(2) + "\n");
  rr.ledger.export_to_dir(out_dir / "chain");
}

inline void write_compare_outputs(const CompareResult& cr, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_run_outputs(cr.baseline, out_dir / "baseline");
  write_run_outputs(cr.dlt, out_dir / "dlt");
  detail::write_text_file(out_dir / "compare.json", compare_report(cr).dump(2) + "\n");

  std::string ts = "t_s,baseline_cum_co2_g,dlt_cum_co2_g,baseline_cum_nox_g,dlt_cum_nox_g\n";
  const size_t n = std::min(cr.baseline.tick_series.size(), cr.dlt.tick_series.size());
  for (size_t i = 0; i < n; ++i) {
    const auto& tb = cr.baseline.tick_series[i];
    const auto& td = cr.dlt.tick_series[i];
    ts += format_double(tb.t_s);
    ts += ',';
    ts += format_double(tb.cum_co2_g);
    ts += ',';
    ts += format_double(td.cum_co2_g);
    ts += ',';
    ts += format_double(tb.cum_nox_g);
    ts += ',';
    ts += format_double(td.cum_nox_g);
    ts += '\n';
  }
  detail::write_text_file(out_dir / "compare_timeseries.csv", ts);
}

} // namespace bets
