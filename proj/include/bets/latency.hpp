#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bets/csv.hpp"
#include "bets/error.hpp"
#include "bets/ledger.hpp"
#include "bets/mobility.hpp"
#include "bets/scenario.hpp"

namespace bets {

// ---------------------------------------------------------------------------
// Single trade attempt

struct TradeAttempt {
  double l_total_s = 0;
  bool open_ended = false;
  double l_trans_s = 0;
  double l_comp_s = std::numeric_limits<double>::quiet_NaN(); // NaN when no draw happened
  bool succeeded = false;
};

/// A trade settles when the confirmation beats the contact window:
/// L_trans + L_comp <= L_total. Open-ended windows always succeed (the pair
/// never separates within the horizon). When transmission alone exceeds a
/// finite window the attempt fails before any mining draw.
inline TradeAttempt attempt_trade(const ContactWindow& window, double block_size_bits,
                                  double data_rate_bps, const MinerPool& pool,
                                  RngStream& mining) {
  TradeAttempt a;
  a.l_total_s = window.l_total_s;
  a.open_ended = window.open_ended;
  a.l_trans_s = trans_latency(block_size_bits, data_rate_bps);
  if (window.open_ended) {
    a.l_comp_s = draw_mining_latency(pool, mining);
    a.succeeded = true;
    return a;
  }
  if (a.l_trans_s > a.l_total_s) {
    a.succeeded = false;
    return a;
  }
  a.l_comp_s = draw_mining_latency(pool, mining);
  a.succeeded = a.l_trans_s + a.l_comp_s <= a.l_total_s;
  return a;
}

// ---------------------------------------------------------------------------
// Success probability (Monte Carlo with closed-form cross-check)

struct SuccessEstimate {
  double estimate = 0;
  double stderr_ = 0;
  double closed_form = std::numeric_limits<double>::quiet_NaN(); // set for constant windows
  size_t n_trials = 0;
  size_t open_ended_successes = 0;
};

/// Pr(mining draw <= slack) for an Exponential(lambda_c * M) draw; zero when
/// transmission alone does not fit.
inline double success_probability_closed_form(double l_total_s, double l_trans_s,
                                              const MinerPool& pool) {
  if (std::isinf(l_total_s)) return 1.0;
  const double slack = l_total_s - l_trans_s;
  if (slack < 0) return 0.0;
  return 1.0 - std::exp(-pool.race_rate() * slack);
}

/// Monte Carlo estimate over a distribution of window lengths. The sampler
/// may return infinity to model open-ended windows.
inline SuccessEstimate success_probability(const std::function<double(RngStream&)>& l_total_sampler,
                                           double block_size_bits, double data_rate_bps,
                                           const MinerPool& pool, size_t n_trials,
                                           RngStream& rng) {
  if (n_trials < 1) throw Error("success_probability: n_trials must be >= 1");
  const double l_trans = trans_latency(block_size_bits, data_rate_bps);
  size_t successes = 0;
  size_t open_ended = 0;
  for (size_t k = 0; k < n_trials; ++k) {
    const double l_total = l_total_sampler(rng);
    if (std::isinf(l_total)) {
      ++successes;
      ++open_ended;
      continue;
    }
    if (l_trans > l_total) continue;
    const double draw = draw_mining_latency(pool, rng);
    if (l_trans + draw <= l_total) ++successes;
  }
  SuccessEstimate est;
  est.n_trials = n_trials;
  est.open_ended_successes = open_ended;
  est.estimate = static_cast<double>(successes) / static_cast<double>(n_trials);
  est.stderr_ = std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(n_trials));
  return est;
}

/// Constant-window overload; also fills in the analytic value.
inline SuccessEstimate success_probability(double l_total_s, double block_size_bits,
                                           double data_rate_bps, const MinerPool& pool,
                                           size_t n_trials, RngStream& rng) {
  auto sampler = [l_total_s](RngStream&) { return l_total_s; };
  SuccessEstimate est = success_probability(sampler, block_size_bits, data_rate_bps, pool,
                                            n_trials, rng);
  est.closed_form = success_probability_closed_form(
      l_total_s, trans_latency(block_size_bits, data_rate_bps), pool);
  return est;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepParameter { RelSpeed, BlockSize, MinerCount, DataRate };

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::RelSpeed: return "rel_speed";
    case SweepParameter::BlockSize: return "block_size";
    case SweepParameter::MinerCount: return "miner_count";
    case SweepParameter::DataRate: return "data_rate";
  }
  return "?";
}

inline SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "rel_speed") return SweepParameter::RelSpeed;
  if (s == "block_size") return SweepParameter::BlockSize;
  if (s == "miner_count") return SweepParameter::MinerCount;
  if (s == "data_rate") return SweepParameter::DataRate;
  throw Error("sweep: unknown parameter '" + s +
              "' (expected rel_speed, block_size, miner_count, or data_rate)");
}

/// Varies one parameter over a grid, holding the rest at the scenario values,
/// and tabulates the latency budget and trade success rate at each point.
/// Window length comes from the reporting bound at the scenario's reference
/// relative speed (or the grid value when sweeping rel_speed).
inline CsvTable sweep(SweepParameter param, const std::vector<double>& grid,
                      const ScenarioConfig& base, size_t n_trials, RngStream& rng) {
  if (grid.empty()) throw Error("sweep: empty grid");
  CsvTable table;
  table.header = {"parameter", "value",       "l_total_s", "l_trans_s",
                  "exp_comp_s", "p_estimate", "p_stderr",  "p_closed"};
  for (const double value : grid) {
    double rel_speed = base.report_rel_speed_kmh;
    double block_bits = base.block_size_bits;
    double rate_bps = base.data_rate_bps;
    int miners = base.miner_count;
    switch (param) {
      case SweepParameter::RelSpeed: rel_speed = value; break;
      case SweepParameter::BlockSize: block_bits = value; break;
      case SweepParameter::MinerCount: miners = static_cast<int>(value); break;
      case SweepParameter::DataRate: rate_bps = value; break;
    }
    const MinerPool pool = MinerPool::from_rates(base.lambda0, base.power_watts, miners);
    const double l_total = window_upper_bound(base.comm_range_m, rel_speed);
    const double l_trans = trans_latency(block_bits, rate_bps);
    const SuccessEstimate est =
        success_probability(l_total, block_bits, rate_bps, pool, n_trials, rng);
    table.rows.push_back({std::string(to_string(param)), format_double(value),
                          format_double(l_total), format_double(l_trans),
                          format_double(expected_comp_latency(pool)),
                          format_double(est.estimate), format_double(est.stderr_),
                          format_double(est.closed_form)});
  }
  return table;
}

} // namespace bets
