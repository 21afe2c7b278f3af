#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bets/csv.hpp"
#include "bets/error.hpp"
#include "bets/sim.hpp"

namespace bets {

struct GasCostEntry {
  std::string contract;
  double gas = 0;
  double ether = 0; // recomputed from gas and the configured rates
  double usd = 0;
};

/// Deployed-contract gas quantities. Gas is authoritative; the currency
/// columns are derived from user-supplied rates because published Ether/USD
/// conversions drift with the market. RecordData appears twice upstream
/// (deployment vs invocation build); both rows are kept and name lookup
/// resolves to the first.
inline std::vector<GasCostEntry> default_gas_table() {
  return {
      {"UserAuthority", 159430, 0, 0}, {"RecordData", 152443, 0, 0},
      {"AlertControl", 213924, 0, 0},  {"Incentive", 224934, 0, 0},
      {"RecordData", 276394, 0, 0},    {"EABTransfer", 246374, 0, 0},
  };
}

/// ether = gas * price[Gwei] * 1e-9; usd = gas * price[Gwei] / (Gwei per USD).
inline std::vector<GasCostEntry> price_gas_table(std::vector<GasCostEntry> entries,
                                                 double gas_price_gwei, double gwei_per_usd) {
  if (!(gas_price_gwei > 0)) throw Error("estimate_costs: gas_price_gwei must be > 0");
  if (!(gwei_per_usd > 0)) throw Error("estimate_costs: gwei_per_usd must be > 0");
  for (auto& e : entries) {
    if (!(e.gas > 0)) throw Error("estimate_costs: gas must be > 0 for " + e.contract);
    e.ether = e.gas * gas_price_gwei * 1e-9;
    e.usd = e.gas * gas_price_gwei / gwei_per_usd;
  }
  return entries;
}

/// Which contract executes for each billable event.
inline std::map<SimEventKind, std::string> contract_event_mapping() {
  return {
      {SimEventKind::Sample, "RecordData"},
      {SimEventKind::Penalty, "AlertControl"},
      {SimEventKind::Subsidy, "Incentive"},
      {SimEventKind::TradeSettled, "EABTransfer"},
      {SimEventKind::PeriodReset, "UserAuthority"},
  };
}

inline std::map<std::string, uint64_t> count_contract_events(
    const std::vector<SimEventRec>& events) {
  const auto mapping = contract_event_mapping();
  std::map<std::string, uint64_t> counts;
  for (const auto& e : events) {
    auto it = mapping.find(e.kind);
    if (it != mapping.end()) ++counts[it->second];
  }
  return counts;
}

struct CostLine {
  std::string contract;
  double gas = 0;
  double ether = 0;
  double usd = 0;
  uint64_t count = 0;
  double total_ether = 0;
  double total_usd = 0;
};

struct CostReport {
  std::vector<CostLine> lines;
  double total_ether = 0;
  double total_usd = 0;
};

/// Per-contract unit costs plus per-run totals obtained by multiplying by
/// event counts. Counting an event against a contract missing from the gas
/// table is an error.
inline CostReport estimate_costs(const std::vector<GasCostEntry>& entries,
                                 double gas_price_gwei, double gwei_per_usd,
                                 const std::map<std::string, uint64_t>& counts) {
  const auto priced = price_gas_table(entries, gas_price_gwei, gwei_per_usd);
  for (const auto& [contract, n] : counts) {
    bool known = false;
    for (const auto& e : priced) {
      if (e.contract == contract) {
        known = true;
        break;
      }
    }
    if (!known) throw Error("estimate_costs: unknown contract '" + contract + "' in event mapping");
  }
  CostReport report;
  std::map<std::string, bool> counted; // only the first row with a name bills events
  for (const auto& e : priced) {
    CostLine line{e.contract, e.gas, e.ether, e.usd, 0, 0, 0};
    if (!counted[e.contract]) {
      counted[e.contract] = true;
      auto it = counts.find(e.contract);
      if (it != counts.end()) line.count = it->second;
    }
    line.total_ether = line.ether * static_cast<double>(line.count);
    line.total_usd = line.usd * static_cast<double>(line.count);
    report.total_ether += line.total_ether;
    report.total_usd += line.total_usd;
    report.lines.push_back(line);
  }
  return report;
}

inline nlohmann::json cost_report_to_json(const CostReport& r, double gas_price_gwei,
                                          double gwei_per_usd) {
  nlohmann::json lines = nlohmann::json::array();
  for (const auto& l : r.lines) {
    lines.push_back({{"contract", l.contract},
                     {"gas", l.gas},
                     {"ether", l.ether},
                     {"usd", l.usd},
                     {"count", l.count},
                     {"total_ether", l.total_ether},
                     {"total_usd", l.total_usd}});
  }
  return nlohmann::json{{"gas_price_gwei", gas_price_gwei},
                        {"gwei_per_usd", gwei_per_usd},
                        {"lines", lines},
                        {"total_ether", r.total_ether},
                        {"total_usd", r.total_usd}};
}

inline std::string cost_report_to_csv(const CostReport& r) {
  std::string out = "contract,gas,ether,usd,count,total_ether,total_usd\n";
  for (const auto& l : r.lines) {
    out += l.contract;
    out += ',';
    out += format_double(l.gas);
    out += ',';
    out += format_double(l.ether);
    out += ',';
    out += format_double(l.usd);
    out += ',';
    out += format_u64(l.count);
    out += ',';
    out += format_double(l.total_ether);
    out += ',';
    out += format_double(l.total_usd);
    out += '\n';
  }
  return out;
}

} // namespace bets
