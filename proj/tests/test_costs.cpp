#include <map>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bets/costs.hpp"

using namespace bets;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<SimEventRec> synthetic_events() {
  std::vector<SimEventRec> events;
  auto push = [&](SimEventKind k) {
    SimEventRec e;
    e.kind = k;
    events.push_back(e);
  };
  push(SimEventKind::PeriodReset);
  for (int i = 0; i < 3; ++i) push(SimEventKind::Sample);
  for (int i = 0; i < 2; ++i) push(SimEventKind::Penalty);
  push(SimEventKind::Subsidy);
  push(SimEventKind::TradeSettled);
  // Not billable: no contract executes for these.
  push(SimEventKind::Alert);
  push(SimEventKind::TradeProposed);
  push(SimEventKind::TradeConfirmed);
  push(SimEventKind::TradeAborted);
  push(SimEventKind::BlockSealed);
  return events;
}

} // namespace

TEST_CASE("the default gas table lists the deployed contracts in order") {
  const auto table = default_gas_table();
  REQUIRE(table.size() == 6);
  REQUIRE(table[0].contract == "UserAuthority");
  REQUIRE(table[0].gas == 159430.0);
  REQUIRE(table[1].contract == "RecordData");
  REQUIRE(table[1].gas == 152443.0);
  REQUIRE(table[2].contract == "AlertControl");
  REQUIRE(table[2].gas == 213924.0);
  REQUIRE(table[3].contract == "Incentive");
  REQUIRE(table[3].gas == 224934.0);
  REQUIRE(table[4].contract == "RecordData");
  REQUIRE(table[4].gas == 276394.0);
  REQUIRE(table[5].contract == "EABTransfer");
  REQUIRE(table[5].gas == 246374.0);
}

TEST_CASE("pricing converts gas through the configured rates") {
  const auto priced = price_gas_table(default_gas_table(), 1.897, 4182471.9949);
  REQUIRE(priced[0].ether == Catch::Approx(159430.0 * 1.897 * 1e-9).epsilon(1e-12));
  // The registration contract lands near seven cents at these rates.
  REQUIRE(priced[0].usd == Catch::Approx(0.0723).epsilon(0.005));
  REQUIRE(priced[0].usd == Catch::Approx(0.072311).margin(5e-7));

  SECTION("cost scales linearly with the gas price") {
    const auto doubled = price_gas_table(default_gas_table(), 2 * 1.897, 4182471.9949);
    for (size_t i = 0; i < priced.size(); ++i) {
      REQUIRE(doubled[i].ether == Catch::Approx(2 * priced[i].ether).epsilon(1e-12));
      REQUIRE(doubled[i].usd == Catch::Approx(2 * priced[i].usd).epsilon(1e-12));
    }
  }

  SECTION("rates must be positive") {
    REQUIRE_THROWS_AS(price_gas_table(default_gas_table(), 0.0, 1.0), Error);
    REQUIRE_THROWS_AS(price_gas_table(default_gas_table(), 1.0, -2.0), Error);
  }
}

TEST_CASE("billable events map onto their contracts") {
  const auto mapping = contract_event_mapping();
  REQUIRE(mapping.at(SimEventKind::Sample) == "RecordData");
  REQUIRE(mapping.at(SimEventKind::Penalty) == "AlertControl");
  REQUIRE(mapping.at(SimEventKind::Subsidy) == "Incentive");
  REQUIRE(mapping.at(SimEventKind::TradeSettled) == "EABTransfer");
  REQUIRE(mapping.at(SimEventKind::PeriodReset) == "UserAuthority");
  REQUIRE(mapping.size() == 5);

  const auto counts = count_contract_events(synthetic_events());
  REQUIRE(counts.at("RecordData") == 3);
  REQUIRE(counts.at("AlertControl") == 2);
  REQUIRE(counts.at("Incentive") == 1);
  REQUIRE(counts.at("EABTransfer") == 1);
  REQUIRE(counts.at("UserAuthority") == 1);
  REQUIRE(counts.size() == 5);
}

TEST_CASE("estimation bills only the first row of a duplicated contract name") {
  const auto counts = count_contract_events(synthetic_events());
  const CostReport report = estimate_costs(default_gas_table(), 1.897, 4182471.9949, counts);
  REQUIRE(report.lines.size() == 6);

  const auto& first_record = report.lines[1];
  const auto& second_record = report.lines[4];
  REQUIRE(first_record.contract == "RecordData");
  REQUIRE(second_record.contract == "RecordData");
  REQUIRE(first_record.count == 3);
  REQUIRE(second_record.count == 0);
  REQUIRE(second_record.total_usd == 0.0);

  double total = 0;
  for (const auto& l : report.lines) total += l.total_usd;
  REQUIRE(report.total_usd == Catch::Approx(total).epsilon(1e-12));
  REQUIRE(report.total_usd > 0.0);
}

TEST_CASE("empty runs cost nothing") {
  const CostReport report = estimate_costs(default_gas_table(), 1.897, 4182471.9949, {});
  REQUIRE(report.total_usd == 0.0);
  REQUIRE(report.total_ether == 0.0);
  for (const auto& l : report.lines) REQUIRE(l.count == 0);
}

TEST_CASE("counting against an unknown contract is an error") {
  const std::map<std::string, uint64_t> counts{{"Zeppelin", 1}};
  REQUIRE_THROWS_WITH(estimate_costs(default_gas_table(), 1.897, 4182471.9949, counts),
                      ContainsSubstring("unknown contract"));
}

TEST_CASE("cost serializations are stable") {
  const auto counts = count_contract_events(synthetic_events());
  const CostReport a = estimate_costs(default_gas_table(), 1.897, 4182471.9949, counts);
  const CostReport b = estimate_costs(default_gas_table(), 1.897, 4182471.9949, counts);
  REQUIRE(cost_report_to_csv(a) == cost_report_to_csv(b));
  REQUIRE(cost_report_to_json(a, 1.897, 4182471.9949).dump() ==
          cost_report_to_json(b, 1.897, 4182471.9949).dump());
  REQUIRE(cost_report_to_csv(a).rfind("contract,gas,ether,usd,count,total_ether,total_usd\n",
                                      0) == 0);
}
