// bets: deterministic simulator for a vehicular emissions cap-and-trade
// market with ledger-backed settlement. Subcommands: run, compare, sweep,
// costs, plot. All outputs land under --out-dir; failures print a
// machine-readable error record to stderr and exit nonzero.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bets/costs.hpp"
#include "bets/csv.hpp"
#include "bets/error.hpp"
#include "bets/latency.hpp"
#include "bets/scenario.hpp"
#include "bets/sim.hpp"
#include "bets/svg_plot.hpp"
#include "bets/version.hpp"

namespace {

struct CommonOpts {
  std::string scenario_path;
  uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--scenario,-s", opts.scenario_path,
                  "Scenario JSON file (defaults apply when omitted)");
  auto* seed_opt = cmd->add_option("--seed", opts.seed, "Override the scenario RNG seed");
  seed_opt->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--out-dir,-o", opts.out_dir, "Output directory")->capture_default_str();
}

bets::ScenarioConfig load_config(const CommonOpts& opts) {
  bets::ScenarioConfig cfg;
  if (!opts.scenario_path.empty()) {
    cfg = bets::load_scenario_file(opts.scenario_path);
  } else {
    bets::validate(cfg);
  }
  if (opts.seed_set) cfg.rng_seed = opts.seed;
  return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bets::Error("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<double> parse_grid(const std::string& csv) {
  std::vector<double> grid;
  for (const auto& cell : bets::split_csv_line(csv)) {
    grid.push_back(bets::parse_double(cell));
  }
  return grid;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic vehicular emissions cap-and-trade simulator"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write its outputs");
  add_common(run_cmd, opts);

  auto* compare_cmd =
      app.add_subcommand("compare", "Run baseline and dlt-controlled arms on the same seed");
  add_common(compare_cmd, opts);

  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate trade success over a parameter grid");
  add_common(sweep_cmd, opts);
  std::string sweep_param = "rel_speed";
  std::string sweep_grid = "10,20,30,40,50,60,70,80,90,100,110,120";
  uint64_t sweep_trials = 10000;
  sweep_cmd->add_option("--parameter", sweep_param,
                        "One of rel_speed, block_size, miner_count, data_rate")
      ->capture_default_str();
  sweep_cmd->add_option("--grid", sweep_grid, "Comma-separated grid values")
      ->capture_default_str();
  sweep_cmd->add_option("--trials", sweep_trials, "Monte Carlo trials per grid point")
      ->capture_default_str();

  auto* costs_cmd =
      app.add_subcommand("costs", "Estimate contract execution costs for one simulated run");
  add_common(costs_cmd, opts);
  double costs_gwei = 0;
  double costs_gwei_per_usd = 0;
  costs_cmd->add_option("--gas-price-gwei", costs_gwei,
                        "Gas price override (defaults to the scenario value)");
  costs_cmd->add_option("--gwei-per-usd", costs_gwei_per_usd,
                        "Conversion override (defaults to the scenario value)");

  auto* plot_cmd = app.add_subcommand("plot", "Render CSV tables produced by sweep/compare");
  add_common(plot_cmd, opts);
  std::string plot_kind;
  std::string plot_input;
  plot_cmd->add_option("--kind", plot_kind,
                       "One of latency_bound, emissions_compare, success_sweep")
      ->required();
  plot_cmd->add_option("--input", plot_input, "Input CSV table")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
    std::cerr << nlohmann::json{{"status", "error"},
                                {"stage", "argument-parsing"},
                                {"message", e.what()}}
                     .dump()
              << "\n";
    return e.get_exit_code();
  }

  try {
    namespace fs = std::filesystem;
    const fs::path out_dir(opts.out_dir);

    if (run_cmd->parsed()) {
      const auto cfg = load_config(opts);
      const auto rr = bets::run(cfg);
      bets::write_run_outputs(rr, out_dir);
    } else if (compare_cmd->parsed()) {
      const auto cfg = load_config(opts);
      const auto cr = bets::compare(cfg);
      bets::write_compare_outputs(cr, out_dir);
    } else if (sweep_cmd->parsed()) {
      const auto cfg = load_config(opts);
      const auto param = bets::sweep_parameter_from_string(sweep_param);
      const auto grid = parse_grid(sweep_grid);
      auto streams = bets::derive_streams(cfg);
      const auto table = bets::sweep(param, grid, cfg, sweep_trials, streams.mining);
      fs::create_directories(out_dir);
      std::string csv = bets::join_csv_line(table.header) + "\n";
      for (const auto& row : table.rows) csv += bets::join_csv_line(row) + "\n";
      write_text(out_dir / "sweep.csv", csv);
      auto manifest = bets::run_manifest(cfg);
      manifest["sweep"] = {{"parameter", sweep_param},
                           {"grid", grid},
                           {"trials", sweep_trials}};
      write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } else if (costs_cmd->parsed()) {
      const auto cfg = load_config(opts);
      const double gwei = costs_gwei > 0 ? costs_gwei : cfg.gas_price_gwei;
      const double per_usd = costs_gwei_per_usd > 0 ? costs_gwei_per_usd : cfg.gwei_per_usd;
      const auto rr = bets::run(cfg);
      const auto counts = bets::count_contract_events(rr.events);
      const auto report = bets::estimate_costs(bets::default_gas_table(), gwei, per_usd, counts);
      fs::create_directories(out_dir);
      write_text(out_dir / "costs.csv", bets::cost_report_to_csv(report));
      write_text(out_dir / "costs.json",
                 bets::cost_report_to_json(report, gwei, per_usd).dump(2) + "\n");
      auto manifest = bets::run_manifest(cfg);
      manifest["costs"] = {{"gas_price_gwei", gwei}, {"gwei_per_usd", per_usd}};
      write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } else if (plot_cmd->parsed()) {
      const auto kind = bets::plot_kind_from_string(plot_kind);
      const auto table = bets::read_csv_file(plot_input);
      const auto written = bets::emit_plots(kind, table, out_dir);
      nlohmann::json files = nlohmann::json::array();
      for (const auto& p : written) files.push_back(p.filename().string());
      const nlohmann::json manifest{{"code_version", bets::kVersion},
                                    {"plot", {{"kind", plot_kind}, {"input", plot_input}}},
                                    {"files", files}};
      write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"status", "error"},
                                {"command", app.get_subcommands().empty()
                                                ? std::string("?")
                                                : app.get_subcommands().front()->get_name()},
                                {"message", e.what()}}
                     .dump()
              << "\n";
    return 1;
  }
}
