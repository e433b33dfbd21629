// Scenario runner and cost-model CLI.
//
// Exit codes: 0 success, 1 validation failure, 2 reproduction tolerance
// failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cubesettle/economics.hpp"
#include "cubesettle/report.hpp"
#include "cubesettle/reproduce.hpp"
#include "cubesettle/version.hpp"

namespace {

using namespace cubesettle;

int run_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                 const std::string& out_dir, const std::string& format,
                 const std::string& export_log_path) {
  Scenario scenario = load_scenario(scenario_path);
  SimulationResult result = simulate(scenario, seed);
  RunReport report = build_report(scenario, result);

  if (!export_log_path.empty()) {
    std::filesystem::path path(export_log_path);
    if (path.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw Error(Errc::IoError, "cannot write '" + export_log_path + "'");
    }
    for (const auto& t : result.broker_log) {
      out << t.producer.id << ',' << t.consumer.id << ',' << t.topic.name << ',' << t.timestamp
          << '\n';
    }
    std::cout << "broker log written: " << export_log_path << "\n";
  }

  auto written = emit_report(report, format == "csv" ? ReportFormat::Csv : ReportFormat::Json,
                             out_dir);
  for (const auto& path : written) {
    std::cout << "report written: " << path << "\n";
  }
  std::cout << "messages " << report.totals.messages << ", deliveries "
            << report.totals.deliveries << ", paid " << report.totals.paid_pairs << ", disputed "
            << report.totals.disputed_pairs << ", unsettleable "
            << report.totals.unsettleable_pairs << ", failed " << report.totals.failed_pairs
            << "\n";
  std::cout << "fees paid " << report.totals.fees_paid << " wei, miner fees "
            << report.totals.miner_fees << " wei\n";
  std::cout << "fingerprint " << report.fingerprint << "\n";
  return 0;
}

CostModel make_model(const std::string& mode, bool amortized, const std::string& gas_price_gwei,
                     double eth_usd) {
  CostModel model =
      mode == "oraclize" ? CostModel::oraclize(amortized) : CostModel::plain(amortized);
  model.gas_price = parse_gwei_to_wei(gas_price_gwei);
  if (model.gas_price == 0) {
    throw Error(Errc::NonPositiveGasPrice, "gas price must be positive");
  }
  model.eth_usd = eth_usd;
  return model;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metered pub/sub trading simulator with cube settlement"};
  app.set_version_flag("--version", std::string("cubesettle ") + kVersionString);
  app.require_subcommand(1);

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a scenario end to end");
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "json";
  std::string export_log_path;
  simulate_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  simulate_cmd->add_option("--seed", seed, "Override the scenario seed");
  simulate_cmd->add_option("--out", out_dir, "Output directory");
  simulate_cmd->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  simulate_cmd->add_option("--export-log", export_log_path,
                           "Also write the raw broker log (producer,consumer,topic,timestamp)");

  // economics min-price | curve
  auto* economics_cmd = app.add_subcommand("economics", "Cost model queries");
  economics_cmd->require_subcommand(1);
  std::string mode = "plain";
  std::uint64_t settlements = 1;
  std::uint64_t data = 1;
  std::string gas_price_gwei = "0.9";
  std::string from_gwei = "0.9";
  std::string to_gwei = "20";
  std::size_t steps = 2;
  double eth_usd = kDefaultEthUsd;
  bool amortized = false;
  std::string curve_out;

  auto* min_price_cmd = economics_cmd->add_subcommand(
      "min-price", "Break-even per-datum price for a settlement strategy");
  min_price_cmd->add_option("--mode", mode, "Oracle strategy")
      ->check(CLI::IsMember({"plain", "oraclize"}))
      ->required();
  min_price_cmd->add_option("--settlements", settlements, "Settlement operations");
  min_price_cmd->add_option("--data", data, "Data items covered");
  min_price_cmd->add_option("--gas-price-gwei", gas_price_gwei, "Gas price (decimal gwei)");
  min_price_cmd->add_option("--eth-usd", eth_usd, "USD per ether");
  min_price_cmd->add_flag("--amortized", amortized,
                          "Amortised per-settlement gas, deployment included");

  auto* curve_cmd =
      economics_cmd->add_subcommand("curve", "Settlement cost across a gas price range");
  curve_cmd->add_option("--mode", mode, "Oracle strategy")
      ->check(CLI::IsMember({"plain", "oraclize"}))
      ->required();
  curve_cmd->add_option("--from-gwei", from_gwei, "Range start (decimal gwei)");
  curve_cmd->add_option("--to-gwei", to_gwei, "Range end (decimal gwei)");
  curve_cmd->add_option("--steps", steps, "Curve points, endpoints included");
  curve_cmd->add_option("--settlements", settlements, "Settlement operations");
  curve_cmd->add_option("--data", data, "Data items covered");
  curve_cmd->add_option("--eth-usd", eth_usd, "USD per ether");
  curve_cmd->add_flag("--amortized", amortized,
                      "Amortised per-settlement gas, deployment included");
  curve_cmd->add_option("--out", curve_out, "Write CSV here instead of stdout");

  // reproduce
  auto* reproduce_cmd =
      app.add_subcommand("reproduce", "Check the cost model against its reference figures");
  std::string which;
  std::string repro_csv;
  reproduce_cmd->add_option("which", which, "table1|table2|fig2a|fig2b|fig2c")
      ->check(CLI::IsMember(reproduce_targets()))
      ->required();
  reproduce_cmd->add_option("--csv", repro_csv,
                            "With table2: also write the computed prices as rate,mode,eth,usd");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate_cmd->parsed()) {
      return run_simulate(scenario_path, seed, out_dir, format, export_log_path);
    }
    if (min_price_cmd->parsed()) {
      CostModel model = make_model(mode, amortized, gas_price_gwei, eth_usd);
      PriceQuote quote = min_data_price(model, settlements, data);
      std::cout << "mode " << gas_mode_name(quote.mode) << ", settlements " << quote.n_settlements
                << ", data " << quote.n_data << ", gas price " << gas_price_gwei << " gwei\n";
      std::cout << "settlement cost " << quote.total_wei << " wei\n";
      std::cout << "min data price " << format_sig3(quote.eth) << " eth ($"
                << format_sig3(quote.usd) << ")\n";
      return 0;
    }
    if (curve_cmd->parsed()) {
      CostModel model = make_model(mode, amortized, gas_price_gwei, eth_usd);
      auto curve = cost_curve(model, settlements, data, parse_gwei_to_wei(from_gwei),
                              parse_gwei_to_wei(to_gwei), steps);
      if (curve_out.empty()) {
        write_curve_csv(std::cout, curve, settlements, data);
      } else {
        std::ofstream out(curve_out, std::ios::binary);
        if (!out) {
          throw Error(Errc::IoError, "cannot write '" + curve_out + "'");
        }
        write_curve_csv(out, curve, settlements, data);
        std::cout << "curve written: " << curve_out << "\n";
      }
      return 0;
    }
    if (reproduce_cmd->parsed()) {
      ReproResult result = reproduce(which);
      print_repro(std::cout, result);
      if (!repro_csv.empty()) {
        if (which != "table2") {
          throw Error(Errc::ValidationFailed, "--csv is only meaningful with table2");
        }
        std::ofstream out(repro_csv, std::ios::binary);
        if (!out) {
          throw Error(Errc::IoError, "cannot write '" + repro_csv + "'");
        }
        write_data_price_csv(out, data_price_table());
        std::cout << "price table written: " << repro_csv << "\n";
      }
      return result.pass ? 0 : 2;
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const auto& issue : e.issues()) {
      std::cerr << "  - " << issue << "\n";
    }
    return 1;
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
