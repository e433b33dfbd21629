#include "cubesettle/reproduce.hpp"

#include <cmath>
#include <ostream>

#include "cubesettle/economics.hpp"
#include "cubesettle/units.hpp"

namespace cubesettle {

namespace {

constexpr double kTolerance = 0.01;  // 1% against 3-significant-digit references
constexpr Wei kLowGasPrice = 900'000'000;     // 0.9 gwei
constexpr Wei kHighGasPrice = 20'000'000'000;  // 20 gwei

double rel_err(double computed, double published) {
  if (published == 0.0) return computed == 0.0 ? 0.0 : 1.0;
  return std::fabs(computed - published) / std::fabs(published);
}

void check(ReproResult& result, const std::string& label, double computed, double published,
           double tolerance) {
  ReproRow row;
  row.label = label;
  row.computed = computed;
  row.published = published;
  row.tolerance = tolerance;
  row.rel_err = rel_err(computed, published);
  row.pass = row.rel_err <= tolerance;
  result.pass = result.pass && row.pass;
  result.rows.push_back(std::move(row));
}

ReproResult reproduce_table1() {
  ReproResult result;
  result.which = "table1";
  const GasSchedule plain = GasSchedule::plain();
  const GasSchedule oraclize = GasSchedule::oraclize();
  check(result, "plain deployment gas", static_cast<double>(plain.deployment), 175000, 0.0);
  check(result, "plain update gas", static_cast<double>(plain.update), 41000, 0.0);
  check(result, "plain callback gas", static_cast<double>(plain.callback), 23000, 0.0);
  check(result, "plain transfer gas", static_cast<double>(plain.transfer), 21000, 0.0);
  check(result, "oraclize deployment gas", static_cast<double>(oraclize.deployment), 2061490, 0.0);
  check(result, "oraclize update gas", static_cast<double>(oraclize.update), 120000, 0.0);
  check(result, "oraclize callback gas", static_cast<double>(oraclize.callback), 70000, 0.0);
  check(result, "oraclize transfer gas", static_cast<double>(oraclize.transfer), 21000, 0.0);
  return result;
}

// Reference data prices per message rate: 0.9 gwei, standalone settlement
// gas, 2% overhead, one settlement per day.
ReproResult reproduce_table2() {
  ReproResult result;
  result.which = "table2";
  struct Row {
    const char* rate;
    std::uint64_t daily_messages;
    double plain_eth, plain_usd, oraclize_eth, oraclize_usd;
  };
  const Row rows[] = {
      {"high", 86400, 5.73e-8, 1.26e-5, 2.09e-7, 4.59e-5},
      {"medium", 1440, 3.44e-6, 7.56e-4, 1.25e-5, 2.76e-3},
      {"low", 24, 2.06e-4, 4.54e-2, 7.52e-4, 1.65e-1},
  };
  for (const auto& row : rows) {
    PriceQuote plain = profitable_price(CostModel::plain(), row.daily_messages, 0.02, 1);
    PriceQuote oraclize = profitable_price(CostModel::oraclize(), row.daily_messages, 0.02, 1);
    std::string rate(row.rate);
    check(result, rate + " plain eth", plain.eth, row.plain_eth, kTolerance);
    check(result, rate + " plain usd", plain.usd, row.plain_usd, kTolerance);
    check(result, rate + " oraclize eth", oraclize.eth, row.oraclize_eth, kTolerance);
    check(result, rate + " oraclize usd", oraclize.usd, row.oraclize_usd, kTolerance);
  }
  return result;
}

// Per-datum price of settling 2000 data, amortising the deployment, at the
// two reference gas prices.
ReproResult reproduce_fig2a() {
  ReproResult result;
  result.which = "fig2a";
  struct Case {
    const char* label;
    CostModel model;
    std::uint64_t n_settlements;
    double low_eth, high_eth;
  };
  const Case cases[] = {
      {"plain n=1", CostModel::plain(/*amortized=*/true), 1, 1.26e-7, 2.8e-6},
      {"plain n=5", CostModel::plain(/*amortized=*/true), 5, 3.15e-7, 7e-6},
      {"oraclize n=1", CostModel::oraclize(/*amortized=*/true), 1, 1.11e-6, 2.46e-5},
      {"oraclize n=5", CostModel::oraclize(/*amortized=*/true), 5, 1.83e-6, 4.07e-5},
  };
  for (const auto& c : cases) {
    auto curve = cost_curve(c.model, c.n_settlements, 2000, kLowGasPrice, kHighGasPrice, 2);
    std::string label(c.label);
    check(result, label + " @0.9 gwei eth/datum", curve.front().per_data_eth, c.low_eth,
          kTolerance);
    check(result, label + " @20 gwei eth/datum", curve.back().per_data_eth, c.high_eth,
          kTolerance);
  }
  return result;
}

ReproResult reproduce_curve(const char* which, CostModel model, double low_eth, double low_usd,
                            double high_eth, double high_usd) {
  ReproResult result;
  result.which = which;
  auto curve = cost_curve(model, 1, 1, kLowGasPrice, kHighGasPrice, 2);
  check(result, "single settlement @0.9 gwei eth", curve.front().total_eth, low_eth, kTolerance);
  check(result, "single settlement @0.9 gwei usd", curve.front().total_usd, low_usd, kTolerance);
  check(result, "single settlement @20 gwei eth", curve.back().total_eth, high_eth, kTolerance);
  check(result, "single settlement @20 gwei usd", curve.back().total_usd, high_usd, kTolerance);
  return result;
}

}  // namespace

std::vector<std::string> reproduce_targets() {
  return {"table1", "table2", "fig2a", "fig2b", "fig2c"};
}

ReproResult reproduce(const std::string& which) {
  if (which == "table1") return reproduce_table1();
  if (which == "table2") return reproduce_table2();
  if (which == "fig2a") return reproduce_fig2a();
  if (which == "fig2b") {
    return reproduce_curve("fig2b", CostModel::plain(), 9.9e-5, 2.18e-2, 2.2e-3, 4.84e-1);
  }
  if (which == "fig2c") {
    return reproduce_curve("fig2c", CostModel::oraclize(), 3.61e-4, 7.94e-2, 8.02e-3, 1.76);
  }
  throw Error(Errc::ValidationFailed,
              "unknown reproduction target '" + which + "' (table1|table2|fig2a|fig2b|fig2c)");
}

void print_repro(std::ostream& out, const ReproResult& result) {
  out << "== " << result.which << " ==\n";
  for (const auto& row : result.rows) {
    out << (row.pass ? "  ok   " : "  FAIL ") << row.label << ": computed "
        << format_sig3(row.computed) << ", reference " << format_sig3(row.published)
        << ", rel err " << format_sig3(row.rel_err) << "\n";
  }
  out << (result.pass ? "PASS" : "FAIL") << " " << result.which << " (" << result.rows.size()
      << " checks)\n";
}

}  // namespace cubesettle
