#include "cubesettle/economics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "cubesettle/units.hpp"

namespace cubesettle {
namespace {

constexpr double kTol = 0.01;  // references carry three significant digits

void expect_close(double computed, double published) {
  EXPECT_NEAR(computed, published, std::fabs(published) * kTol);
}

TEST(SettlementGas, AmortizedCompositionAddsDeployment) {
  EXPECT_EQ(settlement_gas(CostModel::plain(true), 1), 280000u);
  EXPECT_EQ(settlement_gas(CostModel::plain(true), 5), 700000u);
  EXPECT_EQ(settlement_gas(CostModel::oraclize(true), 5), 4066490u);
  EXPECT_EQ(settlement_gas(CostModel::plain(), 1), 110000u);
  EXPECT_EQ(settlement_gas(CostModel::oraclize(), 1), 401000u);
  EXPECT_THROW(settlement_gas(CostModel::plain(), 0), Error);
}

TEST(MinDataPrice, ReproducesTheAmortizedFigures) {
  {
    PriceQuote quote = min_data_price(CostModel::plain(true), 1, 2000);
    expect_close(quote.eth, 1.26e-7);
    expect_close(quote.usd, 2.77e-5);
    EXPECT_EQ(quote.total_wei, 280000ULL * 900'000'000ULL);
  }
  {
    CostModel model = CostModel::oraclize(true);
    model.gas_price = parse_gwei_to_wei("20");
    PriceQuote quote = min_data_price(model, 1, 2000);
    expect_close(quote.eth, 2.46e-5);
  }
  {
    CostModel model = CostModel::plain(true);
    model.gas_price = parse_gwei_to_wei("20");
    expect_close(min_data_price(model, 5, 2000).eth, 7e-6);
  }
}

TEST(MinDataPrice, MonotoneInDataAndSettlements) {
  CostModel model = CostModel::plain(true);
  double prev = min_data_price(model, 1, 1).eth;
  for (std::uint64_t n_data : {2ULL, 10ULL, 100ULL, 10000ULL, 1000000ULL}) {
    double price = min_data_price(model, 1, n_data).eth;
    EXPECT_LE(price, prev);
    prev = price;
  }
  prev = 0.0;
  for (std::uint64_t n : {1ULL, 2ULL, 5ULL, 20ULL}) {
    double price = min_data_price(model, n, 2000).eth;
    EXPECT_GE(price, prev);
    prev = price;
  }
}

TEST(MinDataPrice, ExactlyLinearInGasPrice) {
  CostModel base = CostModel::plain(true);
  base.gas_price = 900'000'000;
  CostModel scaled = base;
  scaled.gas_price = base.gas_price * 7;
  // Integer-exact in wei before the per-datum division.
  EXPECT_EQ(min_data_price(scaled, 3, 500).total_wei, 7 * min_data_price(base, 3, 500).total_wei);
}

TEST(CostCurve, PlainStandaloneEndpoints) {
  auto curve = cost_curve(CostModel::plain(), 1, 1, parse_gwei_to_wei("0.9"),
                          parse_gwei_to_wei("20"), 2);
  ASSERT_EQ(curve.size(), 2u);
  expect_close(curve.front().total_eth, 9.9e-5);
  expect_close(curve.back().total_eth, 2.2e-3);
  expect_close(curve.front().total_usd, 2.18e-2);
  expect_close(curve.back().total_usd, 4.84e-1);
}

TEST(CostCurve, OraclizeStandaloneEndpoints) {
  auto curve = cost_curve(CostModel::oraclize(), 1, 1, parse_gwei_to_wei("0.9"),
                          parse_gwei_to_wei("20"), 2);
  expect_close(curve.front().total_eth, 3.61e-4);
  expect_close(curve.back().total_eth, 8.02e-3);
}

TEST(CostCurve, EvenSpacingInclusiveOfEndpoints) {
  auto curve = cost_curve(CostModel::plain(), 1, 1, parse_gwei_to_wei("1"),
                          parse_gwei_to_wei("5"), 5);
  ASSERT_EQ(curve.size(), 5u);
  EXPECT_DOUBLE_EQ(curve[0].gas_price_gwei, 1.0);
  EXPECT_DOUBLE_EQ(curve[1].gas_price_gwei, 2.0);
  EXPECT_DOUBLE_EQ(curve[4].gas_price_gwei, 5.0);
  EXPECT_THROW(cost_curve(CostModel::plain(), 1, 1, 0, 10, 2), Error);
  EXPECT_THROW(cost_curve(CostModel::plain(), 1, 1, 10, 5, 2), Error);
  EXPECT_THROW(cost_curve(CostModel::plain(), 1, 1, 5, 10, 1), Error);
}

TEST(ProfitablePrice, ReproducesTheReferenceRows) {
  // 2% overhead, one settlement per day, 0.9 gwei, standalone gas.
  expect_close(profitable_price(CostModel::plain(), 24, 0.02, 1).eth, 2.06e-4);
  expect_close(profitable_price(CostModel::plain(), 24, 0.02, 1).usd, 4.54e-2);
  expect_close(profitable_price(CostModel::plain(), 86400, 0.02, 1).eth, 5.73e-8);
  expect_close(profitable_price(CostModel::plain(), 86400, 0.02, 1).usd, 1.26e-5);
  expect_close(profitable_price(CostModel::oraclize(), 1440, 0.02, 1).eth, 1.25e-5);
  expect_close(profitable_price(CostModel::oraclize(), 1440, 0.02, 1).usd, 2.76e-3);
}

TEST(ProfitablePrice, OverheadIdentityHoldsToOneWei) {
  for (std::uint64_t messages : {24ULL, 1440ULL, 86400ULL}) {
    for (double overhead : {0.02, 0.1, 0.5}) {
      PriceQuote quote = profitable_price(CostModel::plain(), messages, overhead, 1);
      double daily_cost_wei = quote.eth * 1e18 * overhead * static_cast<double>(messages);
      EXPECT_NEAR(daily_cost_wei, static_cast<double>(quote.total_wei), 1.0);
    }
  }
  EXPECT_THROW(profitable_price(CostModel::plain(), 0, 0.02, 1), Error);
  EXPECT_THROW(profitable_price(CostModel::plain(), 10, 0.0, 1), Error);
  EXPECT_THROW(profitable_price(CostModel::plain(), 10, 1.0, 1), Error);
}

TEST(CostRatio, OraclizeRunsRoughlyFourTimesPlain) {
  double ratio = static_cast<double>(kOraclizeSettlementGas) /
                 static_cast<double>(kPlainSettlementGas);
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(DataPriceTable, SixRowsMatchingTheReferences) {
  auto rows = data_price_table();
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    if (row.rate == "high" && row.mode == GasMode::Plain) expect_close(row.eth, 5.73e-8);
    if (row.rate == "medium" && row.mode == GasMode::Oraclize) expect_close(row.eth, 1.25e-5);
    if (row.rate == "low" && row.mode == GasMode::Oraclize) expect_close(row.usd, 1.65e-1);
  }
  std::ostringstream out;
  write_data_price_csv(out, rows);
  std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rate,mode,eth,usd");
  EXPECT_NE(csv.find("high,plain,"), std::string::npos);
  EXPECT_NE(csv.find("low,oraclize,"), std::string::npos);
}

TEST(CurveCsv, HeaderMatchesTheExportContract) {
  auto curve = cost_curve(CostModel::plain(), 1, 1, parse_gwei_to_wei("0.9"),
                          parse_gwei_to_wei("20"), 2);
  std::ostringstream out;
  write_curve_csv(out, curve, 1, 1);
  std::string csv = out.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "gas_price_gwei,n_settlements,n_data,total_eth,total_usd,per_data_eth");
  EXPECT_NE(csv.find("0.9,1,1,"), std::string::npos);
}

}  // namespace
}  // namespace cubesettle
