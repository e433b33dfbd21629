#include "cubesettle/economics.hpp"

#include <cstdio>
#include <ostream>

#include "cubesettle/units.hpp"

namespace cubesettle {

CostModel CostModel::plain(bool amortized) {
  CostModel model;
  model.schedule = GasSchedule::plain();
  model.per_settlement_gas = amortized ? kPlainSettlementGasAmortized : kPlainSettlementGas;
  model.include_deployment = amortized;
  return model;
}

CostModel CostModel::oraclize(bool amortized) {
  CostModel model;
  model.schedule = GasSchedule::oraclize();
  model.per_settlement_gas = kOraclizeSettlementGas;
  model.include_deployment = amortized;
  return model;
}

Gas settlement_gas(const CostModel& model, std::uint64_t n_settlements) {
  if (n_settlements < 1) {
    throw Error(Errc::ValidationFailed, "need at least one settlement");
  }
  Gas gas = model.include_deployment ? model.schedule.deployment : 0;
  return checked_add(gas, checked_mul(model.per_settlement_gas, n_settlements));
}

PriceQuote min_data_price(const CostModel& model, std::uint64_t n_settlements,
                          std::uint64_t n_data) {
  if (n_data < 1) {
    throw Error(Errc::ValidationFailed, "need at least one datum");
  }
  if (model.gas_price == 0) {
    throw Error(Errc::NonPositiveGasPrice, "gas price must be positive");
  }
  PriceQuote quote;
  quote.n_settlements = n_settlements;
  quote.n_data = n_data;
  quote.mode = model.schedule.mode;
  quote.total_wei = checked_mul(settlement_gas(model, n_settlements), model.gas_price);
  quote.eth = wei_to_ether(quote.total_wei) / static_cast<double>(n_data);
  quote.usd = ether_to_usd(quote.eth, model.eth_usd);
  return quote;
}

std::vector<CurvePoint> cost_curve(const CostModel& model, std::uint64_t n_settlements,
                                   std::uint64_t n_data, Wei from_gas_price, Wei to_gas_price,
                                   std::size_t steps) {
  if (from_gas_price == 0 || to_gas_price <= from_gas_price) {
    throw Error(Errc::ValidationFailed, "need 0 < from < to for the gas price range");
  }
  if (steps < 2) {
    throw Error(Errc::ValidationFailed, "need at least two curve points");
  }
  Gas gas = settlement_gas(model, n_settlements);
  std::vector<CurvePoint> curve;
  curve.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    // Integer interpolation keeps both endpoints exact.
    Wei price = from_gas_price + (to_gas_price - from_gas_price) * static_cast<Wei>(i) /
                                     static_cast<Wei>(steps - 1);
    Wei total = checked_mul(gas, price);
    CurvePoint point;
    point.gas_price_gwei = wei_to_gwei(price);
    point.total_eth = wei_to_ether(total);
    point.total_usd = ether_to_usd(point.total_eth, model.eth_usd);
    point.per_data_eth = point.total_eth / static_cast<double>(n_data);
    curve.push_back(point);
  }
  return curve;
}

PriceQuote profitable_price(const CostModel& model, std::uint64_t daily_messages,
                            double overhead_fraction, std::uint64_t settlements_per_day) {
  if (daily_messages < 1 || settlements_per_day < 1) {
    throw Error(Errc::ValidationFailed, "need positive message and settlement counts");
  }
  if (overhead_fraction <= 0.0 || overhead_fraction >= 1.0) {
    throw Error(Errc::ValidationFailed, "overhead fraction must lie in (0, 1)");
  }
  // Settlement cost only; deployment is a one-off, not a running cost.
  Wei daily_wei =
      checked_mul(checked_mul(model.per_settlement_gas, settlements_per_day), model.gas_price);
  PriceQuote quote;
  quote.n_settlements = settlements_per_day;
  quote.n_data = daily_messages;
  quote.mode = model.schedule.mode;
  quote.total_wei = daily_wei;
  quote.eth =
      wei_to_ether(daily_wei) / (overhead_fraction * static_cast<double>(daily_messages));
  quote.usd = ether_to_usd(quote.eth, model.eth_usd);
  return quote;
}

std::vector<DataPriceRow> data_price_table(double overhead_fraction,
                                           std::uint64_t settlements_per_day) {
  const std::pair<const char*, std::uint64_t> rates[] = {
      {"high", 86400}, {"medium", 1440}, {"low", 24}};
  std::vector<DataPriceRow> rows;
  for (const auto& [label, daily_messages] : rates) {
    for (GasMode mode : {GasMode::Plain, GasMode::Oraclize}) {
      CostModel model = mode == GasMode::Plain ? CostModel::plain() : CostModel::oraclize();
      PriceQuote quote =
          profitable_price(model, daily_messages, overhead_fraction, settlements_per_day);
      rows.push_back(DataPriceRow{label, mode, quote.eth, quote.usd});
    }
  }
  return rows;
}

void write_data_price_csv(std::ostream& out, const std::vector<DataPriceRow>& rows) {
  out << "rate,mode,eth,usd\n";
  for (const auto& row : rows) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.10g\n", row.rate.c_str(),
                  gas_mode_name(row.mode), row.eth, row.usd);
    out << buf;
  }
}

void write_curve_csv(std::ostream& out, const std::vector<CurvePoint>& curve,
                     std::uint64_t n_settlements, std::uint64_t n_data) {
  out << "gas_price_gwei,n_settlements,n_data,total_eth,total_usd,per_data_eth\n";
  for (const auto& point : curve) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.10g,%llu,%llu,%.10g,%.10g,%.10g\n", point.gas_price_gwei,
                  static_cast<unsigned long long>(n_settlements),
                  static_cast<unsigned long long>(n_data), point.total_eth, point.total_usd,
                  point.per_data_eth);
    out << buf;
  }
}

}  // namespace cubesettle
