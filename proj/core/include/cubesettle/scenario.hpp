#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cubesettle/broker.hpp"
#include "cubesettle/edge.hpp"
#include "cubesettle/ledger.hpp"

namespace cubesettle {

struct ProducerSpec {
  std::string id;
  std::set<std::string> topics;
  bool operator==(const ProducerSpec&) const = default;
};

struct ConsumerSpec {
  std::string id;
  bool operator==(const ConsumerSpec&) const = default;
};

struct AgreementSpec {
  std::string producer;
  std::string consumer;
  std::set<std::string> topics;
  Timestamp window_start{};
  Timestamp window_end{};
  bool operator==(const AgreementSpec&) const = default;
};

// Either a steady rate or an explicit list of publish times.
struct FlowSpec {
  std::string producer;
  std::string topic;
  std::optional<double> rate_per_s;
  std::vector<Timestamp> times;
  bool operator==(const FlowSpec&) const = default;
};

struct TrafficSpec {
  Timestamp duration_s = 0;
  std::vector<FlowSpec> flows;
  bool operator==(const TrafficSpec&) const = default;
};

struct LossSpec {
  enum class Kind { None, Seeded, Explicit };
  Kind kind = Kind::None;
  double drop_probability = 0.0;
  std::vector<ExplicitLossModel::Drop> drops;
  bool operator==(const LossSpec&) const = default;
};

struct LedgerSpec {
  GasMode mode = GasMode::Plain;
  Wei gas_price = 900'000'000;  // wei per gas; JSON carries a decimal gwei string
  double eth_usd = 220.0;
  std::map<std::string, Wei> producer_balances;
  std::map<std::string, Wei> consumer_balances;
  bool operator==(const LedgerSpec&) const = default;
};

struct SettlementSpec {
  Timestamp window_s = 0;
  std::uint32_t settlements_per_window = 1;
  bool operator==(const SettlementSpec&) const = default;
};

// Declarative simulation input: participants, prices, agreements, traffic,
// misbehavior, and the ledger configuration. Fully validated on load.
struct Scenario {
  std::vector<ProducerSpec> producers;
  std::vector<ConsumerSpec> consumers;
  std::set<std::string> topics;
  std::map<std::string, Wei> prices_wei;
  std::vector<AgreementSpec> agreements;
  TrafficSpec traffic;
  LossSpec loss;
  std::vector<FaultSpec> faults;
  std::vector<BrokerFault> broker_faults;
  LedgerSpec ledger;
  SettlementSpec settlement;
  std::uint64_t seed = 0;
};

bool operator==(const Scenario& a, const Scenario& b);

// Throws Error(Errc::ParseError) with line/column for malformed JSON, or
// ValidationError carrying every problem found.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

// Canonical form: parse_scenario(scenario_to_json(s)) == s.
std::string scenario_to_json(const Scenario& scenario);

}  // namespace cubesettle
