#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cubesettle/scenario.hpp"
#include "cubesettle/settlement.hpp"

namespace cubesettle {

// Everything settled about one window: the broker's own view, the reported
// unilateral cubes, and the full settlement record.
struct WindowResult {
  Window window;
  TrafficCube global_cube;           // broker truth
  TrafficCube reported_broker_cube;  // after broker faults; comparison only
  CubeSet reported;                  // post participant faults, pre propagation
  WindowSettlement settlement;
};

struct SimulationResult {
  // Raw material for independent recounts.
  std::vector<LogTuple> broker_log;
  std::map<ParticipantId, std::vector<SentRecord>> sent_logs;
  std::map<ParticipantId, std::vector<ReceiptRecord>> receipt_logs;

  std::vector<WindowResult> windows;
  std::vector<TxReceipt> setup_receipts;  // contract deployment
  std::unique_ptr<Ledger> ledger;
  std::map<ParticipantId, AccountId> accounts;
  AccountId deployer = 0;
  unsigned __int128 initial_total_wei = 0;  // for conservation checks
  std::uint64_t seed = 0;
  std::uint64_t messages = 0;
  std::uint64_t deliveries = 0;
};

// Deterministic end-to-end pipeline per window: generate traffic, route and
// log through the broker, derive unilateral cubes, apply faults, settle on
// the ledger. Same (scenario, seed) always produces the same result.
SimulationResult simulate(const Scenario& scenario,
                          std::optional<std::uint64_t> seed_override = std::nullopt);

}  // namespace cubesettle
