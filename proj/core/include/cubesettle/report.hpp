#pragma once

#include <string>
#include <vector>

#include "cubesettle/simulation.hpp"

namespace cubesettle {

// Deterministic structured output of a run. The canonical JSON is byte
// stable for a given (scenario, seed); the fingerprint is a 64-bit FNV-1a
// hash of the canonical body and doubles as the determinism check.
struct RunReport {
  struct Totals {
    std::uint64_t messages = 0;
    std::uint64_t deliveries = 0;
    Wei fees_paid = 0;
    Wei miner_fees = 0;
    std::uint64_t paid_pairs = 0;
    std::uint64_t disputed_pairs = 0;
    std::uint64_t unsettleable_pairs = 0;
    std::uint64_t failed_pairs = 0;
    std::uint64_t inequalities = 0;
  };

  struct DisputeRow {
    Window window;
    Inequality inequality;
  };

  struct SettlementRow {
    Window window;
    ParticipantId producer;
    ParticipantId consumer;
    PairStatus status{};
    Wei fee = 0;
  };

  std::string canonical_json;
  std::string fingerprint;
  Totals totals;
  std::vector<TxReceipt> receipts;  // deployment first, then tx order
  std::vector<DisputeRow> disputes;
  std::vector<SettlementRow> settlements;
};

RunReport build_report(const Scenario& scenario, const SimulationResult& result);

// load + simulate + build in one step.
RunReport run_scenario(const Scenario& scenario,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

enum class ReportFormat { Json, Csv };

// Writes report.json, or receipts.csv / disputes.csv / settlements.csv.
// Returns the paths written; throws Error(Errc::IoError) on failure.
std::vector<std::string> emit_report(const RunReport& report, ReportFormat format,
                                     const std::string& out_dir);

}  // namespace cubesettle
