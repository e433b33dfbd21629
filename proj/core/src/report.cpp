#include "cubesettle/report.hpp"

#include <filesystem>
#include <fstream>

#include "cubesettle/version.hpp"
#include "json.hpp"

namespace cubesettle {

using nlohmann::json;

namespace {

json receipt_to_json(const TxReceipt& r) {
  json j{{"tx_id", r.id},
         {"kind", tx_kind_name(r.kind)},
         {"gas_used", r.gas_used},
         {"gas_price_wei", r.gas_price},
         {"fee_wei", r.fee},
         {"payer", r.payer},
         {"latency_s", r.latency_s}};
  if (r.recipient.has_value()) {
    j["recipient"] = *r.recipient;
    j["amount_wei"] = r.amount;
  }
  return j;
}

json traffic_cube_to_json(const TrafficCube& cube) {
  json entries = json::array();
  for (const auto& [key, count] : cube.entries) {
    entries.push_back(json::array({key.producer.id, key.consumer.id, key.topic.name, count}));
  }
  return json{{"entries", entries}, {"total", cube.total()}};
}

json publisher_cube_to_json(const ParticipantId& owner,
                            const std::optional<PublisherCube>& cube) {
  json j{{"producer", owner.id}, {"present", cube.has_value()}};
  if (cube.has_value()) {
    json entries = json::array();
    for (const auto& [topic, count] : cube->entries) {
      entries.push_back(json::array({topic.name, count}));
    }
    j["entries"] = entries;
    j["total"] = cube->total();
    j["complete"] = cube->complete;
  }
  return j;
}

json subscriber_cube_to_json(const ParticipantId& owner,
                             const std::optional<SubscriberCube>& cube) {
  json j{{"consumer", owner.id}, {"present", cube.has_value()}};
  if (cube.has_value()) {
    json entries = json::array();
    for (const auto& [key, count] : cube->entries) {
      entries.push_back(json::array({key.producer.id, key.topic.name, count}));
    }
    j["entries"] = entries;
    j["total"] = cube->total();
    j["complete"] = cube->complete;
  }
  return j;
}

json consistency_to_json(const ConsistencyReport& report) {
  json triples = json::array();
  for (const auto& t : report.triples) {
    json row{{"producer", t.producer.id},
             {"consumer", t.consumer.id},
             {"topic", t.topic.name},
             {"state", triple_state_name(t.state)}};
    if (t.state == TripleState::NotCheckable) {
      row["reason"] = not_checkable_reason_name(t.reason);
    } else {
      row["sent"] = t.claimed_sent;
      row["received"] = t.claimed_received;
    }
    triples.push_back(row);
  }
  return json{{"overall", report.overall}, {"triples", triples}};
}

json propagation_to_json(const PropagationLog& log) {
  json fills = json::array();
  for (const auto& f : log.fills) {
    json sources = json::array();
    for (const auto& s : f.sources) sources.push_back(s.id);
    fills.push_back(json{{"side", f.side == PropagationFill::Side::Publisher ? "publisher" : "subscriber"},
                         {"owner", f.owner.id},
                         {"producer", f.producer.id},
                         {"topic", f.topic.name},
                         {"value", f.value},
                         {"sources", sources}});
  }
  json ambiguities = json::array();
  for (const auto& a : log.ambiguities) {
    json candidates = json::array();
    for (const auto& [who, value] : a.candidates) {
      candidates.push_back(json::array({who.id, value}));
    }
    ambiguities.push_back(
        json{{"producer", a.producer.id}, {"topic", a.topic.name}, {"candidates", candidates}});
  }
  return json{{"fills", fills}, {"ambiguities", ambiguities}};
}

json outcome_to_json(const PairOutcome& outcome) {
  json j{{"producer", outcome.producer.id},
         {"consumer", outcome.consumer.id},
         {"status", pair_status_name(outcome.status)}};
  if (outcome.status == PairStatus::Paid) {
    j["fee_wei"] = outcome.fee;
    if (outcome.transfer_tx.has_value()) j["transfer_tx"] = *outcome.transfer_tx;
  }
  if (!outcome.inequalities.empty()) {
    json rows = json::array();
    for (const auto& q : outcome.inequalities) {
      rows.push_back(json{{"producer", q.producer.id},
                          {"consumer", q.consumer.id},
                          {"topic", q.topic.name},
                          {"claimed_sent", q.claimed_sent},
                          {"claimed_received", q.claimed_received}});
    }
    j["inequalities"] = rows;
  }
  if (!outcome.missing.empty()) j["missing"] = outcome.missing;
  if (!outcome.detail.empty()) j["detail"] = outcome.detail;
  return j;
}

}  // namespace

RunReport build_report(const Scenario& scenario, const SimulationResult& result) {
  RunReport report;
  report.totals.messages = result.messages;
  report.totals.deliveries = result.deliveries;

  json windows = json::array();
  for (const auto& wr : result.windows) {
    json w;
    w["window"] = json::array({wr.window.start, wr.window.end});
    w["global_cube"] = traffic_cube_to_json(wr.global_cube);
    if (!scenario.broker_faults.empty()) {
      w["broker_cube_reported"] = traffic_cube_to_json(wr.reported_broker_cube);
    }
    json publishers = json::array();
    for (const auto& [owner, cube] : wr.settlement.submitted.publishers) {
      publishers.push_back(publisher_cube_to_json(owner, cube));
    }
    w["publisher_cubes"] = publishers;
    json subscribers = json::array();
    for (const auto& [owner, cube] : wr.settlement.submitted.subscribers) {
      subscribers.push_back(subscriber_cube_to_json(owner, cube));
    }
    w["subscriber_cubes"] = subscribers;
    w["propagation"] = propagation_to_json(wr.settlement.propagation);
    w["consistency"] = consistency_to_json(wr.settlement.consistency);

    json outcomes = json::array();
    for (const auto& outcome : wr.settlement.outcomes) {
      outcomes.push_back(outcome_to_json(outcome));
      report.settlements.push_back(RunReport::SettlementRow{
          wr.window, outcome.producer, outcome.consumer, outcome.status, outcome.fee});
      switch (outcome.status) {
        case PairStatus::Paid:
          ++report.totals.paid_pairs;
          report.totals.fees_paid += outcome.fee;
          break;
        case PairStatus::Disputed:
          ++report.totals.disputed_pairs;
          break;
        case PairStatus::Unsettleable:
          ++report.totals.unsettleable_pairs;
          break;
        case PairStatus::Failed:
          ++report.totals.failed_pairs;
          break;
      }
      for (const auto& q : outcome.inequalities) {
        ++report.totals.inequalities;
        report.disputes.push_back(RunReport::DisputeRow{wr.window, q});
      }
    }
    w["outcomes"] = outcomes;

    json receipts = json::array();
    for (const auto& r : wr.settlement.receipts) {
      receipts.push_back(receipt_to_json(r));
      report.receipts.push_back(r);
    }
    w["receipts"] = receipts;
    windows.push_back(w);
  }

  for (auto it = result.setup_receipts.rbegin(); it != result.setup_receipts.rend(); ++it) {
    report.receipts.insert(report.receipts.begin(), *it);
  }
  for (const auto& r : report.receipts) {
    report.totals.miner_fees += r.fee;
  }

  json body;
  body["version"] = kVersionString;
  body["seed"] = result.seed;
  body["ledger"] = json{{"mode", gas_mode_name(scenario.ledger.mode)},
                        {"gas_price_wei", scenario.ledger.gas_price},
                        {"eth_usd", scenario.ledger.eth_usd},
                        {"miner_pool_wei", result.ledger->miner_pool()}};
  json balances;
  for (const auto& account : result.ledger->accounts_snapshot()) {
    balances[to_string(account.owner)] = account.balance;
  }
  body["final_balances_wei"] = balances;
  json setup = json::array();
  for (const auto& r : result.setup_receipts) setup.push_back(receipt_to_json(r));
  body["setup_receipts"] = setup;
  body["totals"] = json{{"messages", report.totals.messages},
                        {"deliveries", report.totals.deliveries},
                        {"fees_paid_wei", report.totals.fees_paid},
                        {"miner_fees_wei", report.totals.miner_fees},
                        {"paid_pairs", report.totals.paid_pairs},
                        {"disputed_pairs", report.totals.disputed_pairs},
                        {"unsettleable_pairs", report.totals.unsettleable_pairs},
                        {"failed_pairs", report.totals.failed_pairs},
                        {"inequalities", report.totals.inequalities}};
  body["windows"] = windows;

  report.fingerprint = to_hex64(fnv1a64(body.dump()));
  body["fingerprint"] = report.fingerprint;
  report.canonical_json = body.dump(2) + "\n";
  return report;
}

RunReport run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed_override) {
  SimulationResult result = simulate(scenario, seed_override);
  return build_report(scenario, result);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
  }
  out << content;
  if (!out) {
    throw Error(Errc::IoError, "short write to '" + path.string() + "'");
  }
}

}  // namespace

std::vector<std::string> emit_report(const RunReport& report, ReportFormat format,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) {
    throw Error(Errc::IoError, "output directory '" + out_dir + "' is not writable");
  }

  std::vector<std::string> written;
  if (format == ReportFormat::Json) {
    fs::path path = dir / "report.json";
    write_file(path, report.canonical_json);
    written.push_back(path.string());
    return written;
  }

  {
    fs::path path = dir / "receipts.csv";
    std::string csv = "tx_id,kind,gas_used,gas_price_wei,fee_wei,payer,latency_s\n";
    for (const auto& r : report.receipts) {
      char latency[32];
      std::snprintf(latency, sizeof(latency), "%.6g", r.latency_s);
      csv += std::to_string(r.id) + "," + tx_kind_name(r.kind) + "," + std::to_string(r.gas_used) +
             "," + std::to_string(r.gas_price) + "," + std::to_string(r.fee) + "," +
             std::to_string(r.payer) + "," + latency + "\n";
    }
    write_file(path, csv);
    written.push_back(path.string());
  }
  {
    fs::path path = dir / "disputes.csv";
    std::string csv =
        "window_start,window_end,producer,consumer,topic,claimed_sent,claimed_received\n";
    for (const auto& row : report.disputes) {
      csv += std::to_string(row.window.start) + "," + std::to_string(row.window.end) + "," +
             row.inequality.producer.id + "," + row.inequality.consumer.id + "," +
             row.inequality.topic.name + "," + std::to_string(row.inequality.claimed_sent) + "," +
             std::to_string(row.inequality.claimed_received) + "\n";
    }
    write_file(path, csv);
    written.push_back(path.string());
  }
  {
    fs::path path = dir / "settlements.csv";
    std::string csv = "window_start,window_end,producer,consumer,status,fee_wei\n";
    for (const auto& row : report.settlements) {
      csv += std::to_string(row.window.start) + "," + std::to_string(row.window.end) + "," +
             row.producer.id + "," + row.consumer.id + "," + pair_status_name(row.status) + "," +
             std::to_string(row.fee) + "\n";
    }
    write_file(path, csv);
    written.push_back(path.string());
  }
  return written;
}

}  // namespace cubesettle
