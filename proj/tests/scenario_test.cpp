#include "cubesettle/scenario.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cubesettle/report.hpp"
#include "test_support.hpp"

namespace cubesettle {
namespace {

const char* kMinimalScenario = R"json({
  "participants": {
    "producers": [{"id": "p1", "topics": ["t1"]}],
    "consumers": [{"id": "c1"}]
  },
  "topics": ["t1"],
  "prices_wei": {"t1": 1000},
  "agreements": [
    {"producer": "p1", "consumer": "c1", "topics": ["t1"], "window": [0, 100]}
  ],
  "traffic": {
    "duration_s": 100,
    "flows": [{"producer": "p1", "topic": "t1", "rate_per_s": 1.0}]
  },
  "loss": {"kind": "none"},
  "faults": [],
  "ledger": {
    "mode": "plain",
    "gas_price_gwei": "0.9",
    "eth_usd": 220.0,
    "initial_balances_wei": {
      "producers": {"p1": 100000000000000000},
      "consumers": {"c1": 1000000000000000000}
    }
  },
  "settlement": {"window_s": 100, "settlements_per_window": 1},
  "seed": 42
})json";

Scenario minimal() { return parse_scenario(kMinimalScenario); }

TEST(LoadScenario, MinimalFileParses) {
  Scenario s = minimal();
  EXPECT_EQ(s.producers.size(), 1u);
  EXPECT_EQ(s.consumers.size(), 1u);
  EXPECT_EQ(s.prices_wei.at("t1"), 1000u);
  EXPECT_EQ(s.ledger.gas_price, 900'000'000ULL);
  EXPECT_EQ(s.seed, 42u);
}

TEST(LoadScenario, UnknownAgreementTopicIsCollected) {
  std::string text = kMinimalScenario;
  auto pos = text.find("\"topics\": [\"t1\"], \"window\"");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, std::string("\"topics\": [\"t1\"]").size(), "\"topics\": [\"t3\"]");
  try {
    parse_scenario(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    bool found = false;
    for (const auto& issue : e.issues()) {
      if (issue.find("TopicNotOffered") != std::string::npos &&
          issue.find("t3") != std::string::npos) {
        found = true;
      }
    }
    EXPECT_TRUE(found) << e.what();
  }
}

TEST(LoadScenario, MalformedJsonReportsLineAndColumn) {
  try {
    parse_scenario("{\n  \"participants\": [,]\n}");
    FAIL() << "expected ParseError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
  }
}

TEST(LoadScenario, AllValidationErrorsAreReportedTogether) {
  std::string text = R"json({
    "participants": {"producers": [{"id": "p1", "topics": ["ghost"]}], "consumers": []},
    "topics": ["t1"],
    "prices_wei": {"zzz": 5},
    "agreements": [
      {"producer": "p9", "consumer": "c9", "topics": [], "window": [100, 100]}
    ],
    "traffic": {"duration_s": 0, "flows": []},
    "ledger": {"mode": "plain", "gas_price_gwei": "0.9", "eth_usd": 220.0},
    "settlement": {"window_s": 0},
    "seed": 1
  })json";
  try {
    parse_scenario(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_GE(e.issues().size(), 6u) << e.what();
  }
}

TEST(LoadScenario, OverlappingPairAgreementsRejected) {
  std::string text = kMinimalScenario;
  auto pos = text.find("{\"producer\": \"p1\", \"consumer\": \"c1\", \"topics\": [\"t1\"], \"window\": [0, 100]}");
  ASSERT_NE(pos, std::string::npos);
  std::string two =
      "{\"producer\": \"p1\", \"consumer\": \"c1\", \"topics\": [\"t1\"], \"window\": [0, 60]},\n"
      "    {\"producer\": \"p1\", \"consumer\": \"c1\", \"topics\": [\"t1\"], \"window\": [50, 100]}";
  text.replace(pos, std::string("{\"producer\": \"p1\", \"consumer\": \"c1\", \"topics\": [\"t1\"], \"window\": [0, 100]}").size(), two);
  try {
    parse_scenario(text);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    bool found = false;
    for (const auto& issue : e.issues()) {
      if (issue.find("OverlappingAgreement") != std::string::npos) found = true;
    }
    EXPECT_TRUE(found) << e.what();
  }
}

TEST(LoadScenario, FromDiskAndMissingFile) {
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / "cubesettle_scenario_test.json";
  {
    std::ofstream out(path);
    out << kMinimalScenario;
  }
  Scenario s = load_scenario(path.string());
  EXPECT_EQ(s.producers.size(), 1u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_scenario(path.string()), Error);
}

TEST(ScenarioJson, RoundTripsCanonically) {
  Scenario s = minimal();
  EXPECT_EQ(parse_scenario(scenario_to_json(s)), s);

  // A scenario exercising every optional corner: faults, loss, broker
  // faults, explicit times, oraclize mode.
  Scenario fancy = testsupport::random_honest_scenario(3);
  testsupport::add_random_faults(fancy, 3, testsupport::FaultSide::Consumers);
  fancy.loss.kind = LossSpec::Kind::Seeded;
  fancy.loss.drop_probability = 0.25;
  fancy.broker_faults.push_back(InflateKey{
      TripleKey{producer_id(fancy.producers[0].id), consumer_id(fancy.consumers[0].id),
                Topic{*fancy.producers[0].topics.begin()}},
      4});
  EXPECT_EQ(parse_scenario(scenario_to_json(fancy)), fancy);

  Scenario lossy = minimal();
  lossy.loss.kind = LossSpec::Kind::Explicit;
  lossy.loss.drops.push_back({"p1", "t1", 3, "c1"});
  EXPECT_EQ(parse_scenario(scenario_to_json(lossy)), lossy);
}

TEST(RunScenario, HonestPairPaysTheRecountedFee) {
  RunReport report = run_scenario(minimal());
  EXPECT_EQ(report.totals.messages, 100u);
  EXPECT_EQ(report.totals.paid_pairs, 1u);
  EXPECT_EQ(report.totals.fees_paid, 100'000u);
  EXPECT_EQ(report.totals.disputed_pairs, 0u);
}

TEST(RunScenario, OverReportingProducerIsDisputedAndUnpaid) {
  Scenario s = minimal();
  FaultSpec fault;
  fault.target = producer_id("p1");
  fault.kind = OverReport{std::nullopt, 10};
  s.faults.push_back(fault);

  SimulationResult sim = simulate(s);
  RunReport report = build_report(s, sim);
  EXPECT_EQ(report.totals.disputed_pairs, 1u);
  EXPECT_EQ(report.totals.paid_pairs, 0u);
  EXPECT_EQ(report.totals.fees_paid, 0u);
  ASSERT_EQ(report.disputes.size(), 1u);
  EXPECT_EQ(report.disputes[0].inequality.claimed_sent, 110u);
  EXPECT_EQ(report.disputes[0].inequality.claimed_received, 100u);
  // The producer got no payment: its only balance change is update gas.
  Wei update_gas = 41000ULL * s.ledger.gas_price;
  EXPECT_EQ(sim.ledger->balance(sim.accounts.at(producer_id("p1"))),
            100'000'000'000'000'000ULL - update_gas);
}

TEST(RunScenario, SameSeedSameFingerprint) {
  Scenario s = minimal();
  RunReport a = run_scenario(s);
  RunReport b = run_scenario(s);
  EXPECT_EQ(a.fingerprint, b.fingerprint);
  EXPECT_EQ(a.canonical_json, b.canonical_json);

  RunReport c = run_scenario(s, /*seed_override=*/1234);
  EXPECT_EQ(c.canonical_json.find("\"seed\": 1234") != std::string::npos, true);
}

TEST(RunScenario, SeededLossYieldsInequalitiesNotFalsePayments) {
  Scenario s = minimal();
  s.loss.kind = LossSpec::Kind::Seeded;
  s.loss.drop_probability = 0.3;
  RunReport report = run_scenario(s);
  // Dropped deliveries surface as sent > received disputes; payment is
  // withheld for the pair.
  EXPECT_EQ(report.totals.disputed_pairs, 1u);
  EXPECT_EQ(report.totals.fees_paid, 0u);
  ASSERT_FALSE(report.disputes.empty());
  EXPECT_GT(report.disputes[0].inequality.claimed_sent,
            report.disputes[0].inequality.claimed_received);
}

TEST(RunScenario, MultiWindowTotalsEqualWindowSums) {
  Scenario s = minimal();
  s.settlement.window_s = 50;  // two windows
  RunReport report = run_scenario(s);
  EXPECT_EQ(report.totals.paid_pairs, 2u);
  EXPECT_EQ(report.totals.fees_paid, 100'000u);  // 50k per window
  EXPECT_EQ(report.settlements.size(), 2u);

  Scenario split = minimal();
  split.settlement.settlements_per_window = 2;  // same thing via sub-windows
  RunReport report2 = run_scenario(split);
  EXPECT_EQ(report2.totals.fees_paid, 100'000u);
  EXPECT_EQ(report2.settlements.size(), 2u);
}

TEST(RunScenario, BrokerCubeFaultsPerturbTheComparisonArtifactOnly) {
  Scenario s = minimal();
  s.broker_faults.push_back(
      InflateKey{TripleKey{producer_id("p1"), consumer_id("c1"), Topic{"t1"}}, 7});
  SimulationResult sim = simulate(s);
  ASSERT_EQ(sim.windows.size(), 1u);
  TripleKey key{producer_id("p1"), consumer_id("c1"), Topic{"t1"}};
  EXPECT_EQ(sim.windows[0].global_cube.count_of(key), 100u);
  EXPECT_EQ(sim.windows[0].reported_broker_cube.count_of(key), 107u);
  // Settlement never reads the broker cube: the pair still pays honestly.
  RunReport report = build_report(s, sim);
  EXPECT_EQ(report.totals.paid_pairs, 1u);
  EXPECT_EQ(report.totals.fees_paid, 100'000u);
}

TEST(RunScenario, PipelineErrorsAreTaggedWithTheWindow) {
  Scenario s = minimal();
  s.broker_faults.push_back(
      DropKey{TripleKey{producer_id("p1"), consumer_id("c1"), Topic{"t2"}}});
  // t2 is not a scenario topic, so make it one to pass validation but leave
  // the cube key absent at runtime.
  s.topics.insert("t2");
  s.prices_wei["t2"] = 1;
  s.producers[0].topics.insert("t2");
  try {
    simulate(s);
    FAIL() << "expected UnknownKey";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownKey);
    EXPECT_NE(std::string(e.what()).find("window [0, 100)"), std::string::npos) << e.what();
  }
}

TEST(EmitReport, JsonAndCsvSurfaces) {
  RunReport report = run_scenario(minimal());
  auto dir = std::filesystem::temp_directory_path() / "cubesettle_emit_test";
  std::filesystem::remove_all(dir);

  auto json_files = emit_report(report, ReportFormat::Json, dir.string());
  ASSERT_EQ(json_files.size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(json_files[0]));
  {
    std::ifstream in(json_files[0]);
    std::stringstream buffer;
    buffer << in.rdbuf();
    EXPECT_EQ(buffer.str(), report.canonical_json);
  }

  auto csv_files = emit_report(report, ReportFormat::Csv, dir.string());
  ASSERT_EQ(csv_files.size(), 3u);
  for (const auto& f : csv_files) {
    EXPECT_TRUE(std::filesystem::exists(f)) << f;
  }
  std::ifstream receipts(dir / "receipts.csv");
  std::string header;
  std::getline(receipts, header);
  EXPECT_EQ(header, "tx_id,kind,gas_used,gas_price_wei,fee_wei,payer,latency_s");

  std::filesystem::remove_all(dir);
  EXPECT_THROW(emit_report(report, ReportFormat::Json, "/dev/null/nope"), Error);
}

}  // namespace
}  // namespace cubesettle
