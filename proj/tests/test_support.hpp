// Shared generators and brute-force oracles. The recounts here re-derive
// every figure with plain loops over the raw logs, independent of the cube
// aggregation code under test.

#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cubesettle/simulation.hpp"

namespace cubesettle::testsupport {

struct Recount {
  // (producer, consumer, topic) -> delivered copies, from the broker log
  std::map<std::tuple<std::string, std::string, std::string>, Count> delivered;
  // (producer, topic) -> sent messages, from the producers' local logs
  std::map<std::pair<std::string, std::string>, Count> sent;
  // (consumer, producer, topic) -> receipts, from the consumers' local logs
  std::map<std::tuple<std::string, std::string, std::string>, Count> received;
};

inline Recount recount_window(const SimulationResult& sim, const Window& w) {
  Recount r;
  for (const auto& t : sim.broker_log) {
    if (t.timestamp >= w.start && t.timestamp < w.end) {
      ++r.delivered[{t.producer.id, t.consumer.id, t.topic.name}];
    }
  }
  for (const auto& [who, log] : sim.sent_logs) {
    for (const auto& rec : log) {
      if (rec.timestamp >= w.start && rec.timestamp < w.end) {
        ++r.sent[{who.id, rec.topic.name}];
      }
    }
  }
  for (const auto& [who, log] : sim.receipt_logs) {
    for (const auto& rec : log) {
      if (rec.timestamp >= w.start && rec.timestamp < w.end) {
        ++r.received[{who.id, rec.producer.id, rec.topic.name}];
      }
    }
  }
  return r;
}

template <typename K>
inline Count lookup(const std::map<K, Count>& m, const K& k) {
  auto it = m.find(k);
  return it == m.end() ? 0 : it->second;
}

struct GeneratorOptions {
  int max_producers = 5;
  int max_consumers = 5;
  int max_topics = 6;
  std::uint64_t max_messages = 2000;
  bool two_windows = false;
};

// Whole-window agreements only, lossless, generously funded: every triple is
// checkable and every pair should settle cleanly.
inline Scenario random_honest_scenario(std::uint64_t seed, GeneratorOptions opt = {}) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  Scenario s;
  s.seed = seed;
  int n_topics = static_cast<int>(pick(1, opt.max_topics));
  for (int i = 0; i < n_topics; ++i) {
    std::string name = "t" + std::to_string(i + 1);
    s.topics.insert(name);
    s.prices_wei[name] = pick(0, 5000);
  }
  std::vector<std::string> topics(s.topics.begin(), s.topics.end());

  int n_producers = static_cast<int>(pick(1, opt.max_producers));
  for (int i = 0; i < n_producers; ++i) {
    ProducerSpec p;
    p.id = "p" + std::to_string(i + 1);
    for (const auto& t : topics) {
      if (pick(0, 99) < 60) p.topics.insert(t);
    }
    if (p.topics.empty()) p.topics.insert(topics[pick(0, topics.size() - 1)]);
    s.producers.push_back(std::move(p));
  }
  int n_consumers = static_cast<int>(pick(1, opt.max_consumers));
  for (int i = 0; i < n_consumers; ++i) {
    s.consumers.push_back(ConsumerSpec{"c" + std::to_string(i + 1)});
  }

  Timestamp duration = static_cast<Timestamp>(4 * pick(10, 60));
  s.traffic.duration_s = duration;
  s.settlement.window_s = opt.two_windows ? duration / 2 : duration;
  s.settlement.settlements_per_window = static_cast<std::uint32_t>(pick(1, 2));

  for (const auto& p : s.producers) {
    for (const auto& c : s.consumers) {
      if (pick(0, 99) >= 70) continue;
      AgreementSpec a;
      a.producer = p.id;
      a.consumer = c.id;
      std::vector<std::string> offered(p.topics.begin(), p.topics.end());
      for (const auto& t : offered) {
        if (pick(0, 99) < 60) a.topics.insert(t);
      }
      if (a.topics.empty()) a.topics.insert(offered[pick(0, offered.size() - 1)]);
      a.window_start = 0;
      a.window_end = duration;
      s.agreements.push_back(std::move(a));
    }
  }
  if (s.agreements.empty()) {
    AgreementSpec a;
    a.producer = s.producers.front().id;
    a.consumer = s.consumers.front().id;
    a.topics.insert(*s.producers.front().topics.begin());
    a.window_start = 0;
    a.window_end = duration;
    s.agreements.push_back(std::move(a));
  }

  std::uint64_t budget = pick(20, opt.max_messages);
  std::vector<std::pair<std::string, std::string>> channels;
  for (const auto& p : s.producers) {
    for (const auto& t : p.topics) channels.emplace_back(p.id, t);
  }
  std::uint64_t per_channel = std::max<std::uint64_t>(1, budget / channels.size());
  for (const auto& [producer, topic] : channels) {
    FlowSpec flow;
    flow.producer = producer;
    flow.topic = topic;
    std::uint64_t n = pick(0, per_channel);
    for (std::uint64_t m = 0; m < n; ++m) {
      flow.times.push_back(static_cast<Timestamp>(pick(0, duration - 1)));
    }
    if (flow.times.empty()) flow.times.push_back(static_cast<Timestamp>(pick(0, duration - 1)));
    s.traffic.flows.push_back(std::move(flow));
  }

  s.ledger.mode = (seed % 2 == 0) ? GasMode::Plain : GasMode::Oraclize;
  const char* gas_prices[] = {"0.9", "5", "20"};
  s.ledger.gas_price = parse_gwei_to_wei(gas_prices[seed % 3]);
  s.ledger.eth_usd = 220.0;
  for (const auto& p : s.producers) {
    s.ledger.producer_balances[p.id] = 100'000'000'000'000'000ULL;  // 0.1 ether
  }
  for (const auto& c : s.consumers) {
    s.ledger.consumer_balances[c.id] = 1'000'000'000'000'000'000ULL;  // 1 ether
  }
  return s;
}

enum class FaultSide { Producers, Consumers };

// Adds one fault per chosen target, all on one side, so every faulted pair
// keeps an honest counterpart.
inline void add_random_faults(Scenario& s, std::uint64_t seed, FaultSide side) {
  std::mt19937_64 rng(seed ^ 0xf00dfeedULL);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  auto agreement_topics = [&](const std::string& id, bool producer_side) {
    std::set<std::string> out;
    for (const auto& a : s.agreements) {
      if ((producer_side ? a.producer : a.consumer) == id) {
        out.insert(a.topics.begin(), a.topics.end());
      }
    }
    return out;
  };

  if (side == FaultSide::Producers) {
    std::size_t n_targets = std::min<std::size_t>(s.producers.size(), pick(1, 2));
    std::set<std::size_t> chosen;
    while (chosen.size() < n_targets) chosen.insert(pick(0, s.producers.size() - 1));
    for (std::size_t idx : chosen) {
      const auto& p = s.producers[idx];
      FaultSpec fault;
      fault.target = producer_id(p.id);
      switch (pick(0, 3)) {
        case 0:
          fault.kind = OverReport{std::nullopt, static_cast<std::int64_t>(pick(1, 5))};
          break;
        case 1: {
          const double factors[] = {1.25, 1.5, 2.0, 3.0};
          fault.kind = OverReport{factors[pick(0, 3)], std::nullopt};
          break;
        }
        case 2: {
          auto topics = agreement_topics(p.id, true);
          if (topics.empty()) topics = p.topics;
          std::vector<std::string> pool(topics.begin(), topics.end());
          std::int64_t delta = static_cast<std::int64_t>(pick(1, 5));
          if (pick(0, 1) == 1) delta = -delta;
          fault.kind = PerturbKey{std::nullopt, Topic{pool[pick(0, pool.size() - 1)]}, delta};
          break;
        }
        default:
          fault.kind = DropCube{};
          break;
      }
      s.faults.push_back(std::move(fault));
    }
    return;
  }

  std::size_t n_targets = std::min<std::size_t>(s.consumers.size(), pick(1, 2));
  std::set<std::size_t> chosen;
  while (chosen.size() < n_targets) chosen.insert(pick(0, s.consumers.size() - 1));
  for (std::size_t idx : chosen) {
    const auto& c = s.consumers[idx];
    FaultSpec fault;
    fault.target = consumer_id(c.id);
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& a : s.agreements) {
      if (a.consumer != c.id) continue;
      for (const auto& t : a.topics) keys.emplace_back(a.producer, t);
    }
    switch (keys.empty() ? pick(0, 1) * 3 : pick(0, 3)) {
      case 0:
        fault.kind = UnderReport{std::nullopt, static_cast<std::int64_t>(pick(1, 5))};
        break;
      case 1: {
        const double factors[] = {0.0, 0.25, 0.5, 0.75};
        fault.kind = UnderReport{factors[pick(0, 3)], std::nullopt};
        break;
      }
      case 2: {
        const auto& [producer, topic] = keys[pick(0, keys.size() - 1)];
        std::int64_t delta = static_cast<std::int64_t>(pick(1, 5));
        if (pick(0, 1) == 1) delta = -delta;
        fault.kind = PerturbKey{producer_id(producer), Topic{topic}, delta};
        break;
      }
      default:
        fault.kind = DropCube{};
        break;
    }
    s.faults.push_back(std::move(fault));
  }
}

}  // namespace cubesettle::testsupport
