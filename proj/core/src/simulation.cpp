#include "cubesettle/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "cubesettle/units.hpp"

namespace cubesettle {

namespace {

struct TrafficEvent {
  Timestamp at{};
  ParticipantId producer;
  Topic topic;
  std::uint64_t seq{};  // tie-breaker within a flow
  auto operator<=>(const TrafficEvent&) const = default;
};

// Rate flows publish on a fixed deterministic grid: message m of a flow with
// rate r goes out at floor(m / r), for floor(r * duration) messages total.
std::vector<TrafficEvent> expand_traffic(const Scenario& scenario) {
  std::vector<TrafficEvent> events;
  for (const auto& flow : scenario.traffic.flows) {
    ParticipantId producer = producer_id(flow.producer);
    Topic topic{flow.topic};
    if (flow.rate_per_s.has_value()) {
      double rate = *flow.rate_per_s;
      if (rate <= 0.0) continue;
      auto count = static_cast<std::uint64_t>(
          std::floor(rate * static_cast<double>(scenario.traffic.duration_s) + 1e-9));
      for (std::uint64_t m = 0; m < count; ++m) {
        auto at = static_cast<Timestamp>(std::floor(static_cast<double>(m) / rate + 1e-9));
        if (at >= scenario.traffic.duration_s) at = scenario.traffic.duration_s - 1;
        events.push_back(TrafficEvent{at, producer, topic, m});
      }
    } else {
      std::uint64_t m = 0;
      for (Timestamp at : flow.times) {
        events.push_back(TrafficEvent{at, producer, topic, m++});
      }
    }
  }
  std::sort(events.begin(), events.end());
  return events;
}

std::unique_ptr<LossModel> make_loss_model(const Scenario& scenario, std::uint64_t seed) {
  switch (scenario.loss.kind) {
    case LossSpec::Kind::Seeded:
      return std::make_unique<SeededLossModel>(seed, scenario.loss.drop_probability);
    case LossSpec::Kind::Explicit: {
      std::set<ExplicitLossModel::Drop> drops(scenario.loss.drops.begin(),
                                              scenario.loss.drops.end());
      return std::make_unique<ExplicitLossModel>(std::move(drops));
    }
    case LossSpec::Kind::None:
      break;
  }
  return nullptr;  // use the shared lossless model
}

}  // namespace

SimulationResult simulate(const Scenario& scenario, std::optional<std::uint64_t> seed_override) {
  SimulationResult result;
  result.seed = seed_override.value_or(scenario.seed);

  // Wire up the broker and subscriptions.
  Broker broker;
  for (const auto& p : scenario.producers) {
    std::set<Topic> topics;
    for (const auto& t : p.topics) topics.insert(Topic{t});
    broker.register_producer(producer_id(p.id), std::move(topics));
  }
  for (const auto& a : scenario.agreements) {
    Agreement agreement;
    agreement.producer = producer_id(a.producer);
    agreement.consumer = consumer_id(a.consumer);
    for (const auto& t : a.topics) agreement.topics.insert(Topic{t});
    agreement.window = make_window(a.window_start, a.window_end);
    broker.subscribe(agreement);
  }

  PriceTable prices;
  for (const auto& [topic, price] : scenario.prices_wei) {
    prices.set_price(Topic{topic}, price);
  }

  // Fund the ledger. The first consumer in canonical order deploys the
  // settlement contract and pays for deployment and callbacks.
  result.ledger = std::make_unique<Ledger>(scenario.ledger.mode);
  std::vector<ParticipantId> consumers;
  for (const auto& p : scenario.producers) {
    auto it = scenario.ledger.producer_balances.find(p.id);
    Wei balance = it == scenario.ledger.producer_balances.end() ? 0 : it->second;
    ParticipantId who = producer_id(p.id);
    result.accounts[who] = result.ledger->create_account(who, balance);
    result.initial_total_wei += balance;
  }
  for (const auto& c : scenario.consumers) {
    auto it = scenario.ledger.consumer_balances.find(c.id);
    Wei balance = it == scenario.ledger.consumer_balances.end() ? 0 : it->second;
    ParticipantId who = consumer_id(c.id);
    result.accounts[who] = result.ledger->create_account(who, balance);
    result.initial_total_wei += balance;
    consumers.push_back(who);
  }
  std::sort(consumers.begin(), consumers.end());
  result.deployer = result.accounts.at(consumers.front());
  auto [contract, deploy_receipt] =
      result.ledger->deploy_contract(scenario.ledger.gas_price, result.deployer);
  (void)contract;
  result.setup_receipts.push_back(deploy_receipt);

  // Drive the traffic through the broker, collecting each participant's
  // local view as it happens.
  const LossModel* loss = &lossless();
  auto owned_loss = make_loss_model(scenario, result.seed);
  if (owned_loss) loss = owned_loss.get();

  for (const auto& p : scenario.producers) {
    result.sent_logs[producer_id(p.id)];
  }
  for (const auto& c : scenario.consumers) {
    result.receipt_logs[consumer_id(c.id)];
  }

  for (const auto& event : expand_traffic(scenario)) {
    DeliveryReport delivery = broker.publish(event.producer, event.topic, event.at, *loss);
    result.sent_logs[event.producer].push_back(SentRecord{event.topic, event.at});
    for (const auto& consumer : delivery.delivered_to) {
      result.receipt_logs[consumer].push_back(ReceiptRecord{event.producer, event.topic, event.at});
      ++result.deliveries;
    }
    ++result.messages;
  }
  result.broker_log = broker.log_snapshot();

  // Settle window by window. settlements_per_window splits each settlement
  // window into that many equal sub-windows, each settled independently.
  Timestamp step = scenario.settlement.window_s /
                   static_cast<Timestamp>(scenario.settlement.settlements_per_window);
  std::mt19937_64 fault_rng(result.seed);

  SettlementContext ctx;
  ctx.ledger = result.ledger.get();
  ctx.gas_price = scenario.ledger.gas_price;
  ctx.deployer = result.deployer;
  ctx.accounts = result.accounts;
  ctx.prices = &prices;

  auto settle_one_window = [&](const Window& window) {
    WindowResult wr;
    wr.window = window;
    wr.global_cube = broker.global_cube(window);
    wr.reported_broker_cube = wr.global_cube;
    for (const auto& fault : scenario.broker_faults) {
      wr.reported_broker_cube = apply_broker_fault(wr.reported_broker_cube, fault);
    }

    // Honest local cubes first, then the scenario's misreports on top, in
    // the order they were declared.
    wr.reported.window = window;
    for (const auto& p : scenario.producers) {
      ParticipantId who = producer_id(p.id);
      std::optional<PublisherCube> cube = publisher_cube(result.sent_logs.at(who), who, window);
      for (const auto& fault : scenario.faults) {
        if (fault.target != who || !cube.has_value()) continue;
        cube = apply_fault(*cube, fault, fault_rng);
      }
      wr.reported.publishers[who] = std::move(cube);
    }
    for (const auto& c : scenario.consumers) {
      ParticipantId who = consumer_id(c.id);
      std::optional<SubscriberCube> cube =
          subscriber_cube(result.receipt_logs.at(who), who, window);
      for (const auto& fault : scenario.faults) {
        if (fault.target != who || !cube.has_value()) continue;
        cube = apply_fault(*cube, fault, fault_rng);
      }
      wr.reported.subscribers[who] = std::move(cube);
    }

    wr.settlement = settle_window(wr.reported, broker.registry(), ctx);
    result.windows.push_back(std::move(wr));
  };

  for (Timestamp start = 0; start < scenario.traffic.duration_s; start += step) {
    Timestamp end = std::min<Timestamp>(start + step, scenario.traffic.duration_s);
    Window window = make_window(start, end);
    try {
      settle_one_window(window);
    } catch (const Error& e) {
      throw Error(e.code(), "window [" + std::to_string(window.start) + ", " +
                                std::to_string(window.end) + "): " + e.what());
    }
  }

  return result;
}

}  // namespace cubesettle
