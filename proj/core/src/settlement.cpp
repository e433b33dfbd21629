#include "cubesettle/settlement.hpp"

#include <algorithm>
#include <sstream>

#include "cubesettle/units.hpp"

namespace cubesettle {

namespace {

std::optional<Count> publisher_value(const CubeSet& cubes, const ParticipantId& producer,
                                     const Topic& topic) {
  auto it = cubes.publishers.find(producer);
  if (it == cubes.publishers.end() || !it->second.has_value()) return std::nullopt;
  return it->second->value_of(topic);
}

std::optional<Count> subscriber_value(const CubeSet& cubes, const ParticipantId& consumer,
                                      const ParticipantId& producer, const Topic& topic) {
  auto it = cubes.subscribers.find(consumer);
  if (it == cubes.subscribers.end() || !it->second.has_value()) return std::nullopt;
  return it->second->value_of(SubscriberKey{producer, topic});
}

}  // namespace

std::pair<CubeSet, PropagationLog> propagate_missing(const CubeSet& cubes,
                                                     const SubscriptionRegistry& registry) {
  CubeSet out = cubes;
  PropagationLog log;

  // Missing publisher cubes: take the subscribers' word, topic by topic.
  // Sources are the originally submitted subscriber cubes only, and only
  // whole-window subscribers qualify (a partial-window receipt count says
  // nothing about the full sent count).
  for (auto& [producer, cube] : out.publishers) {
    if (cube.has_value()) continue;
    PublisherCube synth;
    synth.window = cubes.window;
    synth.producer = producer;
    synth.complete = false;
    for (const auto& topic : registry.whole_window_topics_of(producer, cubes.window)) {
      std::vector<std::pair<ParticipantId, Count>> candidates;
      for (const auto& consumer :
           registry.whole_window_subscribers(producer, topic, cubes.window)) {
        auto value = subscriber_value(cubes, consumer, producer, topic);
        if (value.has_value()) {
          candidates.emplace_back(consumer, *value);
        }
      }
      if (candidates.empty()) continue;
      bool agree = std::all_of(candidates.begin(), candidates.end(), [&](const auto& c) {
        return c.second == candidates.front().second;
      });
      if (!agree) {
        log.ambiguities.push_back(PropagationAmbiguity{producer, topic, candidates});
        continue;
      }
      synth.entries[topic] = candidates.front().second;
      PropagationFill fill;
      fill.side = PropagationFill::Side::Publisher;
      fill.owner = producer;
      fill.producer = producer;
      fill.topic = topic;
      fill.value = candidates.front().second;
      for (const auto& [consumer, value] : candidates) fill.sources.push_back(consumer);
      log.fills.push_back(std::move(fill));
    }
    if (!synth.entries.empty()) {
      cube = std::move(synth);
    }
  }

  // Missing subscriber cubes: take the publisher's word for every
  // (producer, topic) the consumer subscribes to for the whole window.
  // Values filled above are legitimate sources here.
  for (auto& [consumer, cube] : out.subscribers) {
    if (cube.has_value()) continue;
    SubscriberCube synth;
    synth.window = cubes.window;
    synth.consumer = consumer;
    synth.complete = false;
    for (const auto& [producer, topic] :
         registry.whole_window_keys_of(consumer, cubes.window)) {
      auto value = publisher_value(out, producer, topic);
      if (!value.has_value()) continue;
      synth.entries[SubscriberKey{producer, topic}] = *value;
      PropagationFill fill;
      fill.side = PropagationFill::Side::Subscriber;
      fill.owner = consumer;
      fill.producer = producer;
      fill.topic = topic;
      fill.value = *value;
      fill.sources.push_back(producer);
      log.fills.push_back(std::move(fill));
    }
    if (!synth.entries.empty()) {
      cube = std::move(synth);
    }
  }

  return {std::move(out), std::move(log)};
}

const char* triple_state_name(TripleState state) {
  switch (state) {
    case TripleState::Consistent: return "consistent";
    case TripleState::Inequality: return "inequality";
    case TripleState::NotCheckable: return "not_checkable";
  }
  return "unknown";
}

const char* not_checkable_reason_name(NotCheckableReason reason) {
  switch (reason) {
    case NotCheckableReason::None: return "none";
    case NotCheckableReason::MissingPublisherValue: return "missing_publisher_value";
    case NotCheckableReason::MissingSubscriberValue: return "missing_subscriber_value";
    case NotCheckableReason::PartialWindowAgreement: return "partial_window_agreement";
  }
  return "unknown";
}

ConsistencyReport check_consistency(const CubeSet& cubes, const SubscriptionRegistry& registry) {
  ConsistencyReport report;
  report.window = cubes.window;

  // Enumerate agreement triples touching the window; a triple is checkable
  // only when some single agreement covers the whole window, because the
  // publisher reports sent counts, not per-consumer deliveries.
  std::set<std::tuple<ParticipantId, ParticipantId, Topic>> checkable;
  std::set<std::tuple<ParticipantId, ParticipantId, Topic>> partial;
  for (const auto& a : registry.agreements()) {
    if (!a.window.overlaps(cubes.window)) continue;
    for (const auto& topic : a.topics) {
      auto key = std::make_tuple(a.producer, a.consumer, topic);
      if (a.window.covers(cubes.window)) {
        checkable.insert(key);
        partial.erase(key);
      } else if (checkable.count(key) == 0) {
        partial.insert(key);
      }
    }
  }

  std::set<std::tuple<ParticipantId, ParticipantId, Topic>> all(checkable);
  all.insert(partial.begin(), partial.end());

  for (const auto& [producer, consumer, topic] : all) {
    TripleStatus status;
    status.producer = producer;
    status.consumer = consumer;
    status.topic = topic;
    if (checkable.count({producer, consumer, topic}) == 0) {
      status.state = TripleState::NotCheckable;
      status.reason = NotCheckableReason::PartialWindowAgreement;
      report.triples.push_back(status);
      continue;
    }
    auto sent = publisher_value(cubes, producer, topic);
    auto received = subscriber_value(cubes, consumer, producer, topic);
    if (!sent.has_value() || !received.has_value()) {
      status.state = TripleState::NotCheckable;
      status.reason = !sent.has_value() ? NotCheckableReason::MissingPublisherValue
                                        : NotCheckableReason::MissingSubscriberValue;
      status.claimed_sent = sent.value_or(0);
      status.claimed_received = received.value_or(0);
      report.triples.push_back(status);
      report.overall = false;
      continue;
    }
    status.claimed_sent = *sent;
    status.claimed_received = *received;
    status.state = (*sent == *received) ? TripleState::Consistent : TripleState::Inequality;
    if (status.state == TripleState::Inequality) {
      report.overall = false;
    }
    report.triples.push_back(status);
  }
  return report;
}

std::vector<Inequality> detect_inconsistencies(const ConsistencyReport& report) {
  std::vector<Inequality> out;
  for (const auto& triple : report.triples) {
    if (triple.state == TripleState::Inequality) {
      out.push_back(Inequality{triple.producer, triple.consumer, triple.topic,
                               triple.claimed_sent, triple.claimed_received});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Wei compute_fee(const SubscriberCube& cube, const ParticipantId& producer,
                const PriceTable& prices) {
  Wei fee = 0;
  for (const auto& [key, count] : cube.entries) {
    if (key.producer != producer) continue;
    fee = checked_add(fee, checked_mul(count, prices.price_of(key.topic)));
  }
  return fee;
}

Wei compute_profit(const std::vector<std::pair<ParticipantId, Wei>>& fees) {
  Wei profit = 0;
  for (const auto& [consumer, fee] : fees) {
    profit = checked_add(profit, fee);
  }
  return profit;
}

const char* contract_phase_name(ContractPhase phase) {
  switch (phase) {
    case ContractPhase::Deployed: return "deployed";
    case ContractPhase::AwaitingProducer: return "awaiting_producer";
    case ContractPhase::AwaitingVas: return "awaiting_vas";
    case ContractPhase::Settled: return "settled";
    case ContractPhase::Disputed: return "disputed";
  }
  return "unknown";
}

namespace {

AccountId expected_sender(const ContractTerms& terms, QueryId query) {
  switch (query) {
    case QueryId::Start: return terms.deployer_account;
    case QueryId::ProducerQuery: return terms.producer_account;
    case QueryId::VasQuery: return terms.consumer_account;
  }
  return 0;
}

std::vector<Inequality> compare_slices(const ContractTerms& terms, const CubeSlice& producer,
                                       const CubeSlice& vas) {
  std::vector<Inequality> out;
  for (const auto& topic : terms.verifiable_topics) {
    auto pit = producer.find(topic);
    auto vit = vas.find(topic);
    Count sent = pit == producer.end() ? 0 : pit->second;
    Count received = vit == vas.end() ? 0 : vit->second;
    if (sent != received) {
      out.push_back(Inequality{terms.producer, terms.consumer, topic, sent, received});
    }
  }
  return out;
}

Wei slice_fee(const ContractTerms& terms, const CubeSlice& vas) {
  Wei fee = 0;
  for (const auto& topic : terms.billable_topics) {
    auto it = vas.find(topic);
    if (it == vas.end()) continue;
    fee = checked_add(fee, checked_mul(it->second, terms.prices.price_of(topic)));
  }
  return fee;
}

}  // namespace

std::pair<ContractState, std::vector<ContractEffect>> contract_step(const ContractState& state,
                                                                    const ContractTx& tx) {
  ContractState next = state;
  std::vector<ContractEffect> effects;

  if (tx.sender != expected_sender(state.terms, tx.query)) {
    effects.push_back(Rejected{Errc::UnauthorizedSender, "sender is not authorized for this query"});
    return {next, effects};
  }

  switch (state.phase) {
    case ContractPhase::Deployed:
      if (tx.query != QueryId::Start) {
        effects.push_back(Rejected{Errc::OutOfOrderQuery, "contract has not requested cubes yet"});
        return {next, effects};
      }
      next.phase = ContractPhase::AwaitingProducer;
      effects.push_back(CubesRequested{});
      return {next, effects};

    case ContractPhase::AwaitingProducer:
      if (tx.query != QueryId::ProducerQuery) {
        effects.push_back(Rejected{Errc::OutOfOrderQuery, "expecting the producer cube first"});
        return {next, effects};
      }
      next.producer_cube = tx.payload;
      next.phase = ContractPhase::AwaitingVas;
      effects.push_back(VasQueryIssued{});
      return {next, effects};

    case ContractPhase::AwaitingVas: {
      if (tx.query != QueryId::VasQuery) {
        effects.push_back(Rejected{Errc::OutOfOrderQuery, "expecting the vas cube"});
        return {next, effects};
      }
      next.vas_cube = tx.payload;
      auto inequalities = compare_slices(state.terms, *next.producer_cube, *next.vas_cube);
      if (inequalities.empty()) {
        next.phase = ContractPhase::Settled;
        effects.push_back(
            TransferEffect{state.terms.producer_account, slice_fee(state.terms, *next.vas_cube)});
      } else {
        next.phase = ContractPhase::Disputed;
        effects.push_back(DisputeResolutionEffect{std::move(inequalities)});
      }
      return {next, effects};
    }

    case ContractPhase::Settled:
    case ContractPhase::Disputed:
      effects.push_back(Rejected{Errc::OutOfOrderQuery, "contract is already resolved"});
      return {next, effects};
  }
  effects.push_back(Rejected{Errc::OutOfOrderQuery, "unreachable phase"});
  return {next, effects};
}

const char* pair_status_name(PairStatus status) {
  switch (status) {
    case PairStatus::Paid: return "paid";
    case PairStatus::Disputed: return "disputed";
    case PairStatus::Unsettleable: return "unsettleable";
    case PairStatus::Failed: return "failed";
  }
  return "unknown";
}

WindowSettlement settle_window(const CubeSet& cubes, const SubscriptionRegistry& registry,
                               const SettlementContext& ctx) {
  if (ctx.ledger == nullptr || ctx.prices == nullptr) {
    throw Error(Errc::ValidationFailed, "settlement context needs a ledger and a price table");
  }
  WindowSettlement result;
  result.submitted = cubes;

  auto account_for = [&](const ParticipantId& who) -> AccountId {
    auto it = ctx.accounts.find(who);
    if (it == ctx.accounts.end()) {
      throw Error(Errc::UnknownParticipant, to_string(who) + " has no ledger account");
    }
    return it->second;
  };

  // Every present cube rides to the chain in an update paid by its owner,
  // acknowledged by a callback paid by the contract deployer. A cube whose
  // transactions cannot be funded never lands on chain and is treated as a
  // missing report from here on.
  auto submit_cube = [&](const ParticipantId& owner) -> bool {
    try {
      result.receipts.push_back(
          ctx.ledger->submit_tx(TxKind::Update, ctx.gas_price, account_for(owner)));
      result.receipts.push_back(
          ctx.ledger->submit_tx(TxKind::Callback, ctx.gas_price, ctx.deployer));
      return true;
    } catch (const Error& e) {
      if (e.code() == Errc::InsufficientFunds) return false;
      throw;
    }
  };

  for (auto& [producer, cube] : result.submitted.publishers) {
    if (cube.has_value() && !submit_cube(producer)) {
      cube.reset();
    }
  }
  for (auto& [consumer, cube] : result.submitted.subscribers) {
    if (cube.has_value() && !submit_cube(consumer)) {
      cube.reset();
    }
  }

  auto [propagated, propagation_log] = propagate_missing(result.submitted, registry);
  result.propagated = std::move(propagated);
  result.propagation = std::move(propagation_log);
  result.consistency = check_consistency(result.propagated, registry);

  for (const auto& [producer, consumer] : registry.pairs_overlapping(cubes.window)) {
    PairOutcome outcome;
    outcome.producer = producer;
    outcome.consumer = consumer;

    auto topics = registry.pair_topics(producer, consumer, cubes.window);
    std::set<Topic> billable = topics.whole_window;
    billable.insert(topics.partial.begin(), topics.partial.end());

    // Collect the pair's values; anything unresolved after propagation
    // blocks settlement for the pair.
    CubeSlice producer_slice;
    CubeSlice consumer_slice;
    std::vector<Inequality> inequalities;
    std::vector<std::string> missing;
    for (const auto& topic : topics.whole_window) {
      auto sent = publisher_value(result.propagated, producer, topic);
      auto received = subscriber_value(result.propagated, consumer, producer, topic);
      if (sent.has_value() && *sent > 0) producer_slice[topic] = *sent;
      if (received.has_value() && *received > 0) consumer_slice[topic] = *received;
      if (!sent.has_value()) {
        missing.push_back("publisher:" + producer.id + ":" + topic.name);
      }
      if (!received.has_value()) {
        missing.push_back("subscriber:" + consumer.id + ":" + producer.id + ":" + topic.name);
      }
      if (sent.has_value() && received.has_value() && *sent != *received) {
        inequalities.push_back(Inequality{producer, consumer, topic, *sent, *received});
      }
    }
    for (const auto& topic : topics.partial) {
      auto received = subscriber_value(result.propagated, consumer, producer, topic);
      if (!received.has_value()) {
        missing.push_back("subscriber:" + consumer.id + ":" + producer.id + ":" + topic.name);
      } else if (*received > 0) {
        consumer_slice[topic] = *received;
      }
    }

    if (!inequalities.empty() && !missing.empty()) {
      // Disputed on what is known; the unknown values cannot rescue the pair.
      outcome.status = PairStatus::Disputed;
      outcome.inequalities = std::move(inequalities);
      outcome.missing = std::move(missing);
    } else if (!missing.empty()) {
      outcome.status = PairStatus::Unsettleable;
      outcome.missing = std::move(missing);
    } else {
      // Fully known: drive the pairwise contract through its phases.
      ContractState state;
      state.terms.producer = producer;
      state.terms.consumer = consumer;
      state.terms.producer_account = account_for(producer);
      state.terms.consumer_account = account_for(consumer);
      state.terms.deployer_account = ctx.deployer;
      state.terms.verifiable_topics = topics.whole_window;
      state.terms.billable_topics = billable;
      state.terms.prices = *ctx.prices;

      std::vector<ContractEffect> effects;
      auto drive = [&](AccountId sender, QueryId query, CubeSlice payload) {
        auto [next, step_effects] = contract_step(state, ContractTx{sender, query, std::move(payload)});
        state = std::move(next);
        for (auto& e : step_effects) effects.push_back(std::move(e));
      };
      drive(ctx.deployer, QueryId::Start, {});
      drive(state.terms.producer_account, QueryId::ProducerQuery, producer_slice);
      drive(state.terms.consumer_account, QueryId::VasQuery, consumer_slice);

      outcome.status = PairStatus::Unsettleable;
      for (const auto& effect : effects) {
        if (const auto* transfer = std::get_if<TransferEffect>(&effect)) {
          try {
            TxReceipt receipt =
                ctx.ledger->submit_tx(TxKind::Transfer, ctx.gas_price,
                                      state.terms.consumer_account, transfer->to, transfer->amount);
            result.receipts.push_back(receipt);
            outcome.status = PairStatus::Paid;
            outcome.fee = transfer->amount;
            outcome.transfer_tx = receipt.id;
          } catch (const Error& e) {
            if (e.code() != Errc::InsufficientFunds) throw;
            outcome.status = PairStatus::Failed;
            outcome.detail = e.what();
          }
        } else if (const auto* dispute = std::get_if<DisputeResolutionEffect>(&effect)) {
          outcome.status = PairStatus::Disputed;
          outcome.inequalities = dispute->inequalities;
        }
      }
    }

    if (ctx.reputation) {
      ctx.reputation(outcome);
    }
    result.outcomes.push_back(std::move(outcome));
  }

  return result;
}

}  // namespace cubesettle
