#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cubesettle/broker.hpp"
#include "cubesettle/edge.hpp"
#include "cubesettle/ledger.hpp"

namespace cubesettle {

// The unilateral cubes reported for one window. A missing entry models a
// participant that never delivered its report.
struct CubeSet {
  Window window;
  std::map<ParticipantId, std::optional<PublisherCube>> publishers;
  std::map<ParticipantId, std::optional<SubscriberCube>> subscribers;
  bool operator==(const CubeSet&) const = default;
};

struct PropagationFill {
  enum class Side { Publisher, Subscriber };
  Side side{};
  ParticipantId owner;  // whose missing cube received the value
  ParticipantId producer;
  Topic topic;
  Count value{};
  std::vector<ParticipantId> sources;  // who vouched for the value
};

struct PropagationAmbiguity {
  ParticipantId producer;
  Topic topic;
  std::vector<std::pair<ParticipantId, Count>> candidates;
};

struct PropagationLog {
  std::vector<PropagationFill> fills;
  std::vector<PropagationAmbiguity> ambiguities;
};

// Fills missing reports from the other side of each flow: a missing
// publisher cube takes the subscribers' word per topic (when they agree), a
// missing subscriber cube takes the publisher's word per (producer, topic).
// Only whole-window agreements qualify as sources or sinks, existing values
// are never overwritten, and cubes synthesised here are marked incomplete so
// unfilled keys stay unknown rather than reading as zero.
std::pair<CubeSet, PropagationLog> propagate_missing(const CubeSet& cubes,
                                                     const SubscriptionRegistry& registry);

enum class TripleState { Consistent, Inequality, NotCheckable };

enum class NotCheckableReason {
  None,
  MissingPublisherValue,
  MissingSubscriberValue,
  PartialWindowAgreement,
};

const char* triple_state_name(TripleState state);
const char* not_checkable_reason_name(NotCheckableReason reason);

struct TripleStatus {
  ParticipantId producer;
  ParticipantId consumer;
  Topic topic;
  TripleState state{};
  NotCheckableReason reason = NotCheckableReason::None;
  Count claimed_sent = 0;      // valid unless the publisher value is missing
  Count claimed_received = 0;  // valid unless the subscriber value is missing
};

// overall is true iff no triple is an inequality and no required value is
// still missing after propagation; partial-window triples are excluded from
// the verdict because the sent-equals-received constraint does not apply.
struct ConsistencyReport {
  Window window;
  std::vector<TripleStatus> triples;  // canonical (producer, consumer, topic) order
  bool overall = true;
};

ConsistencyReport check_consistency(const CubeSet& cubes, const SubscriptionRegistry& registry);

struct Inequality {
  ParticipantId producer;
  ParticipantId consumer;
  Topic topic;
  Count claimed_sent{};
  Count claimed_received{};
  auto operator<=>(const Inequality&) const = default;
};

// Every Inequality-status triple, both directions, canonical order.
std::vector<Inequality> detect_inconsistencies(const ConsistencyReport& report);

// Fee owed by the cube's consumer to `producer`: sum of count * unit price
// over the consumer's reported receipts from that producer. Exact wei.
Wei compute_fee(const SubscriberCube& cube, const ParticipantId& producer,
                const PriceTable& prices);

Wei compute_profit(const std::vector<std::pair<ParticipantId, Wei>>& fees);

// --- Pairwise settlement contract state machine ---

enum class ContractPhase { Deployed, AwaitingProducer, AwaitingVas, Settled, Disputed };

const char* contract_phase_name(ContractPhase phase);

using CubeSlice = std::map<Topic, Count>;

struct ContractTerms {
  ParticipantId producer;
  ParticipantId consumer;
  AccountId producer_account{};
  AccountId consumer_account{};
  AccountId deployer_account{};
  std::set<Topic> verifiable_topics;  // compared entry by entry, absent == 0
  std::set<Topic> billable_topics;    // priced from the vas submission
  PriceTable prices;
};

struct ContractState {
  ContractPhase phase = ContractPhase::Deployed;
  ContractTerms terms;
  std::optional<CubeSlice> producer_cube;
  std::optional<CubeSlice> vas_cube;
};

enum class QueryId { Start, ProducerQuery, VasQuery };

struct ContractTx {
  AccountId sender{};
  QueryId query{};
  CubeSlice payload;
};

struct Rejected {
  Errc code{};
  std::string reason;
};
struct CubesRequested {};
struct VasQueryIssued {};
struct TransferEffect {
  AccountId to{};
  Wei amount{};
};
struct DisputeResolutionEffect {
  std::vector<Inequality> inequalities;
};
using ContractEffect =
    std::variant<Rejected, CubesRequested, VasQueryIssued, TransferEffect, DisputeResolutionEffect>;

// Pure: same (state, tx) always yields the same (state, effects). An
// unauthorized sender or out-of-order query is rejected with the state
// unchanged; terminal phases reject everything.
std::pair<ContractState, std::vector<ContractEffect>> contract_step(const ContractState& state,
                                                                    const ContractTx& tx);

// --- Window settlement orchestration ---

enum class PairStatus { Paid, Disputed, Unsettleable, Failed };

const char* pair_status_name(PairStatus status);

struct PairOutcome {
  ParticipantId producer;
  ParticipantId consumer;
  PairStatus status{};
  Wei fee = 0;  // Paid only
  std::vector<Inequality> inequalities;
  std::vector<std::string> missing;  // unresolved values, for Unsettleable
  std::string detail;
  std::optional<TxId> transfer_tx;
};

using ReputationHook = std::function<void(const PairOutcome&)>;

struct SettlementContext {
  Ledger* ledger = nullptr;
  Wei gas_price = 0;  // wei per gas
  AccountId deployer = 0;
  std::map<ParticipantId, AccountId> accounts;
  const PriceTable* prices = nullptr;
  ReputationHook reputation;  // no-op when empty
};

struct WindowSettlement {
  CubeSet submitted;  // what actually landed on chain (failed updates removed)
  CubeSet propagated;
  PropagationLog propagation;
  ConsistencyReport consistency;
  std::vector<PairOutcome> outcomes;  // canonical (producer, consumer) order
  std::vector<TxReceipt> receipts;
};

// Submits the present cubes as ledger transactions, propagates missing
// reports, checks consistency, then resolves every (producer, consumer)
// pair overlapping the window through the pairwise contract. Paid pairs move
// the fee from consumer to producer; disputed pairs retain payment and log
// their inequalities; pairs with unresolved values stay unsettleable.
WindowSettlement settle_window(const CubeSet& cubes, const SubscriptionRegistry& registry,
                               const SettlementContext& ctx);

}  // namespace cubesettle
