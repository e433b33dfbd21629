#pragma once

#include <map>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "cubesettle/model.hpp"

namespace cubesettle {

// Participant-local log records. Producers log what they send, consumers log
// what they receive; neither sees the other end of the flow.
struct SentRecord {
  Topic topic;
  Timestamp timestamp{};
};

struct ReceiptRecord {
  ParticipantId producer;
  Topic topic;
  Timestamp timestamp{};
};

// Per-topic sent counts for one producer. There is deliberately no consumer
// dimension: a producer does not know who subscribes to its stream.
//
// `complete` distinguishes a locally generated cube (absent key == zero)
// from one synthesised by settlement-side propagation, where an absent key
// means the value is unknown.
struct PublisherCube {
  Window window;
  ParticipantId producer;
  std::map<Topic, Count> entries;
  bool complete = true;

  std::optional<Count> value_of(const Topic& topic) const;
  Count total() const;
  bool operator==(const PublisherCube&) const = default;
};

struct SubscriberKey {
  ParticipantId producer;
  Topic topic;
  auto operator<=>(const SubscriberKey&) const = default;
};

// Per (producer, topic) receipt counts for one consumer.
struct SubscriberCube {
  Window window;
  ParticipantId consumer;
  std::map<SubscriberKey, Count> entries;
  bool complete = true;

  std::optional<Count> value_of(const SubscriberKey& key) const;
  Count total() const;
  bool operator==(const SubscriberCube&) const = default;
};

PublisherCube publisher_cube(const std::vector<SentRecord>& local_log,
                             const ParticipantId& producer, const Window& window);

SubscriberCube subscriber_cube(const std::vector<ReceiptRecord>& local_log,
                               const ParticipantId& consumer, const Window& window);

// Malicious reporting behaviors. Over-reporting is a producer move and
// under-reporting a consumer move; the other directions make the target
// worse off and are rejected as DirectionViolation.
struct OverReport {
  std::optional<double> factor;       // >= 1, ceiling rounding
  std::optional<std::int64_t> delta;  // >= 0, added to every count
  bool operator==(const OverReport&) const = default;
};
struct UnderReport {
  std::optional<double> factor;       // in [0, 1], floor rounding
  std::optional<std::int64_t> delta;  // >= 0, subtracted saturating at 0
  bool operator==(const UnderReport&) const = default;
};
struct DropCube {
  bool operator==(const DropCube&) const = default;
};
struct PerturbKey {
  std::optional<ParticipantId> producer;  // set iff the target is a consumer
  Topic topic;
  std::int64_t delta{};  // either sign; result saturates at 0
  bool operator==(const PerturbKey&) const = default;
};

struct FaultSpec {
  ParticipantId target;
  std::variant<OverReport, UnderReport, DropCube, PerturbKey> kind;
  std::uint64_t seed = 0;
  bool operator==(const FaultSpec&) const = default;
};

// Returns a perturbed copy, or nullopt when the fault drops the cube
// entirely. The input cube is never modified.
std::optional<PublisherCube> apply_fault(const PublisherCube& cube, const FaultSpec& spec,
                                         std::mt19937_64& rng);
std::optional<SubscriberCube> apply_fault(const SubscriberCube& cube, const FaultSpec& spec,
                                          std::mt19937_64& rng);

// Canonical JSON form (sorted keys) for embedding a cube in a ledger
// transaction:
//   {"entries":[[key...,count],...],"owner":{"id":..,"kind":..},"window":[s,e]}
// Publisher entry keys are [topic], subscriber keys [producer, topic].
std::string to_canonical_json(const PublisherCube& cube);
std::string to_canonical_json(const SubscriberCube& cube);

}  // namespace cubesettle
