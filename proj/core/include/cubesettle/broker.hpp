#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cubesettle/model.hpp"

namespace cubesettle {

using AgreementId = std::uint64_t;
using MessageSeq = std::uint64_t;

// One tuple per delivered copy: a message delivered to k subscribers yields
// k tuples.
struct LogTuple {
  ParticipantId producer;
  ParticipantId consumer;
  Topic topic;
  Timestamp timestamp{};
  auto operator<=>(const LogTuple&) const = default;
};

struct TripleKey {
  ParticipantId producer;
  ParticipantId consumer;
  Topic topic;
  auto operator<=>(const TripleKey&) const = default;
};

// Per-window delivery counts keyed by (producer, consumer, topic). Sparse:
// an absent key means count zero; zero counts are never stored.
struct TrafficCube {
  Window window;
  std::map<TripleKey, Count> entries;

  Count count_of(const TripleKey& key) const;
  Count total() const;
  bool operator==(const TrafficCube&) const = default;
};

struct DeliveryReport {
  MessageSeq message{};
  Count flow_index{};  // per (producer, topic) publish sequence
  std::vector<ParticipantId> delivered_to;
  std::vector<std::pair<ParticipantId, std::string>> dropped_for;
};

// Decides, deterministically, whether a particular delivery is dropped.
class LossModel {
 public:
  virtual ~LossModel() = default;
  virtual bool drops(const ParticipantId& producer, const Topic& topic,
                     Count flow_index, const ParticipantId& consumer) const = 0;
  virtual std::string reason() const { return "dropped by loss model"; }
};

const LossModel& lossless();

// Bernoulli drops keyed by a hash of (seed, producer, topic, flow index,
// consumer); reruns with the same seed reproduce the same drops.
class SeededLossModel final : public LossModel {
 public:
  SeededLossModel(std::uint64_t seed, double drop_probability);
  bool drops(const ParticipantId& producer, const Topic& topic,
             Count flow_index, const ParticipantId& consumer) const override;
  std::string reason() const override { return "seeded random drop"; }

 private:
  std::uint64_t seed_;
  double probability_;
};

// Drops exactly the listed deliveries.
class ExplicitLossModel final : public LossModel {
 public:
  struct Drop {
    std::string producer;
    std::string topic;
    Count flow_index{};
    std::string consumer;
    auto operator<=>(const Drop&) const = default;
  };

  explicit ExplicitLossModel(std::set<Drop> drops) : drops_(std::move(drops)) {}
  bool drops(const ParticipantId& producer, const Topic& topic,
             Count flow_index, const ParticipantId& consumer) const override;
  std::string reason() const override { return "listed drop"; }
  const std::set<Drop>& list() const { return drops_; }

 private:
  std::set<Drop> drops_;
};

// All active agreements, indexed so that sub(t_k) at any instant and the
// per-pair topic coverage of a window are cheap to answer.
class SubscriptionRegistry {
 public:
  // Validates the agreement against the producer's topic set and rejects a
  // same-(producer, consumer) agreement whose window overlaps an existing
  // one on a shared topic.
  AgreementId add(const Agreement& agreement, const std::set<Topic>& producer_topics);

  // sub(t): consumers with any agreement covering the topic at `at`.
  std::set<ParticipantId> subscribers(const Topic& topic, Timestamp at) const;
  // Consumers with an agreement for (producer, topic) active at `at`.
  std::set<ParticipantId> subscribers_of(const ParticipantId& producer, const Topic& topic,
                                         Timestamp at) const;
  // Consumers whose agreement for (producer, topic) covers the whole window.
  std::set<ParticipantId> whole_window_subscribers(const ParticipantId& producer,
                                                   const Topic& topic,
                                                   const Window& window) const;

  std::set<std::pair<ParticipantId, ParticipantId>> pairs_overlapping(const Window& window) const;

  struct PairTopics {
    std::set<Topic> whole_window;  // some agreement covers the entire window
    std::set<Topic> partial;       // only partial-window coverage
  };
  PairTopics pair_topics(const ParticipantId& producer, const ParticipantId& consumer,
                         const Window& window) const;

  // Topics of `producer` carried by a whole-window agreement with anyone.
  std::set<Topic> whole_window_topics_of(const ParticipantId& producer,
                                         const Window& window) const;
  // (producer, topic) keys `consumer` subscribes to for the whole window.
  std::set<std::pair<ParticipantId, Topic>> whole_window_keys_of(const ParticipantId& consumer,
                                                                 const Window& window) const;

  const std::vector<Agreement>& agreements() const { return agreements_; }

 private:
  std::vector<Agreement> agreements_;
};

// In-process pub/sub broker with metering: routes each publish to the
// consumers holding an active agreement, logs every delivered copy, and
// aggregates the log into per-window traffic cubes.
class Broker {
 public:
  void register_producer(const ParticipantId& producer, std::set<Topic> topics);
  std::set<Topic> producer_topics(const ParticipantId& producer) const;

  AgreementId subscribe(const Agreement& agreement);

  DeliveryReport publish(const ParticipantId& producer, const Topic& topic,
                         Timestamp timestamp, const LossModel& loss = lossless());

  TrafficCube global_cube(const Window& window) const;
  std::vector<LogTuple> log_snapshot() const;
  const SubscriptionRegistry& registry() const { return registry_; }

  // Newline-delimited `producer,consumer,topic,timestamp` records.
  void export_log(std::ostream& out) const;
  std::size_t import_log(std::istream& in);

 private:
  mutable std::mutex mu_;
  SubscriptionRegistry registry_;
  std::map<ParticipantId, std::set<Topic>> producers_;
  std::map<std::pair<ParticipantId, Topic>, Count> flow_counters_;
  std::vector<LogTuple> log_;
  MessageSeq next_seq_ = 0;
};

// Broker-side cube perturbations, modelling a colluding broker. Pure: the
// input cube is never modified.
struct InflateKey {
  TripleKey key;
  Count delta{};
  bool operator==(const InflateKey&) const = default;
};
struct DeflateKey {
  TripleKey key;
  Count delta{};
  bool operator==(const DeflateKey&) const = default;
};
struct DropKey {
  TripleKey key;
  bool operator==(const DropKey&) const = default;
};
using BrokerFault = std::variant<InflateKey, DeflateKey, DropKey>;

TrafficCube apply_broker_fault(const TrafficCube& cube, const BrokerFault& fault);

}  // namespace cubesettle
