#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cubesettle/errors.hpp"
#include "cubesettle/units.hpp"

namespace cubesettle {

enum class ParticipantKind { Producer, Consumer, Gateway, Broker };

const char* kind_name(ParticipantKind kind);

// Identity is (kind, id); ids are unique within a kind.
struct ParticipantId {
  ParticipantKind kind{};
  std::string id;
  auto operator<=>(const ParticipantId&) const = default;
};

ParticipantId producer_id(std::string id);
ParticipantId consumer_id(std::string id);
std::string to_string(const ParticipantId& p);

struct Topic {
  std::string name;
  auto operator<=>(const Topic&) const = default;
};

// Half-open interval [start, end): adjacent windows partition time with no
// double counting.
struct Window {
  Timestamp start{};
  Timestamp end{};

  Window() = default;
  Window(Timestamp s, Timestamp e);  // throws Errc::InvalidWindow unless s < e

  bool contains(Timestamp t) const { return t >= start && t < end; }
  bool covers(const Window& w) const { return start <= w.start && w.end <= end; }
  bool overlaps(const Window& w) const { return start < w.end && w.start < end; }
  Timestamp length() const { return end - start; }
  auto operator<=>(const Window&) const = default;
};

Window make_window(Timestamp start, Timestamp end);

// A consumer subscribes to a subset of a producer's topics for a window and
// agrees to pay per delivered message.
struct Agreement {
  ParticipantId producer;
  ParticipantId consumer;
  std::set<Topic> topics;
  Window window;
  bool operator==(const Agreement&) const = default;
};

enum class AgreementIssueCode {
  EmptyTopicSet,
  TopicNotOffered,
  WrongProducerKind,
  WrongConsumerKind,
};

struct AgreementIssue {
  AgreementIssueCode code{};
  Topic topic;  // set for TopicNotOffered
};

struct AgreementValidation {
  std::vector<AgreementIssue> issues;
  bool ok() const { return issues.empty(); }
  bool has(AgreementIssueCode code) const;
};

// Accepts iff the agreement's topics are a non-empty subset of the
// producer's published topic set and the participant kinds line up.
AgreementValidation validate_agreement(const Agreement& agreement,
                                       const std::set<Topic>& producer_topics);

// Per-topic unit prices in wei. Lookup is total over the topics declared in
// a scenario; anything else is an error.
class PriceTable {
 public:
  PriceTable() = default;
  explicit PriceTable(std::map<Topic, Wei> prices) : prices_(std::move(prices)) {}

  void set_price(const Topic& topic, Wei price) { prices_[topic] = price; }
  bool has(const Topic& topic) const { return prices_.count(topic) != 0; }
  Wei price_of(const Topic& topic) const;  // throws Errc::UnknownTopic
  const std::map<Topic, Wei>& prices() const { return prices_; }
  bool operator==(const PriceTable&) const = default;

 private:
  std::map<Topic, Wei> prices_;
};

}  // namespace cubesettle
