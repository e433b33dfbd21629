#include "cubesettle/broker.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "cubesettle/units.hpp"

namespace cubesettle {

Count TrafficCube::count_of(const TripleKey& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? 0 : it->second;
}

Count TrafficCube::total() const {
  Count n = 0;
  for (const auto& [key, count] : entries) n += count;
  return n;
}

namespace {

class LosslessModel final : public LossModel {
 public:
  bool drops(const ParticipantId&, const Topic&, Count, const ParticipantId&) const override {
    return false;
  }
};

}  // namespace

const LossModel& lossless() {
  static const LosslessModel model;
  return model;
}

SeededLossModel::SeededLossModel(std::uint64_t seed, double drop_probability)
    : seed_(seed), probability_(drop_probability) {}

bool SeededLossModel::drops(const ParticipantId& producer, const Topic& topic,
                            Count flow_index, const ParticipantId& consumer) const {
  if (probability_ <= 0.0) return false;
  if (probability_ >= 1.0) return true;
  std::string key = producer.id;
  key += '\0';
  key += topic.name;
  key += '\0';
  key += consumer.id;
  std::uint64_t h = fnv1a64(key);
  h = mix64(h ^ mix64(seed_) ^ mix64(flow_index));
  return static_cast<long double>(h) <
         probability_ * 18446744073709551616.0L;  // 2^64
}

bool ExplicitLossModel::drops(const ParticipantId& producer, const Topic& topic,
                              Count flow_index, const ParticipantId& consumer) const {
  return drops_.count(Drop{producer.id, topic.name, flow_index, consumer.id}) != 0;
}

AgreementId SubscriptionRegistry::add(const Agreement& agreement,
                                      const std::set<Topic>& producer_topics) {
  auto validation = validate_agreement(agreement, producer_topics);
  if (!validation.ok()) {
    if (validation.has(AgreementIssueCode::EmptyTopicSet)) {
      throw Error(Errc::EmptyTopicSet, "agreement subscribes to no topics");
    }
    for (const auto& issue : validation.issues) {
      if (issue.code == AgreementIssueCode::TopicNotOffered) {
        throw Error(Errc::TopicNotOffered, "producer " + agreement.producer.id +
                                               " does not offer topic '" + issue.topic.name + "'");
      }
    }
    throw Error(Errc::InvalidAgreement, "agreement has wrong participant kinds");
  }
  for (const auto& existing : agreements_) {
    if (existing.producer != agreement.producer || existing.consumer != agreement.consumer) {
      continue;
    }
    if (!existing.window.overlaps(agreement.window)) {
      continue;
    }
    std::vector<Topic> shared;
    std::set_intersection(existing.topics.begin(), existing.topics.end(),
                          agreement.topics.begin(), agreement.topics.end(),
                          std::back_inserter(shared));
    if (!shared.empty()) {
      throw Error(Errc::OverlappingAgreement,
                  "agreement for (" + agreement.producer.id + ", " + agreement.consumer.id +
                      ") overlaps an existing one on topic '" + shared.front().name + "'");
    }
  }
  agreements_.push_back(agreement);
  return agreements_.size() - 1;
}

std::set<ParticipantId> SubscriptionRegistry::subscribers(const Topic& topic,
                                                          Timestamp at) const {
  std::set<ParticipantId> out;
  for (const auto& a : agreements_) {
    if (a.topics.count(topic) != 0 && a.window.contains(at)) {
      out.insert(a.consumer);
    }
  }
  return out;
}

std::set<ParticipantId> SubscriptionRegistry::subscribers_of(const ParticipantId& producer,
                                                             const Topic& topic,
                                                             Timestamp at) const {
  std::set<ParticipantId> out;
  for (const auto& a : agreements_) {
    if (a.producer == producer && a.topics.count(topic) != 0 && a.window.contains(at)) {
      out.insert(a.consumer);
    }
  }
  return out;
}

std::set<ParticipantId> SubscriptionRegistry::whole_window_subscribers(
    const ParticipantId& producer, const Topic& topic, const Window& window) const {
  std::set<ParticipantId> out;
  for (const auto& a : agreements_) {
    if (a.producer == producer && a.topics.count(topic) != 0 && a.window.covers(window)) {
      out.insert(a.consumer);
    }
  }
  return out;
}

std::set<std::pair<ParticipantId, ParticipantId>> SubscriptionRegistry::pairs_overlapping(
    const Window& window) const {
  std::set<std::pair<ParticipantId, ParticipantId>> out;
  for (const auto& a : agreements_) {
    if (a.window.overlaps(window)) {
      out.insert({a.producer, a.consumer});
    }
  }
  return out;
}

SubscriptionRegistry::PairTopics SubscriptionRegistry::pair_topics(const ParticipantId& producer,
                                                                   const ParticipantId& consumer,
                                                                   const Window& window) const {
  PairTopics out;
  for (const auto& a : agreements_) {
    if (a.producer != producer || a.consumer != consumer || !a.window.overlaps(window)) {
      continue;
    }
    for (const auto& topic : a.topics) {
      if (a.window.covers(window)) {
        out.whole_window.insert(topic);
      } else {
        out.partial.insert(topic);
      }
    }
  }
  // A topic covered whole-window by any agreement counts as whole-window.
  for (const auto& topic : out.whole_window) {
    out.partial.erase(topic);
  }
  return out;
}

std::set<Topic> SubscriptionRegistry::whole_window_topics_of(const ParticipantId& producer,
                                                             const Window& window) const {
  std::set<Topic> out;
  for (const auto& a : agreements_) {
    if (a.producer == producer && a.window.covers(window)) {
      out.insert(a.topics.begin(), a.topics.end());
    }
  }
  return out;
}

std::set<std::pair<ParticipantId, Topic>> SubscriptionRegistry::whole_window_keys_of(
    const ParticipantId& consumer, const Window& window) const {
  std::set<std::pair<ParticipantId, Topic>> out;
  for (const auto& a : agreements_) {
    if (a.consumer == consumer && a.window.covers(window)) {
      for (const auto& topic : a.topics) {
        out.insert({a.producer, topic});
      }
    }
  }
  return out;
}

void Broker::register_producer(const ParticipantId& producer, std::set<Topic> topics) {
  std::lock_guard lock(mu_);
  producers_[producer] = std::move(topics);
}

std::set<Topic> Broker::producer_topics(const ParticipantId& producer) const {
  std::lock_guard lock(mu_);
  auto it = producers_.find(producer);
  if (it == producers_.end()) {
    throw Error(Errc::UnknownProducer, "producer " + producer.id + " is not registered");
  }
  return it->second;
}

AgreementId Broker::subscribe(const Agreement& agreement) {
  std::lock_guard lock(mu_);
  auto it = producers_.find(agreement.producer);
  if (it == producers_.end()) {
    throw Error(Errc::UnknownProducer, "producer " + agreement.producer.id + " is not registered");
  }
  return registry_.add(agreement, it->second);
}

DeliveryReport Broker::publish(const ParticipantId& producer, const Topic& topic,
                               Timestamp timestamp, const LossModel& loss) {
  std::lock_guard lock(mu_);
  auto it = producers_.find(producer);
  if (it == producers_.end()) {
    throw Error(Errc::UnknownProducer, "producer " + producer.id + " is not registered");
  }
  if (it->second.count(topic) == 0) {
    throw Error(Errc::TopicNotPublished,
                "producer " + producer.id + " does not publish topic '" + topic.name + "'");
  }

  DeliveryReport report;
  report.message = next_seq_++;
  report.flow_index = flow_counters_[{producer, topic}]++;

  // Deliver one copy per consumer whose agreement with this producer is
  // active at the publish instant.
  for (const auto& consumer : registry_.subscribers_of(producer, topic, timestamp)) {
    if (loss.drops(producer, topic, report.flow_index, consumer)) {
      report.dropped_for.emplace_back(consumer, loss.reason());
      continue;
    }
    log_.push_back(LogTuple{producer, consumer, topic, timestamp});
    report.delivered_to.push_back(consumer);
  }
  return report;
}

TrafficCube Broker::global_cube(const Window& window) const {
  std::lock_guard lock(mu_);
  TrafficCube cube;
  cube.window = window;
  for (const auto& tuple : log_) {
    if (window.contains(tuple.timestamp)) {
      ++cube.entries[TripleKey{tuple.producer, tuple.consumer, tuple.topic}];
    }
  }
  return cube;
}

std::vector<LogTuple> Broker::log_snapshot() const {
  std::lock_guard lock(mu_);
  return log_;
}

void Broker::export_log(std::ostream& out) const {
  std::lock_guard lock(mu_);
  for (const auto& t : log_) {
    out << t.producer.id << ',' << t.consumer.id << ',' << t.topic.name << ',' << t.timestamp
        << '\n';
  }
}

std::size_t Broker::import_log(std::istream& in) {
  std::vector<LogTuple> parsed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string producer, consumer, topic, ts;
    if (!std::getline(fields, producer, ',') || !std::getline(fields, consumer, ',') ||
        !std::getline(fields, topic, ',') || !std::getline(fields, ts)) {
      throw Error(Errc::ParseError,
                  "log line " + std::to_string(line_no) + ": expected producer,consumer,topic,timestamp");
    }
    Timestamp when = 0;
    try {
      when = std::stoll(ts);
    } catch (const std::exception&) {
      throw Error(Errc::ParseError,
                  "log line " + std::to_string(line_no) + ": bad timestamp '" + ts + "'");
    }
    parsed.push_back(LogTuple{producer_id(producer), consumer_id(consumer), Topic{topic}, when});
  }
  std::lock_guard lock(mu_);
  log_.insert(log_.end(), parsed.begin(), parsed.end());
  return parsed.size();
}

TrafficCube apply_broker_fault(const TrafficCube& cube, const BrokerFault& fault) {
  TrafficCube out = cube;
  if (const auto* inflate = std::get_if<InflateKey>(&fault)) {
    out.entries[inflate->key] += inflate->delta;
    if (out.entries[inflate->key] == 0) out.entries.erase(inflate->key);
  } else if (const auto* deflate = std::get_if<DeflateKey>(&fault)) {
    auto it = out.entries.find(deflate->key);
    if (it != out.entries.end()) {
      it->second = it->second > deflate->delta ? it->second - deflate->delta : 0;
      if (it->second == 0) out.entries.erase(it);
    }
  } else {
    const auto& drop = std::get<DropKey>(fault);
    auto it = out.entries.find(drop.key);
    if (it == out.entries.end()) {
      throw Error(Errc::UnknownKey, "cannot drop absent cube key (" + drop.key.producer.id + ", " +
                                        drop.key.consumer.id + ", " + drop.key.topic.name + ")");
    }
    out.entries.erase(it);
  }
  return out;
}

}  // namespace cubesettle
