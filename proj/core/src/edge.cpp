#include "cubesettle/edge.hpp"

#include <cmath>

#include "json.hpp"

namespace cubesettle {

std::optional<Count> PublisherCube::value_of(const Topic& topic) const {
  auto it = entries.find(topic);
  if (it != entries.end()) return it->second;
  return complete ? std::optional<Count>(0) : std::nullopt;
}

Count PublisherCube::total() const {
  Count n = 0;
  for (const auto& [topic, count] : entries) n += count;
  return n;
}

std::optional<Count> SubscriberCube::value_of(const SubscriberKey& key) const {
  auto it = entries.find(key);
  if (it != entries.end()) return it->second;
  return complete ? std::optional<Count>(0) : std::nullopt;
}

Count SubscriberCube::total() const {
  Count n = 0;
  for (const auto& [key, count] : entries) n += count;
  return n;
}

PublisherCube publisher_cube(const std::vector<SentRecord>& local_log,
                             const ParticipantId& producer, const Window& window) {
  PublisherCube cube;
  cube.window = window;
  cube.producer = producer;
  for (const auto& record : local_log) {
    if (window.contains(record.timestamp)) {
      ++cube.entries[record.topic];
    }
  }
  return cube;
}

SubscriberCube subscriber_cube(const std::vector<ReceiptRecord>& local_log,
                               const ParticipantId& consumer, const Window& window) {
  SubscriberCube cube;
  cube.window = window;
  cube.consumer = consumer;
  for (const auto& record : local_log) {
    if (window.contains(record.timestamp)) {
      ++cube.entries[SubscriberKey{record.producer, record.topic}];
    }
  }
  return cube;
}

namespace {

void require_target(const FaultSpec& spec, const ParticipantId& owner) {
  if (spec.target != owner) {
    throw Error(Errc::UnknownParticipant,
                "fault targets " + to_string(spec.target) + " but the cube belongs to " +
                    to_string(owner));
  }
}

// Ceiling keeps inflation inflationary even for fractional factors.
Count inflate(Count value, const OverReport& fault) {
  if (fault.delta) {
    if (*fault.delta < 0) {
      throw Error(Errc::DirectionViolation, "over-report delta must be non-negative");
    }
    return value + static_cast<Count>(*fault.delta);
  }
  double factor = fault.factor.value_or(1.0);
  if (factor < 1.0) {
    throw Error(Errc::DirectionViolation, "over-report factor must be >= 1");
  }
  return static_cast<Count>(std::ceil(static_cast<double>(value) * factor));
}

// Floor keeps under-reporting deflationary; never goes below zero.
Count deflate(Count value, const UnderReport& fault) {
  if (fault.delta) {
    if (*fault.delta < 0) {
      throw Error(Errc::DirectionViolation, "under-report delta must be non-negative");
    }
    auto d = static_cast<Count>(*fault.delta);
    return value > d ? value - d : 0;
  }
  double factor = fault.factor.value_or(1.0);
  if (factor < 0.0 || factor > 1.0) {
    throw Error(Errc::DirectionViolation, "under-report factor must be in [0, 1]");
  }
  return static_cast<Count>(std::floor(static_cast<double>(value) * factor));
}

Count saturating_shift(Count value, std::int64_t delta) {
  if (delta >= 0) return value + static_cast<Count>(delta);
  auto d = static_cast<Count>(-delta);
  return value > d ? value - d : 0;
}

}  // namespace

std::optional<PublisherCube> apply_fault(const PublisherCube& cube, const FaultSpec& spec,
                                         std::mt19937_64& rng) {
  (void)rng;  // current fault kinds are fully deterministic
  require_target(spec, cube.producer);
  PublisherCube out = cube;
  if (std::holds_alternative<DropCube>(spec.kind)) {
    return std::nullopt;
  }
  if (const auto* over = std::get_if<OverReport>(&spec.kind)) {
    if (spec.target.kind != ParticipantKind::Producer) {
      throw Error(Errc::DirectionViolation, "over-reporting is a producer fault");
    }
    for (auto& [topic, count] : out.entries) {
      count = inflate(count, *over);
    }
    std::erase_if(out.entries, [](const auto& e) { return e.second == 0; });
    return out;
  }
  if (std::holds_alternative<UnderReport>(spec.kind)) {
    throw Error(Errc::DirectionViolation, "under-reporting is a consumer fault");
  }
  const auto& perturb = std::get<PerturbKey>(spec.kind);
  if (perturb.producer.has_value()) {
    throw Error(Errc::UnknownKey, "publisher cube keys carry no producer dimension");
  }
  Count base = out.value_of(perturb.topic).value_or(0);
  Count next = saturating_shift(base, perturb.delta);
  if (next == 0) {
    out.entries.erase(perturb.topic);
  } else {
    out.entries[perturb.topic] = next;
  }
  return out;
}

std::optional<SubscriberCube> apply_fault(const SubscriberCube& cube, const FaultSpec& spec,
                                          std::mt19937_64& rng) {
  (void)rng;
  require_target(spec, cube.consumer);
  SubscriberCube out = cube;
  if (std::holds_alternative<DropCube>(spec.kind)) {
    return std::nullopt;
  }
  if (std::holds_alternative<OverReport>(spec.kind)) {
    throw Error(Errc::DirectionViolation, "over-reporting is a producer fault");
  }
  if (const auto* under = std::get_if<UnderReport>(&spec.kind)) {
    if (spec.target.kind != ParticipantKind::Consumer) {
      throw Error(Errc::DirectionViolation, "under-reporting is a consumer fault");
    }
    for (auto& [key, count] : out.entries) {
      count = deflate(count, *under);
    }
    std::erase_if(out.entries, [](const auto& e) { return e.second == 0; });
    return out;
  }
  const auto& perturb = std::get<PerturbKey>(spec.kind);
  if (!perturb.producer.has_value()) {
    throw Error(Errc::UnknownKey, "subscriber cube keys need a producer dimension");
  }
  SubscriberKey key{*perturb.producer, perturb.topic};
  Count base = out.value_of(key).value_or(0);
  Count next = saturating_shift(base, perturb.delta);
  if (next == 0) {
    out.entries.erase(key);
  } else {
    out.entries[key] = next;
  }
  return out;
}

namespace {

nlohmann::json owner_json(const ParticipantId& owner) {
  return nlohmann::json{{"id", owner.id}, {"kind", kind_name(owner.kind)}};
}

}  // namespace

std::string to_canonical_json(const PublisherCube& cube) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [topic, count] : cube.entries) {
    entries.push_back(nlohmann::json::array({topic.name, count}));
  }
  nlohmann::json j{{"entries", entries},
                   {"owner", owner_json(cube.producer)},
                   {"window", nlohmann::json::array({cube.window.start, cube.window.end})}};
  return j.dump();
}

std::string to_canonical_json(const SubscriberCube& cube) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [key, count] : cube.entries) {
    entries.push_back(nlohmann::json::array({key.producer.id, key.topic.name, count}));
  }
  nlohmann::json j{{"entries", entries},
                   {"owner", owner_json(cube.consumer)},
                   {"window", nlohmann::json::array({cube.window.start, cube.window.end})}};
  return j.dump();
}

}  // namespace cubesettle
