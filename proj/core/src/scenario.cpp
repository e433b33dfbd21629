#include "cubesettle/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cubesettle {

using nlohmann::json;

bool operator==(const Scenario& a, const Scenario& b) {
  return a.producers == b.producers && a.consumers == b.consumers && a.topics == b.topics &&
         a.prices_wei == b.prices_wei && a.agreements == b.agreements && a.traffic == b.traffic &&
         a.loss == b.loss && a.faults == b.faults && a.broker_faults == b.broker_faults &&
         a.ledger == b.ledger && a.settlement == b.settlement && a.seed == b.seed;
}

namespace {

struct Issues {
  std::vector<std::string> list;
  void add(const std::string& where, const std::string& what) {
    list.push_back(where + ": " + what);
  }
  bool empty() const { return list.empty(); }
};

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

bool valid_name(const std::string& name) {
  return !name.empty() && name.find(',') == std::string::npos &&
         name.find('\n') == std::string::npos;
}

const json* get_member(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::optional<std::string> get_string(const json& j, const char* key, const std::string& where,
                                      Issues& issues) {
  const json* m = get_member(j, key);
  if (m == nullptr) {
    issues.add(where, std::string("missing key '") + key + "'");
    return std::nullopt;
  }
  if (!m->is_string()) {
    issues.add(where, std::string("'") + key + "' must be a string");
    return std::nullopt;
  }
  return m->get<std::string>();
}

std::optional<std::uint64_t> get_uint(const json& j, const char* key, const std::string& where,
                                      Issues& issues) {
  const json* m = get_member(j, key);
  if (m == nullptr) {
    issues.add(where, std::string("missing key '") + key + "'");
    return std::nullopt;
  }
  if (!m->is_number_unsigned()) {
    issues.add(where, std::string("'") + key + "' must be a non-negative integer");
    return std::nullopt;
  }
  return m->get<std::uint64_t>();
}

std::optional<std::int64_t> get_int(const json& j, const char* key, const std::string& where,
                                    Issues& issues) {
  const json* m = get_member(j, key);
  if (m == nullptr) {
    issues.add(where, std::string("missing key '") + key + "'");
    return std::nullopt;
  }
  if (!m->is_number_integer()) {
    issues.add(where, std::string("'") + key + "' must be an integer");
    return std::nullopt;
  }
  return m->get<std::int64_t>();
}

std::optional<ParticipantId> parse_target(const json& j, const std::string& where,
                                          Issues& issues) {
  if (!j.is_object()) {
    issues.add(where, "target must be an object {kind, id}");
    return std::nullopt;
  }
  auto kind = get_string(j, "kind", where, issues);
  auto id = get_string(j, "id", where, issues);
  if (!kind || !id) return std::nullopt;
  if (*kind == "producer") return ParticipantId{ParticipantKind::Producer, *id};
  if (*kind == "consumer") return ParticipantId{ParticipantKind::Consumer, *id};
  if (*kind == "gateway") return ParticipantId{ParticipantKind::Gateway, *id};
  if (*kind == "broker") return ParticipantId{ParticipantKind::Broker, *id};
  issues.add(where, "unknown participant kind '" + *kind + "'");
  return std::nullopt;
}

void parse_participants(const json& j, Scenario& s, Issues& issues) {
  const json* participants = get_member(j, "participants");
  if (participants == nullptr || !participants->is_object()) {
    issues.add("participants", "must be an object with 'producers' and 'consumers'");
    return;
  }
  const json* producers = get_member(*participants, "producers");
  if (producers == nullptr || !producers->is_array()) {
    issues.add("participants.producers", "must be an array");
  } else {
    std::size_t i = 0;
    for (const auto& p : *producers) {
      std::string where = "participants.producers[" + std::to_string(i++) + "]";
      ProducerSpec spec;
      if (auto id = get_string(p, "id", where, issues)) spec.id = *id;
      const json* topics = get_member(p, "topics");
      if (topics == nullptr || !topics->is_array()) {
        issues.add(where, "'topics' must be an array of topic names");
      } else {
        for (const auto& t : *topics) {
          if (t.is_string()) {
            spec.topics.insert(t.get<std::string>());
          } else {
            issues.add(where, "topic names must be strings");
          }
        }
      }
      s.producers.push_back(std::move(spec));
    }
  }
  const json* consumers = get_member(*participants, "consumers");
  if (consumers == nullptr || !consumers->is_array()) {
    issues.add("participants.consumers", "must be an array");
  } else {
    std::size_t i = 0;
    for (const auto& c : *consumers) {
      std::string where = "participants.consumers[" + std::to_string(i++) + "]";
      ConsumerSpec spec;
      if (auto id = get_string(c, "id", where, issues)) spec.id = *id;
      s.consumers.push_back(std::move(spec));
    }
  }
}

void parse_agreements(const json& j, Scenario& s, Issues& issues) {
  const json* agreements = get_member(j, "agreements");
  if (agreements == nullptr || !agreements->is_array()) {
    issues.add("agreements", "must be an array");
    return;
  }
  std::size_t i = 0;
  for (const auto& a : *agreements) {
    std::string where = "agreements[" + std::to_string(i++) + "]";
    AgreementSpec spec;
    if (auto p = get_string(a, "producer", where, issues)) spec.producer = *p;
    if (auto c = get_string(a, "consumer", where, issues)) spec.consumer = *c;
    const json* topics = get_member(a, "topics");
    if (topics == nullptr || !topics->is_array()) {
      issues.add(where, "'topics' must be an array");
    } else {
      for (const auto& t : *topics) {
        if (t.is_string()) spec.topics.insert(t.get<std::string>());
      }
    }
    const json* window = get_member(a, "window");
    if (window == nullptr || !window->is_array() || window->size() != 2 ||
        !(*window)[0].is_number_integer() || !(*window)[1].is_number_integer()) {
      issues.add(where, "'window' must be [start_s, end_s]");
    } else {
      spec.window_start = (*window)[0].get<Timestamp>();
      spec.window_end = (*window)[1].get<Timestamp>();
    }
    s.agreements.push_back(std::move(spec));
  }
}

void parse_traffic(const json& j, Scenario& s, Issues& issues) {
  const json* traffic = get_member(j, "traffic");
  if (traffic == nullptr || !traffic->is_object()) {
    issues.add("traffic", "must be an object with 'duration_s' and 'flows'");
    return;
  }
  if (auto d = get_int(*traffic, "duration_s", "traffic", issues)) s.traffic.duration_s = *d;
  const json* flows = get_member(*traffic, "flows");
  if (flows == nullptr || !flows->is_array()) {
    issues.add("traffic.flows", "must be an array");
    return;
  }
  std::size_t i = 0;
  for (const auto& f : *flows) {
    std::string where = "traffic.flows[" + std::to_string(i++) + "]";
    FlowSpec spec;
    if (auto p = get_string(f, "producer", where, issues)) spec.producer = *p;
    if (auto t = get_string(f, "topic", where, issues)) spec.topic = *t;
    const json* rate = get_member(f, "rate_per_s");
    const json* times = get_member(f, "times");
    if ((rate != nullptr) == (times != nullptr)) {
      issues.add(where, "exactly one of 'rate_per_s' or 'times' is required");
    } else if (rate != nullptr) {
      if (!rate->is_number()) {
        issues.add(where, "'rate_per_s' must be a number");
      } else {
        spec.rate_per_s = rate->get<double>();
      }
    } else {
      if (!times->is_array()) {
        issues.add(where, "'times' must be an array of timestamps");
      } else {
        for (const auto& t : *times) {
          if (t.is_number_integer()) {
            spec.times.push_back(t.get<Timestamp>());
          } else {
            issues.add(where, "'times' entries must be integer seconds");
          }
        }
      }
    }
    s.traffic.flows.push_back(std::move(spec));
  }
}

void parse_loss(const json& j, Scenario& s, Issues& issues) {
  const json* loss = get_member(j, "loss");
  if (loss == nullptr) return;  // defaults to lossless
  if (!loss->is_object()) {
    issues.add("loss", "must be an object");
    return;
  }
  auto kind = get_string(*loss, "kind", "loss", issues);
  if (!kind) return;
  if (*kind == "none") {
    s.loss.kind = LossSpec::Kind::None;
  } else if (*kind == "seeded") {
    s.loss.kind = LossSpec::Kind::Seeded;
    const json* p = get_member(*loss, "drop_probability");
    if (p == nullptr || !p->is_number()) {
      issues.add("loss", "'drop_probability' must be a number in [0, 1]");
    } else {
      s.loss.drop_probability = p->get<double>();
      if (s.loss.drop_probability < 0.0 || s.loss.drop_probability > 1.0) {
        issues.add("loss", "'drop_probability' must lie in [0, 1]");
      }
    }
  } else if (*kind == "explicit") {
    s.loss.kind = LossSpec::Kind::Explicit;
    const json* drops = get_member(*loss, "drops");
    if (drops == nullptr || !drops->is_array()) {
      issues.add("loss", "'drops' must be an array");
      return;
    }
    std::size_t i = 0;
    for (const auto& d : *drops) {
      std::string where = "loss.drops[" + std::to_string(i++) + "]";
      ExplicitLossModel::Drop drop;
      if (auto p = get_string(d, "producer", where, issues)) drop.producer = *p;
      if (auto t = get_string(d, "topic", where, issues)) drop.topic = *t;
      if (auto c = get_string(d, "consumer", where, issues)) drop.consumer = *c;
      if (auto f = get_uint(d, "flow_index", where, issues)) drop.flow_index = *f;
      s.loss.drops.push_back(std::move(drop));
    }
  } else {
    issues.add("loss", "unknown kind '" + *kind + "' (none|seeded|explicit)");
  }
}

void parse_faults(const json& j, Scenario& s, Issues& issues) {
  const json* faults = get_member(j, "faults");
  if (faults == nullptr) return;
  if (!faults->is_array()) {
    issues.add("faults", "must be an array");
    return;
  }
  std::size_t i = 0;
  for (const auto& f : *faults) {
    std::string where = "faults[" + std::to_string(i++) + "]";
    if (!f.is_object()) {
      issues.add(where, "must be an object");
      continue;
    }
    const json* target_json = get_member(f, "target");
    if (target_json == nullptr) {
      issues.add(where, "missing 'target'");
      continue;
    }
    auto target = parse_target(*target_json, where + ".target", issues);
    auto kind = get_string(f, "kind", where, issues);
    if (!target || !kind) continue;

    if (target->kind == ParticipantKind::Broker) {
      auto producer = get_string(f, "producer", where, issues);
      auto consumer = get_string(f, "consumer", where, issues);
      auto topic = get_string(f, "topic", where, issues);
      if (!producer || !consumer || !topic) continue;
      TripleKey key{producer_id(*producer), consumer_id(*consumer), Topic{*topic}};
      if (*kind == "inflate" || *kind == "deflate") {
        auto delta = get_uint(f, "delta", where, issues);
        if (!delta) continue;
        if (*kind == "inflate") {
          s.broker_faults.push_back(InflateKey{key, *delta});
        } else {
          s.broker_faults.push_back(DeflateKey{key, *delta});
        }
      } else if (*kind == "drop_key") {
        s.broker_faults.push_back(DropKey{key});
      } else {
        issues.add(where, "unknown broker fault '" + *kind + "' (inflate|deflate|drop_key)");
      }
      continue;
    }

    FaultSpec spec;
    spec.target = *target;
    if (const json* seed = get_member(f, "seed"); seed != nullptr && seed->is_number_unsigned()) {
      spec.seed = seed->get<std::uint64_t>();
    }
    auto read_magnitude = [&](auto& fault) -> bool {
      const json* factor = get_member(f, "factor");
      const json* delta = get_member(f, "delta");
      if ((factor != nullptr) == (delta != nullptr)) {
        issues.add(where, "exactly one of 'factor' or 'delta' is required");
        return false;
      }
      if (factor != nullptr) {
        if (!factor->is_number()) {
          issues.add(where, "'factor' must be a number");
          return false;
        }
        fault.factor = factor->get<double>();
      } else {
        if (!delta->is_number_integer()) {
          issues.add(where, "'delta' must be an integer");
          return false;
        }
        fault.delta = delta->get<std::int64_t>();
      }
      return true;
    };

    if (*kind == "over_report") {
      OverReport fault;
      if (read_magnitude(fault)) {
        spec.kind = fault;
        s.faults.push_back(std::move(spec));
      }
    } else if (*kind == "under_report") {
      UnderReport fault;
      if (read_magnitude(fault)) {
        spec.kind = fault;
        s.faults.push_back(std::move(spec));
      }
    } else if (*kind == "drop_cube") {
      spec.kind = DropCube{};
      s.faults.push_back(std::move(spec));
    } else if (*kind == "perturb_key") {
      PerturbKey fault;
      auto topic = get_string(f, "topic", where, issues);
      auto delta = get_int(f, "delta", where, issues);
      if (!topic || !delta) continue;
      fault.topic = Topic{*topic};
      fault.delta = *delta;
      if (const json* producer = get_member(f, "producer"); producer != nullptr) {
        if (!producer->is_string()) {
          issues.add(where, "'producer' must be a string");
          continue;
        }
        fault.producer = producer_id(producer->get<std::string>());
      }
      spec.kind = std::move(fault);
      s.faults.push_back(std::move(spec));
    } else {
      issues.add(where,
                 "unknown fault '" + *kind + "' (over_report|under_report|drop_cube|perturb_key)");
    }
  }
}

void parse_ledger(const json& j, Scenario& s, Issues& issues) {
  const json* ledger = get_member(j, "ledger");
  if (ledger == nullptr || !ledger->is_object()) {
    issues.add("ledger", "must be an object");
    return;
  }
  if (auto mode = get_string(*ledger, "mode", "ledger", issues)) {
    if (*mode == "plain") {
      s.ledger.mode = GasMode::Plain;
    } else if (*mode == "oraclize") {
      s.ledger.mode = GasMode::Oraclize;
    } else {
      issues.add("ledger", "unknown mode '" + *mode + "' (plain|oraclize)");
    }
  }
  if (auto price = get_string(*ledger, "gas_price_gwei", "ledger", issues)) {
    try {
      s.ledger.gas_price = parse_gwei_to_wei(*price);
      if (s.ledger.gas_price == 0) {
        issues.add("ledger", "gas_price_gwei must be positive");
      }
    } catch (const Error& e) {
      issues.add("ledger", e.what());
    }
  }
  const json* rate = get_member(*ledger, "eth_usd");
  if (rate == nullptr || !rate->is_number()) {
    issues.add("ledger", "'eth_usd' must be a number");
  } else {
    s.ledger.eth_usd = rate->get<double>();
    if (s.ledger.eth_usd <= 0.0) {
      issues.add("ledger", "'eth_usd' must be positive");
    }
  }
  const json* balances = get_member(*ledger, "initial_balances_wei");
  if (balances == nullptr) return;  // everyone starts at zero
  if (!balances->is_object()) {
    issues.add("ledger", "'initial_balances_wei' must be {producers: {...}, consumers: {...}}");
    return;
  }
  auto read_side = [&](const char* side, std::map<std::string, Wei>& out) {
    const json* m = get_member(*balances, side);
    if (m == nullptr) return;
    if (!m->is_object()) {
      issues.add("ledger.initial_balances_wei", std::string("'") + side + "' must be an object");
      return;
    }
    for (const auto& [id, value] : m->items()) {
      if (!value.is_number_unsigned()) {
        issues.add("ledger.initial_balances_wei",
                   side + ("." + id) + " must be a non-negative integer wei amount");
        continue;
      }
      out[id] = value.get<Wei>();
    }
  };
  read_side("producers", s.ledger.producer_balances);
  read_side("consumers", s.ledger.consumer_balances);
}

void parse_settlement(const json& j, Scenario& s, Issues& issues) {
  const json* settlement = get_member(j, "settlement");
  if (settlement == nullptr || !settlement->is_object()) {
    issues.add("settlement", "must be an object");
    return;
  }
  if (auto w = get_int(*settlement, "window_s", "settlement", issues)) s.settlement.window_s = *w;
  if (const json* n = get_member(*settlement, "settlements_per_window"); n != nullptr) {
    if (!n->is_number_unsigned() || n->get<std::uint64_t>() == 0) {
      issues.add("settlement", "'settlements_per_window' must be a positive integer");
    } else {
      s.settlement.settlements_per_window = n->get<std::uint32_t>();
    }
  }
}

// Cross-field validation once the structure has parsed.
void validate(Scenario& s, Issues& issues) {
  std::set<std::string> producer_ids;
  std::map<std::string, const ProducerSpec*> producers;
  for (const auto& p : s.producers) {
    if (!valid_name(p.id)) issues.add("participants.producers", "invalid id '" + p.id + "'");
    if (!producer_ids.insert(p.id).second) {
      issues.add("participants.producers", "duplicate id '" + p.id + "'");
    }
    producers[p.id] = &p;
    for (const auto& t : p.topics) {
      if (s.topics.count(t) == 0) {
        issues.add("participants.producers", "producer '" + p.id + "' names unknown topic '" + t + "'");
      }
    }
    if (p.topics.empty()) {
      issues.add("participants.producers", "producer '" + p.id + "' publishes no topics");
    }
  }
  std::set<std::string> consumer_ids;
  for (const auto& c : s.consumers) {
    if (!valid_name(c.id)) issues.add("participants.consumers", "invalid id '" + c.id + "'");
    if (!consumer_ids.insert(c.id).second) {
      issues.add("participants.consumers", "duplicate id '" + c.id + "'");
    }
  }
  if (s.producers.empty()) issues.add("participants", "need at least one producer");
  if (s.consumers.empty()) issues.add("participants", "need at least one consumer");
  for (const auto& t : s.topics) {
    if (!valid_name(t)) issues.add("topics", "invalid topic name '" + t + "'");
  }
  for (const auto& [topic, price] : s.prices_wei) {
    if (s.topics.count(topic) == 0) {
      issues.add("prices_wei", "price for unknown topic '" + topic + "'");
    }
  }

  std::size_t i = 0;
  for (const auto& a : s.agreements) {
    std::string where = "agreements[" + std::to_string(i++) + "]";
    auto producer = producers.find(a.producer);
    if (producer == producers.end()) {
      issues.add(where, "unknown producer '" + a.producer + "'");
    }
    if (consumer_ids.count(a.consumer) == 0) {
      issues.add(where, "unknown consumer '" + a.consumer + "'");
    }
    if (a.window_start >= a.window_end) {
      issues.add(where, "InvalidWindow: start must precede end");
    }
    if (a.topics.empty()) {
      issues.add(where, "EmptyTopicSet: agreement subscribes to no topics");
    }
    for (const auto& t : a.topics) {
      if (producer != producers.end() && producer->second->topics.count(t) == 0) {
        issues.add(where, "TopicNotOffered: '" + t + "' is not published by '" + a.producer + "'");
      }
      if (t.empty() || s.topics.count(t) == 0) {
        issues.add(where, "unknown topic '" + t + "'");
      }
      if (s.prices_wei.count(t) == 0) {
        issues.add(where, "topic '" + t + "' has no price");
      }
    }
  }
  // Same pair, overlapping windows: fee attribution would be ambiguous.
  for (std::size_t x = 0; x < s.agreements.size(); ++x) {
    for (std::size_t y = x + 1; y < s.agreements.size(); ++y) {
      const auto& a = s.agreements[x];
      const auto& b = s.agreements[y];
      if (a.producer == b.producer && a.consumer == b.consumer &&
          a.window_start < b.window_end && b.window_start < a.window_end) {
        issues.add("agreements", "OverlappingAgreement: agreements " + std::to_string(x) + " and " +
                                     std::to_string(y) + " for (" + a.producer + ", " + a.consumer +
                                     ") overlap in time");
      }
    }
  }

  if (s.traffic.duration_s <= 0) {
    issues.add("traffic", "duration_s must be positive");
  }
  i = 0;
  for (const auto& f : s.traffic.flows) {
    std::string where = "traffic.flows[" + std::to_string(i++) + "]";
    auto producer = producers.find(f.producer);
    if (producer == producers.end()) {
      issues.add(where, "unknown producer '" + f.producer + "'");
    } else if (producer->second->topics.count(f.topic) == 0) {
      issues.add(where, "TopicNotPublished: '" + f.topic + "' is not published by '" + f.producer + "'");
    }
    if (f.rate_per_s.has_value() && *f.rate_per_s < 0.0) {
      issues.add(where, "rate_per_s must be non-negative");
    }
    for (Timestamp t : f.times) {
      if (t < 0 || t >= s.traffic.duration_s) {
        issues.add(where, "publish time " + std::to_string(t) + " falls outside [0, duration)");
        break;
      }
    }
  }

  i = 0;
  for (const auto& fault : s.faults) {
    std::string where = "faults[" + std::to_string(i++) + "]";
    bool is_producer = fault.target.kind == ParticipantKind::Producer;
    bool known = is_producer ? producer_ids.count(fault.target.id) != 0
                             : consumer_ids.count(fault.target.id) != 0;
    if (fault.target.kind != ParticipantKind::Producer &&
        fault.target.kind != ParticipantKind::Consumer) {
      issues.add(where, "fault target must be a producer or a consumer");
    } else if (!known) {
      issues.add(where, "unknown " + std::string(kind_name(fault.target.kind)) + " '" +
                            fault.target.id + "'");
    }
    if (std::holds_alternative<OverReport>(fault.kind) && !is_producer) {
      issues.add(where, "DirectionViolation: over-reporting is a producer fault");
    }
    if (std::holds_alternative<UnderReport>(fault.kind) && is_producer) {
      issues.add(where, "DirectionViolation: under-reporting is a consumer fault");
    }
    if (const auto* perturb = std::get_if<PerturbKey>(&fault.kind)) {
      if (is_producer && perturb->producer.has_value()) {
        issues.add(where, "publisher cube keys carry no producer dimension");
      }
      if (!is_producer && !perturb->producer.has_value()) {
        issues.add(where, "subscriber cube keys need a 'producer'");
      }
      if (perturb->producer.has_value() && producer_ids.count(perturb->producer->id) == 0) {
        issues.add(where, "unknown producer '" + perturb->producer->id + "'");
      }
      if (s.topics.count(perturb->topic.name) == 0) {
        issues.add(where, "unknown topic '" + perturb->topic.name + "'");
      }
    }
  }
  i = 0;
  for (const auto& fault : s.broker_faults) {
    std::string where = "faults[broker:" + std::to_string(i++) + "]";
    const TripleKey* key = nullptr;
    if (const auto* inflate = std::get_if<InflateKey>(&fault)) key = &inflate->key;
    if (const auto* deflate = std::get_if<DeflateKey>(&fault)) key = &deflate->key;
    if (const auto* drop = std::get_if<DropKey>(&fault)) key = &drop->key;
    if (key != nullptr) {
      if (producer_ids.count(key->producer.id) == 0) {
        issues.add(where, "unknown producer '" + key->producer.id + "'");
      }
      if (consumer_ids.count(key->consumer.id) == 0) {
        issues.add(where, "unknown consumer '" + key->consumer.id + "'");
      }
      if (s.topics.count(key->topic.name) == 0) {
        issues.add(where, "unknown topic '" + key->topic.name + "'");
      }
    }
  }

  for (const auto& [id, balance] : s.ledger.producer_balances) {
    if (producer_ids.count(id) == 0) {
      issues.add("ledger.initial_balances_wei.producers", "unknown producer '" + id + "'");
    }
  }
  for (const auto& [id, balance] : s.ledger.consumer_balances) {
    if (consumer_ids.count(id) == 0) {
      issues.add("ledger.initial_balances_wei.consumers", "unknown consumer '" + id + "'");
    }
  }

  if (s.settlement.window_s <= 0) {
    issues.add("settlement", "window_s must be positive");
  } else if (s.settlement.settlements_per_window > 0 &&
             s.settlement.window_s % s.settlement.settlements_per_window != 0) {
    issues.add("settlement",
               "window_s must be divisible by settlements_per_window for equal sub-windows");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_column(json_text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream msg;
    msg << "malformed JSON at line " << line << ", column " << column << ": " << e.what();
    throw Error(Errc::ParseError, msg.str());
  }
  if (!j.is_object()) {
    throw Error(Errc::ParseError, "scenario must be a JSON object");
  }

  Scenario s;
  Issues issues;

  static const std::set<std::string> known_keys = {
      "participants", "topics", "prices_wei", "agreements", "traffic",
      "loss",         "faults", "ledger",     "settlement", "seed"};
  for (const auto& [key, value] : j.items()) {
    if (known_keys.count(key) == 0) {
      issues.add(key, "unknown top-level key");
    }
  }

  const json* topics = get_member(j, "topics");
  if (topics == nullptr || !topics->is_array()) {
    issues.add("topics", "must be an array of topic names");
  } else {
    for (const auto& t : *topics) {
      if (t.is_string()) {
        if (!s.topics.insert(t.get<std::string>()).second) {
          issues.add("topics", "duplicate topic '" + t.get<std::string>() + "'");
        }
      } else {
        issues.add("topics", "topic names must be strings");
      }
    }
  }
  const json* prices = get_member(j, "prices_wei");
  if (prices == nullptr || !prices->is_object()) {
    issues.add("prices_wei", "must be an object mapping topic to wei");
  } else {
    for (const auto& [topic, price] : prices->items()) {
      if (!price.is_number_unsigned()) {
        issues.add("prices_wei", "price of '" + topic + "' must be a non-negative integer");
        continue;
      }
      s.prices_wei[topic] = price.get<Wei>();
    }
  }

  parse_participants(j, s, issues);
  parse_agreements(j, s, issues);
  parse_traffic(j, s, issues);
  parse_loss(j, s, issues);
  parse_faults(j, s, issues);
  parse_ledger(j, s, issues);
  parse_settlement(j, s, issues);
  if (const json* seed = get_member(j, "seed"); seed != nullptr && seed->is_number_unsigned()) {
    s.seed = seed->get<std::uint64_t>();
  } else if (seed != nullptr) {
    issues.add("seed", "must be a non-negative integer");
  }

  validate(s, issues);
  if (!issues.empty()) {
    throw ValidationError(std::move(issues.list));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoError, "cannot open scenario file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

namespace {

json target_to_json(const ParticipantId& p) {
  return json{{"kind", kind_name(p.kind)}, {"id", p.id}};
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  json producers = json::array();
  for (const auto& p : s.producers) {
    producers.push_back(json{{"id", p.id}, {"topics", p.topics}});
  }
  json consumers = json::array();
  for (const auto& c : s.consumers) {
    consumers.push_back(json{{"id", c.id}});
  }
  j["participants"] = json{{"producers", producers}, {"consumers", consumers}};
  j["topics"] = s.topics;
  j["prices_wei"] = s.prices_wei;

  json agreements = json::array();
  for (const auto& a : s.agreements) {
    agreements.push_back(json{{"producer", a.producer},
                              {"consumer", a.consumer},
                              {"topics", a.topics},
                              {"window", json::array({a.window_start, a.window_end})}});
  }
  j["agreements"] = agreements;

  json flows = json::array();
  for (const auto& f : s.traffic.flows) {
    json flow{{"producer", f.producer}, {"topic", f.topic}};
    if (f.rate_per_s.has_value()) {
      flow["rate_per_s"] = *f.rate_per_s;
    } else {
      flow["times"] = f.times;
    }
    flows.push_back(flow);
  }
  j["traffic"] = json{{"duration_s", s.traffic.duration_s}, {"flows", flows}};

  switch (s.loss.kind) {
    case LossSpec::Kind::None:
      j["loss"] = json{{"kind", "none"}};
      break;
    case LossSpec::Kind::Seeded:
      j["loss"] = json{{"kind", "seeded"}, {"drop_probability", s.loss.drop_probability}};
      break;
    case LossSpec::Kind::Explicit: {
      json drops = json::array();
      for (const auto& d : s.loss.drops) {
        drops.push_back(json{{"producer", d.producer},
                             {"topic", d.topic},
                             {"flow_index", d.flow_index},
                             {"consumer", d.consumer}});
      }
      j["loss"] = json{{"kind", "explicit"}, {"drops", drops}};
      break;
    }
  }

  json faults = json::array();
  for (const auto& fault : s.faults) {
    json f{{"target", target_to_json(fault.target)}};
    if (fault.seed != 0) f["seed"] = fault.seed;
    if (const auto* over = std::get_if<OverReport>(&fault.kind)) {
      f["kind"] = "over_report";
      if (over->factor.has_value()) f["factor"] = *over->factor;
      if (over->delta.has_value()) f["delta"] = *over->delta;
    } else if (const auto* under = std::get_if<UnderReport>(&fault.kind)) {
      f["kind"] = "under_report";
      if (under->factor.has_value()) f["factor"] = *under->factor;
      if (under->delta.has_value()) f["delta"] = *under->delta;
    } else if (std::holds_alternative<DropCube>(fault.kind)) {
      f["kind"] = "drop_cube";
    } else {
      const auto& perturb = std::get<PerturbKey>(fault.kind);
      f["kind"] = "perturb_key";
      f["topic"] = perturb.topic.name;
      f["delta"] = perturb.delta;
      if (perturb.producer.has_value()) f["producer"] = perturb.producer->id;
    }
    faults.push_back(f);
  }
  for (const auto& fault : s.broker_faults) {
    json f{{"target", json{{"kind", "broker"}, {"id", "broker"}}}};
    auto fill_key = [&](const TripleKey& key) {
      f["producer"] = key.producer.id;
      f["consumer"] = key.consumer.id;
      f["topic"] = key.topic.name;
    };
    if (const auto* inflate = std::get_if<InflateKey>(&fault)) {
      f["kind"] = "inflate";
      f["delta"] = inflate->delta;
      fill_key(inflate->key);
    } else if (const auto* deflate = std::get_if<DeflateKey>(&fault)) {
      f["kind"] = "deflate";
      f["delta"] = deflate->delta;
      fill_key(deflate->key);
    } else {
      const auto& drop = std::get<DropKey>(fault);
      f["kind"] = "drop_key";
      fill_key(drop.key);
    }
    faults.push_back(f);
  }
  j["faults"] = faults;

  j["ledger"] = json{{"mode", gas_mode_name(s.ledger.mode)},
                     {"gas_price_gwei", format_wei_as_gwei(s.ledger.gas_price)},
                     {"eth_usd", s.ledger.eth_usd},
                     {"initial_balances_wei", json{{"producers", s.ledger.producer_balances},
                                                   {"consumers", s.ledger.consumer_balances}}}};
  j["settlement"] = json{{"window_s", s.settlement.window_s},
                         {"settlements_per_window", s.settlement.settlements_per_window}};
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

}  // namespace cubesettle
