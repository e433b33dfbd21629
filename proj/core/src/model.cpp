#include "cubesettle/model.hpp"

#include <sstream>

namespace cubesettle {

const char* kind_name(ParticipantKind kind) {
  switch (kind) {
    case ParticipantKind::Producer: return "producer";
    case ParticipantKind::Consumer: return "consumer";
    case ParticipantKind::Gateway: return "gateway";
    case ParticipantKind::Broker: return "broker";
  }
  return "unknown";
}

ParticipantId producer_id(std::string id) {
  return ParticipantId{ParticipantKind::Producer, std::move(id)};
}

ParticipantId consumer_id(std::string id) {
  return ParticipantId{ParticipantKind::Consumer, std::move(id)};
}

std::string to_string(const ParticipantId& p) {
  return std::string(kind_name(p.kind)) + ":" + p.id;
}

Window::Window(Timestamp s, Timestamp e) : start(s), end(e) {
  if (s >= e) {
    std::ostringstream msg;
    msg << "invalid window [" << s << ", " << e << "): start must precede end";
    throw Error(Errc::InvalidWindow, msg.str());
  }
}

Window make_window(Timestamp start, Timestamp end) { return Window(start, end); }

bool AgreementValidation::has(AgreementIssueCode code) const {
  for (const auto& issue : issues) {
    if (issue.code == code) return true;
  }
  return false;
}

AgreementValidation validate_agreement(const Agreement& agreement,
                                       const std::set<Topic>& producer_topics) {
  AgreementValidation result;
  if (agreement.producer.kind != ParticipantKind::Producer) {
    result.issues.push_back({AgreementIssueCode::WrongProducerKind, {}});
  }
  if (agreement.consumer.kind != ParticipantKind::Consumer) {
    result.issues.push_back({AgreementIssueCode::WrongConsumerKind, {}});
  }
  if (agreement.topics.empty()) {
    result.issues.push_back({AgreementIssueCode::EmptyTopicSet, {}});
  }
  for (const auto& topic : agreement.topics) {
    if (producer_topics.count(topic) == 0) {
      result.issues.push_back({AgreementIssueCode::TopicNotOffered, topic});
    }
  }
  return result;
}

Wei PriceTable::price_of(const Topic& topic) const {
  auto it = prices_.find(topic);
  if (it == prices_.end()) {
    throw Error(Errc::UnknownTopic, "no price for topic '" + topic.name + "'");
  }
  return it->second;
}

}  // namespace cubesettle
