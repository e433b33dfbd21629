#include "cubesettle/errors.hpp"

#include <sstream>

namespace cubesettle {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidWindow: return "InvalidWindow";
    case Errc::UnknownTopic: return "UnknownTopic";
    case Errc::EmptyTopicSet: return "EmptyTopicSet";
    case Errc::TopicNotOffered: return "TopicNotOffered";
    case Errc::OverlappingAgreement: return "OverlappingAgreement";
    case Errc::InvalidAgreement: return "InvalidAgreement";
    case Errc::UnknownProducer: return "UnknownProducer";
    case Errc::UnknownParticipant: return "UnknownParticipant";
    case Errc::TopicNotPublished: return "TopicNotPublished";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::DirectionViolation: return "DirectionViolation";
    case Errc::UnauthorizedSender: return "UnauthorizedSender";
    case Errc::OutOfOrderQuery: return "OutOfOrderQuery";
    case Errc::DuplicateOwner: return "DuplicateOwner";
    case Errc::InsufficientFunds: return "InsufficientFunds";
    case Errc::NonPositiveGasPrice: return "NonPositiveGasPrice";
    case Errc::Overflow: return "Overflow";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationFailed: return "ValidationFailed";
    case Errc::IoError: return "IoError";
  }
  return "UnknownError";
}

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream out;
  out << issues.size() << " validation error" << (issues.size() == 1 ? "" : "s");
  for (const auto& issue : issues) {
    out << "\n  - " << issue;
  }
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> issues)
    : Error(Errc::ValidationFailed, join_issues(issues)), issues_(std::move(issues)) {}

}  // namespace cubesettle
