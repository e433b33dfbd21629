#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cubesettle {

enum class Errc {
  InvalidWindow,
  UnknownTopic,
  EmptyTopicSet,
  TopicNotOffered,
  OverlappingAgreement,
  InvalidAgreement,
  UnknownProducer,
  UnknownParticipant,
  TopicNotPublished,
  UnknownKey,
  DirectionViolation,
  UnauthorizedSender,
  OutOfOrderQuery,
  DuplicateOwner,
  InsufficientFunds,
  NonPositiveGasPrice,
  Overflow,
  ParseError,
  ValidationFailed,
  IoError,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Carries every validation problem found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

}  // namespace cubesettle
