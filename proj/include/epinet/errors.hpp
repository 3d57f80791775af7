#ifndef EPINET_ERRORS_HPP
#define EPINET_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace epinet {

enum class ErrorCode {
  InvalidName,
  InvalidFormula,
  DepthExceeded,
  FactivityViolation,
  NoSuchFact,
  UnknownAgent,
  NoSuchProp,
  ParseError,
  EmptyScope,
  GroupTooSmall,
  BadScope,
  IncompleteCommitments,
  SelfTrust,
  NotSecurityEligible,
  OriginIgnorant,
  NoInformation,
  NotAuthenticatable,
  NotAMember,
  NoSuchChannel,
  NoSuchThread,
  NoSuchAction,
  MalformedEvent,
};

const char* error_code_name(ErrorCode code);

class EpinetError : public std::runtime_error {
 public:
  EpinetError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Carries the canonical text of every fact that fails validation so callers
// can report (and retract) the offenders.
class FactivityError : public EpinetError {
 public:
  FactivityError(const std::string& message, std::vector<std::string> offending)
      : EpinetError(ErrorCode::FactivityViolation, message), offending_(std::move(offending)) {}

  const std::vector<std::string>& offending() const { return offending_; }

 private:
  std::vector<std::string> offending_;
};

}  // namespace epinet

#endif
