#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace singcert {

enum class ErrorCode {
  // input errors
  Parse,
  UnknownVariable,
  BadExponent,
  InvalidArgument,
  UnknownCatalogEntry,
  // certificate refusals
  SingularJacobian,
  DomainTooSmall,
  NearSingular,
  NotOnZeroSet,
  SingularPartial,
  SingularLeadingBlock,
  RankDrift,
  NotCritical,
  DegenerateBeyondRank,
  SignBreakdown,
  NotDiagonalAtOrigin,
  DuplicateCriticalValues,
  NonMorse,
  EtaNotPositive,
  PerturbationTooLarge,
  OutsideCertifiedBall,
  SearchExhausted,
  // numerical failures
  NoConvergence,
  StepLeftDomain,
  PathLeftDomain,
  QuadratureFailure,
};

std::string_view to_string(ErrorCode code);

// True for the errors that mean "the theorem's hypotheses do not hold here".
bool is_refusal(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, const std::string& message);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace singcert
