#include "singcert/error.hpp"

namespace singcert {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownCatalogEntry: return "UnknownCatalogEntry";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::NotOnZeroSet: return "NotOnZeroSet";
    case ErrorCode::SingularPartial: return "SingularPartial";
    case ErrorCode::SingularLeadingBlock: return "SingularLeadingBlock";
    case ErrorCode::RankDrift: return "RankDrift";
    case ErrorCode::NotCritical: return "NotCritical";
    case ErrorCode::DegenerateBeyondRank: return "DegenerateBeyondRank";
    case ErrorCode::SignBreakdown: return "SignBreakdown";
    case ErrorCode::NotDiagonalAtOrigin: return "NotDiagonalAtOrigin";
    case ErrorCode::DuplicateCriticalValues: return "DuplicateCriticalValues";
    case ErrorCode::NonMorse: return "NonMorse";
    case ErrorCode::EtaNotPositive: return "EtaNotPositive";
    case ErrorCode::PerturbationTooLarge: return "PerturbationTooLarge";
    case ErrorCode::OutsideCertifiedBall: return "OutsideCertifiedBall";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StepLeftDomain: return "StepLeftDomain";
    case ErrorCode::PathLeftDomain: return "PathLeftDomain";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
  }
  return "Unknown";
}

bool is_refusal(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularJacobian:
    case ErrorCode::DomainTooSmall:
    case ErrorCode::NearSingular:
    case ErrorCode::NotOnZeroSet:
    case ErrorCode::SingularPartial:
    case ErrorCode::SingularLeadingBlock:
    case ErrorCode::RankDrift:
    case ErrorCode::NotCritical:
    case ErrorCode::DegenerateBeyondRank:
    case ErrorCode::SignBreakdown:
    case ErrorCode::NotDiagonalAtOrigin:
    case ErrorCode::DuplicateCriticalValues:
    case ErrorCode::NonMorse:
    case ErrorCode::EtaNotPositive:
    case ErrorCode::PerturbationTooLarge:
    case ErrorCode::OutsideCertifiedBall:
    case ErrorCode::SearchExhausted:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ParseError::ParseError(ErrorCode code, std::size_t position, const std::string& message)
    : Error(code, message + " at position " + std::to_string(position)), position_(position) {}

}  // namespace singcert
