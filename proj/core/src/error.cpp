#include "gha/error.hpp"

namespace gha {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonIncreasingSpectrum: return "NonIncreasingSpectrum";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InsufficientSpectrum: return "InsufficientSpectrum";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::QuadratureUnderResolved: return "QuadratureUnderResolved";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::NonPseudoBosonic: return "NonPseudoBosonic";
    case ErrorCode::NotInverse: return "NotInverse";
    case ErrorCode::SingularMap: return "SingularMap";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DefectiveOperator: return "DefectiveOperator";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotPositive: return "NotPositive";
    case ErrorCode::NearZeroSample: return "NearZeroSample";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DefectivePair: return "DefectivePair";
    case ErrorCode::AlignmentFailure: return "AlignmentFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace gha
