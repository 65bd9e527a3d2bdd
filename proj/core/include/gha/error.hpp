#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gha {

enum class ErrorCode {
  NonIncreasingSpectrum,
  NonFiniteValue,
  IndexOutOfRange,
  InsufficientSpectrum,
  DomainError,
  QuadratureUnderResolved,
  Unsupported,
  NonPseudoBosonic,
  NotInverse,
  SingularMap,
  Overflow,
  DefectiveOperator,
  RankDeficient,
  NotPositive,
  NearZeroSample,
  ConvergenceFailure,
  DefectivePair,
  AlignmentFailure,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the report runner in particular) can map it to a failed check.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace gha
