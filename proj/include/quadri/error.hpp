// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quadri {

enum class ErrorCode {
  ZeroCoefficient,
  SumNotZero,
  TooFewVariables,
  SignConditionViolated,
  LengthMismatch,
  ProgressionOutOfRange,
  WeightOutOfRange,
  QuadratureNotConverged,
  CapacityExceeded,
  InvariantViolated,
  AmbiguousArc,
  NotMajorArc,
  NotStabilized,
  ImaginaryResidue,
  SingularPoint,
  HypothesisFails,
  NotFound,
  BudgetExhausted,
  GridTooCoarse,
  DecompositionMismatch,
  HypothesisViolated,
  AssertionFailed,
  NoQualifyingProgression,
  ConfigError,
  InvalidArgument,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every failure raised by the library. `code()` identifies the condition,
/// `what()` carries the name plus a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace quadri
