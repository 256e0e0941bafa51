// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "quadri/count.hpp"
#include "quadri/error.hpp"

namespace quadri {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroCoefficient: return "ZeroCoefficient";
    case ErrorCode::SumNotZero: return "SumNotZero";
    case ErrorCode::TooFewVariables: return "TooFewVariables";
    case ErrorCode::SignConditionViolated: return "SignConditionViolated";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ProgressionOutOfRange: return "ProgressionOutOfRange";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::InvariantViolated: return "InvariantViolated";
    case ErrorCode::AmbiguousArc: return "AmbiguousArc";
    case ErrorCode::NotMajorArc: return "NotMajorArc";
    case ErrorCode::NotStabilized: return "NotStabilized";
    case ErrorCode::ImaginaryResidue: return "ImaginaryResidue";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::HypothesisFails: return "HypothesisFails";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::DecompositionMismatch: return "DecompositionMismatch";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::AssertionFailed: return "AssertionFailed";
    case ErrorCode::NoQualifyingProgression: return "NoQualifyingProgression";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::string to_string(Count value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

std::string to_string_signed(SignedCount value) {
  if (value < 0) return "-" + to_string(static_cast<Count>(-value));
  return to_string(static_cast<Count>(value));
}

}  // namespace quadri
