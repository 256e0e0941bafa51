// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "quadri/error.hpp"

namespace quadri {

/// Exact nonnegative solution counts. 128 bits covers N^7 for N up to ~3e5,
/// far beyond every table cap, so no arbitrary-precision fallback is needed.
using Count = unsigned __int128;
using SignedCount = __int128;

std::string to_string(Count value);
std::string to_string_signed(SignedCount value);

inline Count checked_add(Count a, Count b) {
  Count r = a + b;
  if (r < a) fail(ErrorCode::CapacityExceeded, "128-bit count overflow");
  return r;
}

inline Count checked_mul(Count a, Count b) {
  if (a != 0 && b > ~Count{0} / a) fail(ErrorCode::CapacityExceeded, "128-bit count overflow");
  return a * b;
}

inline double to_double(Count value) { return static_cast<double>(value); }

}  // namespace quadri
