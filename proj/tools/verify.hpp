// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace quadri::tools {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the invariant suite. The quick suite finishes in well under a minute.
std::vector<CheckResult> run_invariant_suite(bool quick, std::uint64_t seed);

}  // namespace quadri::tools
