// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace quadri {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest-form-independent rendering with 17 significant digits.
std::string format_double(double value);

/// 64-bit FNV-1a, used to fingerprint configurations in CSV headers.
std::uint64_t fnv1a(const std::string& text);

/// Writes comma-separated rows with LF endings. The first lines are comment
/// lines starting with '#' carrying version, seed and config hash.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::uint64_t seed, const std::string& config_text, const std::string& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

}  // namespace quadri
