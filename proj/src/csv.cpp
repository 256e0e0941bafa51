// SPDX-License-Identifier: Apache-2.0
#include "quadri/csv.hpp"

#include <cinttypes>
#include <cstdio>

namespace quadri {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

CsvWriter::CsvWriter(std::ostream& out, std::uint64_t seed, const std::string& config_text, const std::string& header)
    : out_(out) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a(config_text));
  out_ << "# quadri " << kVersion << " seed=" << seed << " config_hash=" << hash << '\n';
  out_ << header << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

}  // namespace quadri
