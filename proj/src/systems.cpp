// SPDX-License-Identifier: Apache-2.0
#include "quadri/systems.hpp"

#include <bit>
#include <charconv>
#include <numeric>

#include "quadri/error.hpp"

namespace quadri {

DiagonalSystem validate_system(std::span<const std::int64_t> lambdas, bool strict) {
  if (lambdas.empty()) fail(ErrorCode::TooFewVariables, "empty coefficient list");
  int positive = 0;
  int negative = 0;
  __int128 sum = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] == 0) fail(ErrorCode::ZeroCoefficient, "coefficient " + std::to_string(i + 1) + " is zero");
    (lambdas[i] > 0 ? positive : negative) += 1;
    sum += lambdas[i];
  }
  if (strict) {
    if (sum != 0) fail(ErrorCode::SumNotZero, "coefficients must sum to zero");
    if (lambdas.size() < 7) fail(ErrorCode::TooFewVariables, "need at least 7 variables, got " + std::to_string(lambdas.size()));
    if (positive < 2 || negative < 2)
      fail(ErrorCode::SignConditionViolated, "need at least two positive and two negative coefficients");
  }
  DiagonalSystem sys;
  sys.lambdas_.assign(lambdas.begin(), lambdas.end());
  sys.strict_ = strict;
  return sys;
}

DiagonalSystem parse_system(std::string_view literal, bool strict) {
  std::vector<std::int64_t> values;
  std::size_t pos = 0;
  while (pos <= literal.size()) {
    std::size_t comma = literal.find(',', pos);
    if (comma == std::string_view::npos) comma = literal.size();
    std::string_view token = literal.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    std::int64_t v = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc{} || end != token.data() + token.size())
      fail(ErrorCode::ConfigError, "bad system literal '" + std::string(literal) + "'");
    values.push_back(v);
    pos = comma + 1;
  }
  return validate_system(values, strict);
}

std::string to_string(const DiagonalSystem& sys) {
  std::string out;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(sys.lambda(i));
  }
  return out;
}

DiagonalSystem reference_system() {
  static const std::int64_t lambdas[] = {1, 1, 1, 1, -1, -1, -2};
  return validate_system(lambdas, true);
}

bool is_solution(const DiagonalSystem& sys, std::span<const std::int64_t> x) {
  if (x.size() != sys.size())
    fail(ErrorCode::LengthMismatch, "expected " + std::to_string(sys.size()) + " coordinates, got " + std::to_string(x.size()));
  __int128 linear = 0;
  __int128 quadratic = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    __int128 term = static_cast<__int128>(sys.lambda(i)) * x[i];
    linear += term;
    quadratic += term * x[i];
  }
  return linear == 0 && quadratic == 0;
}

bool is_trivial(std::span<const std::int64_t> x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (x[i] == x[j]) return true;
  return false;
}

SubsetWindow SubsetWindow::empty(std::int64_t n_max) {
  if (n_max < 0) fail(ErrorCode::InvalidArgument, "negative window size");
  SubsetWindow w;
  w.n_max_ = n_max;
  w.bits_.assign(static_cast<std::size_t>((n_max + 63) / 64), 0);
  return w;
}

void SubsetWindow::set(std::int64_t n) {
  auto i = static_cast<std::uint64_t>(n - 1);
  std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (!(bits_[i >> 6] & mask)) {
    bits_[i >> 6] |= mask;
    ++count_;
  }
}

SubsetWindow SubsetWindow::full(std::int64_t n_max) {
  SubsetWindow w = empty(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n) w.set(n);
  return w;
}

SubsetWindow SubsetWindow::from_members(std::int64_t n_max, std::span<const std::int64_t> members) {
  SubsetWindow w = empty(n_max);
  for (std::int64_t n : members) {
    if (n < 1 || n > n_max) fail(ErrorCode::InvalidArgument, "member " + std::to_string(n) + " outside {1.." + std::to_string(n_max) + "}");
    w.set(n);
  }
  return w;
}

SubsetWindow SubsetWindow::from_predicate(std::int64_t n_max, const std::function<bool(std::int64_t)>& pred) {
  SubsetWindow w = empty(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n)
    if (pred(n)) w.set(n);
  return w;
}

std::vector<std::int64_t> SubsetWindow::members() const {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (std::size_t w = 0; w < bits_.size(); ++w) {
    std::uint64_t word = bits_[w];
    while (word) {
      int b = std::countr_zero(word);
      out.push_back(static_cast<std::int64_t>(w * 64 + static_cast<std::size_t>(b)) + 1);
      word &= word - 1;
    }
  }
  return out;
}

std::int64_t SubsetWindow::count_in(const Progression& p) const {
  std::int64_t c = 0;
  for (std::int64_t k = 0; k < p.length; ++k) c += contains(p.at(k)) ? 1 : 0;
  return c;
}

SubsetWindow restrict_and_rescale(const SubsetWindow& a, const Progression& p) {
  if (p.length < 1 || p.step < 1 || p.start < 1 || p.last() > a.n_max())
    fail(ErrorCode::ProgressionOutOfRange, "progression (" + std::to_string(p.start) + "," + std::to_string(p.step) + "," +
                                               std::to_string(p.length) + ") leaves {1.." + std::to_string(a.n_max()) + "}");
  SubsetWindow out = SubsetWindow::empty(p.length);
  for (std::int64_t k = 0; k < p.length; ++k)
    if (a.contains(p.at(k))) out.set(k + 1);
  return out;
}

}  // namespace quadri
