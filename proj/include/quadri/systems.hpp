// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quadri {

/// Coefficients of the pair  sum l_i x_i^2 = 0,  sum l_i x_i = 0.
/// With strict set, the system is translation invariant (sum l_i = 0), has at
/// least seven variables and at least two coefficients of each sign.
class DiagonalSystem {
 public:
  std::span<const std::int64_t> lambdas() const { return lambdas_; }
  std::int64_t lambda(std::size_t i) const { return lambdas_[i]; }
  std::size_t size() const { return lambdas_.size(); }
  bool strict() const { return strict_; }

 private:
  friend DiagonalSystem validate_system(std::span<const std::int64_t>, bool);
  std::vector<std::int64_t> lambdas_;
  bool strict_ = true;
};

DiagonalSystem validate_system(std::span<const std::int64_t> lambdas, bool strict = true);
/// Parses "1,1,1,1,-1,-1,-2".
DiagonalSystem parse_system(std::string_view literal, bool strict = true);
std::string to_string(const DiagonalSystem& sys);

/// The default system used throughout the tests and CLI.
DiagonalSystem reference_system();

bool is_solution(const DiagonalSystem& sys, std::span<const std::int64_t> x);
bool is_trivial(std::span<const std::int64_t> x);

struct Progression {
  std::int64_t start = 1;
  std::int64_t step = 1;
  std::int64_t length = 1;

  std::int64_t at(std::int64_t k) const { return start + k * step; }
  std::int64_t last() const { return start + (length - 1) * step; }
};

/// A subset A of {1..N} stored as a packed bitset. Immutable once built.
class SubsetWindow {
 public:
  SubsetWindow() = default;
  static SubsetWindow empty(std::int64_t n_max);
  static SubsetWindow full(std::int64_t n_max);
  static SubsetWindow from_members(std::int64_t n_max, std::span<const std::int64_t> members);
  static SubsetWindow from_predicate(std::int64_t n_max, const std::function<bool(std::int64_t)>& pred);

  std::int64_t n_max() const { return n_max_; }
  std::int64_t count() const { return count_; }
  double density() const { return n_max_ == 0 ? 0.0 : static_cast<double>(count_) / static_cast<double>(n_max_); }
  bool contains(std::int64_t n) const {
    if (n < 1 || n > n_max_) return false;
    auto i = static_cast<std::uint64_t>(n - 1);
    return (bits_[i >> 6] >> (i & 63)) & 1U;
  }
  std::vector<std::int64_t> members() const;
  /// |A ∩ P|.
  std::int64_t count_in(const Progression& p) const;

 private:
  friend SubsetWindow restrict_and_rescale(const SubsetWindow&, const Progression&);
  void set(std::int64_t n);
  std::int64_t n_max_ = 0;
  std::int64_t count_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Window of size |P| whose member k+1 holds iff P.start + k*P.step is in A.
SubsetWindow restrict_and_rescale(const SubsetWindow& a, const Progression& p);

}  // namespace quadri
