// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "quadri/count.hpp"
#include "quadri/systems.hpp"

namespace quadri {

using Complex = std::complex<double>;

/// Dense table over the lattice 1 <= m1 <= m1_max, 1 <= m2 <= m2_max.
template <class T>
struct LatticeTable {
  std::int64_t m1_max = 0;
  std::int64_t m2_max = 0;
  std::vector<T> data;

  LatticeTable() = default;
  LatticeTable(std::int64_t r, std::int64_t c) : m1_max(r), m2_max(c), data(static_cast<std::size_t>(r * c)) {}
  T& at(std::int64_t m1, std::int64_t m2) { return data[static_cast<std::size_t>((m1 - 1) * m2_max + (m2 - 1))]; }
  const T& at(std::int64_t m1, std::int64_t m2) const {
    return data[static_cast<std::size_t>((m1 - 1) * m2_max + (m2 - 1))];
  }
  bool in_range(std::int64_t m1, std::int64_t m2) const { return m1 >= 1 && m1 <= m1_max && m2 >= 1 && m2 <= m2_max; }
};

/// R(m) = #{(y1,y2,y3) in {1..N}^3 : y1+y2+y3 = m1, y1^2+y2^2+y3^2 = m2}.
/// Stored row by row in m1; each row only spans the feasible m2 interval and
/// only the parity class m2 = m1 mod 2.
class RepresentationTable {
 public:
  std::int64_t n() const { return n_; }
  std::int64_t m1_max() const { return 3 * n_; }
  std::int64_t m2_max() const { return 3 * n_ * n_; }
  std::uint32_t at(std::int64_t m1, std::int64_t m2) const;
  Count total() const { return total_; }

  /// Calls fn(m1, m2, count) for every nonzero entry in increasing (m1, m2) order.
  template <class F>
  void for_each_nonzero(F&& fn) const {
    for (std::int64_t m1 = 3; m1 <= 3 * n_; ++m1) {
      const Row& row = rows_[static_cast<std::size_t>(m1)];
      for (std::size_t k = 0; k < row.counts.size(); ++k)
        if (row.counts[k]) fn(m1, row.lo + 2 * static_cast<std::int64_t>(k), static_cast<std::uint32_t>(row.counts[k]));
    }
  }

  LatticeTable<double> to_dense() const;

 private:
  friend RepresentationTable build_representation_table(std::int64_t, std::int64_t);
  struct Row {
    std::int64_t lo = 0;
    std::vector<std::uint16_t> counts;
  };
  std::int64_t n_ = 0;
  Count total_ = 0;
  std::vector<Row> rows_;
};

RepresentationTable build_representation_table(std::int64_t N, std::int64_t n_cap = 1200);

/// Exact sum of R(m)^k.
Count moment_sum(const RepresentationTable& table, int k);

struct DivisorBoundReport {
  double max_ratio = 0;  // max R(m) / tau(3 m2 - m1^2) over non-degenerate m
  std::int64_t argmax_m1 = 0;
  std::int64_t argmax_m2 = 0;
  std::int64_t entries_checked = 0;
  std::int64_t degenerate_entries = 0;
  std::uint32_t degenerate_max = 0;
};

/// Checks R(m) <= 9 tau(3 m2 - m1^2), and R(m) <= 1 on the stripe 3 m2 = m1^2.
/// Throws InvariantViolated naming the first offending m.
DivisorBoundReport divisor_bound_check(const RepresentationTable& table);

/// Entry m is the sum of g(y1) g(y2) g(y3) over triples mapping to m.
LatticeTable<Complex> weighted_table(std::span<const Complex> g);

struct CountOptions {
  std::int64_t n_cap = 64;
  std::int64_t max_table_entries = 200'000'000;
};

/// Number of x in A^s (A = {1..N} when no window given) solving both equations,
/// by sign-split convolution over the (linear, quadratic) lattice.
Count count_solutions(const DiagonalSystem& sys, std::int64_t N, const SubsetWindow* window = nullptr,
                      const CountOptions& options = {});

/// Solutions with pairwise distinct coordinates, by inclusion-exclusion over
/// coincidence patterns.
Count count_nontrivial(const DiagonalSystem& sys, std::int64_t N, const SubsetWindow* window = nullptr,
                       const CountOptions& options = {});

/// Count for an arbitrary coefficient list (zeros allowed, contributing a free
/// factor |values|) with variables ranging over the sorted value set.
Count count_coefficient_solutions(std::span<const std::int64_t> coefficients, std::span<const std::int64_t> values,
                                  const CountOptions& options = {});

/// Searches for a solution with pairwise distinct coordinates drawn from
/// `values` by matching partial sums of the positive and negative variables.
/// Returns the first match in a fixed enumeration order. Throws
/// BudgetExhausted when either side has more than `budget` ordered tuples.
std::optional<std::vector<std::int64_t>> find_nontrivial_solution(const DiagonalSystem& sys,
                                                                  std::span<const std::int64_t> values,
                                                                  std::int64_t budget = 20'000'000);

}  // namespace quadri
