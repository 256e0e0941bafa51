// SPDX-License-Identifier: Apache-2.0
#include "quadri/represent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "quadri/error.hpp"
#include "quadri/parallel.hpp"

namespace quadri {

namespace {

// Smallest and largest y1^2+y2^2+y3^2 over triples in {1..N}^3 summing to m1.
std::int64_t row_lo(std::int64_t m1) {
  std::int64_t k = m1 / 3, r = m1 % 3;
  return r * (k + 1) * (k + 1) + (3 - r) * k * k;
}

std::int64_t row_hi(std::int64_t m1, std::int64_t N) {
  std::int64_t y1 = std::min(N, m1 - 2);
  std::int64_t rest = m1 - y1;
  std::int64_t y2 = std::min(N, rest - 1);
  std::int64_t y3 = rest - y2;
  return y1 * y1 + y2 * y2 + y3 * y3;
}

}  // namespace

std::uint32_t RepresentationTable::at(std::int64_t m1, std::int64_t m2) const {
  if (m1 < 3 || m1 > 3 * n_) return 0;
  const Row& row = rows_[static_cast<std::size_t>(m1)];
  std::int64_t off = m2 - row.lo;
  if (off < 0 || (off & 1)) return 0;
  auto k = static_cast<std::size_t>(off / 2);
  return k < row.counts.size() ? row.counts[k] : 0;
}

LatticeTable<double> RepresentationTable::to_dense() const {
  LatticeTable<double> out(m1_max(), m2_max());
  for_each_nonzero([&](std::int64_t m1, std::int64_t m2, std::uint32_t c) { out.at(m1, m2) = c; });
  return out;
}

RepresentationTable build_representation_table(std::int64_t N, std::int64_t n_cap) {
  if (N < 1) fail(ErrorCode::InvalidArgument, "N must be positive");
  if (N > n_cap) fail(ErrorCode::CapacityExceeded, "N = " + std::to_string(N) + " exceeds table cap " + std::to_string(n_cap));
  RepresentationTable t;
  t.n_ = N;
  t.rows_.resize(static_cast<std::size_t>(3 * N + 1));
  std::vector<Count> row_totals(static_cast<std::size_t>(3 * N + 1), 0);
  parallel_for(3 * N - 2, [&](std::int64_t task) {
    const std::int64_t m1 = 3 + task;
    RepresentationTable::Row& row = t.rows_[static_cast<std::size_t>(m1)];
    row.lo = row_lo(m1);
    const std::int64_t hi = row_hi(m1, N);
    row.counts.assign(static_cast<std::size_t>((hi - row.lo) / 2 + 1), 0);
    Count total = 0;
    for (std::int64_t y1 = std::max<std::int64_t>(1, m1 - 2 * N); y1 <= std::min(N, m1 - 2); ++y1) {
      const std::int64_t rest = m1 - y1;
      for (std::int64_t y2 = std::max<std::int64_t>(1, rest - N); y2 <= std::min(N, rest - 1); ++y2) {
        const std::int64_t y3 = rest - y2;
        const std::int64_t m2 = y1 * y1 + y2 * y2 + y3 * y3;
        auto& cell = row.counts[static_cast<std::size_t>((m2 - row.lo) / 2)];
        if (cell == UINT16_MAX) fail(ErrorCode::CapacityExceeded, "representation count exceeds 16-bit cell");
        ++cell;
        ++total;
      }
    }
    row_totals[static_cast<std::size_t>(m1)] = total;
  });
  for (Count c : row_totals) t.total_ += c;
  return t;
}

Count moment_sum(const RepresentationTable& table, int k) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "moment order must be positive");
  Count total = 0;
  table.for_each_nonzero([&](std::int64_t, std::int64_t, std::uint32_t c) {
    Count term = 1;
    for (int i = 0; i < k; ++i) term = checked_mul(term, c);
    total = checked_add(total, term);
  });
  return total;
}

DivisorBoundReport divisor_bound_check(const RepresentationTable& table) {
  const std::int64_t N = table.n();
  const std::int64_t dmax = 9 * N * N;
  std::vector<std::uint32_t> tau(static_cast<std::size_t>(dmax + 1), 0);
  for (std::int64_t d = 1; d <= dmax; ++d)
    for (std::int64_t m = d; m <= dmax; m += d) ++tau[static_cast<std::size_t>(m)];
  DivisorBoundReport report;
  table.for_each_nonzero([&](std::int64_t m1, std::int64_t m2, std::uint32_t c) {
    ++report.entries_checked;
    const std::int64_t d = 3 * m2 - m1 * m1;
    const std::string where = "(" + std::to_string(m1) + "," + std::to_string(m2) + ")";
    if (d < 0 || d > dmax) fail(ErrorCode::InvariantViolated, "3*m2 - m1^2 out of range at m = " + where);
    if (d == 0) {
      ++report.degenerate_entries;
      report.degenerate_max = std::max(report.degenerate_max, c);
      if (c > 1) fail(ErrorCode::InvariantViolated, "degenerate entry above 1 at m = " + where);
      return;
    }
    const std::uint32_t t = tau[static_cast<std::size_t>(d)];
    if (c > 9 * t) fail(ErrorCode::InvariantViolated, "R(m) > 9 tau(3 m2 - m1^2) at m = " + where);
    const double ratio = static_cast<double>(c) / t;
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.argmax_m1 = m1;
      report.argmax_m2 = m2;
    }
  });
  return report;
}

LatticeTable<Complex> weighted_table(std::span<const Complex> g) {
  const auto N = static_cast<std::int64_t>(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i]) > 1.0 + 1e-12) fail(ErrorCode::WeightOutOfRange, "|g(" + std::to_string(i + 1) + ")| exceeds 1");
  if (9 * N * N * N > 100'000'000) fail(ErrorCode::CapacityExceeded, "weighted table too large for N = " + std::to_string(N));
  LatticeTable<Complex> out(3 * N, 3 * N * N);
  if (N == 0) return out;
  for (std::int64_t y1 = 1; y1 <= N; ++y1)
    for (std::int64_t y2 = 1; y2 <= N; ++y2) {
      const Complex g12 = g[static_cast<std::size_t>(y1 - 1)] * g[static_cast<std::size_t>(y2 - 1)];
      if (g12 == Complex{}) continue;
      for (std::int64_t y3 = 1; y3 <= N; ++y3)
        out.at(y1 + y2 + y3, y1 * y1 + y2 * y2 + y3 * y3) += g12 * g[static_cast<std::size_t>(y3 - 1)];
    }
  return out;
}

namespace {

// Counts of (sum c_i x_i, sum c_i x_i^2) over one sign group; all c_i > 0.
struct GroupTable {
  std::int64_t lo1 = 0, lo2 = 0, rows = 1, cols = 1;
  std::vector<std::uint64_t> cells{1};

  std::uint64_t get(std::int64_t m1, std::int64_t m2) const {
    std::int64_t i = m1 - lo1, j = m2 - lo2;
    if (i < 0 || i >= rows || j < 0 || j >= cols) return 0;
    return cells[static_cast<std::size_t>(i * cols + j)];
  }
};

GroupTable build_group(const std::vector<std::int64_t>& coefs, std::span<const std::int64_t> values,
                       const CountOptions& options) {
  GroupTable table;
  const std::int64_t vmin = values.front(), vmax = values.back();
  for (std::int64_t c : coefs) {
    GroupTable next;
    next.lo1 = table.lo1 + c * vmin;
    next.lo2 = table.lo2 + c * vmin * vmin;
    next.rows = table.rows + c * (vmax - vmin);
    next.cols = table.cols + c * (vmax * vmax - vmin * vmin);
    if (static_cast<long double>(next.rows) * next.cols > options.max_table_entries)
      fail(ErrorCode::CapacityExceeded, "convolution table exceeds entry budget");
    next.cells.assign(static_cast<std::size_t>(next.rows * next.cols), 0);
    parallel_for(next.rows, [&](std::int64_t r) {
      const std::int64_t m1 = next.lo1 + r;
      std::uint64_t* out = next.cells.data() + r * next.cols;
      for (std::int64_t v : values) {
        const std::int64_t src = m1 - c * v - table.lo1;
        if (src < 0 || src >= table.rows) continue;
        const std::uint64_t* in = table.cells.data() + src * table.cols;
        const std::int64_t shift = table.lo2 + c * v * v - next.lo2;
        for (std::int64_t j = 0; j < table.cols; ++j)
          if (in[j]) out[j + shift] += in[j];
      }
    });
    table = std::move(next);
  }
  return table;
}

}  // namespace

Count count_coefficient_solutions(std::span<const std::int64_t> coefficients, std::span<const std::int64_t> values,
                                  const CountOptions& options) {
  std::vector<std::int64_t> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (!sorted.empty() && sorted.front() < 1) fail(ErrorCode::InvalidArgument, "variable values must be positive");
  std::vector<std::int64_t> pos, neg;
  Count free_factor = 1;
  for (std::int64_t c : coefficients) {
    if (c > 0) pos.push_back(c);
    else if (c < 0) neg.push_back(-c);
    else free_factor = checked_mul(free_factor, sorted.size());
  }
  if (pos.empty() && neg.empty()) return free_factor;
  if (sorted.empty()) return 0;
  const long double largest_group = static_cast<long double>(std::max(pos.size(), neg.size()));
  if (largest_group * std::log2(static_cast<long double>(sorted.size())) >= 63.0L)
    fail(ErrorCode::CapacityExceeded, "group counts exceed 64 bits");
  auto by_size = [](std::int64_t a, std::int64_t b) { return a > b; };
  std::sort(pos.begin(), pos.end(), by_size);
  std::sort(neg.begin(), neg.end(), by_size);
  GroupTable p = build_group(pos, sorted, options);
  GroupTable n = build_group(neg, sorted, options);
  Count total = 0;
  const std::int64_t lo1 = std::max(p.lo1, n.lo1), hi1 = std::min(p.lo1 + p.rows, n.lo1 + n.rows);
  const std::int64_t lo2 = std::max(p.lo2, n.lo2), hi2 = std::min(p.lo2 + p.cols, n.lo2 + n.cols);
  for (std::int64_t m1 = lo1; m1 < hi1; ++m1)
    for (std::int64_t m2 = lo2; m2 < hi2; ++m2) {
      std::uint64_t a = p.get(m1, m2);
      if (!a) continue;
      std::uint64_t b = n.get(m1, m2);
      if (b) total = checked_add(total, static_cast<Count>(a) * b);
    }
  return checked_mul(total, free_factor);
}

namespace {
std::vector<std::int64_t> value_set(std::int64_t N, const SubsetWindow* window, const CountOptions& options) {
  if (N < 0) fail(ErrorCode::InvalidArgument, "N must be nonnegative");
  if (window && window->n_max() != N)
    fail(ErrorCode::InvalidArgument, "window size does not match N");
  if (N > options.n_cap) fail(ErrorCode::CapacityExceeded, "N = " + std::to_string(N) + " exceeds DP cap " + std::to_string(options.n_cap));
  if (window) return window->members();
  std::vector<std::int64_t> v(static_cast<std::size_t>(N));
  for (std::int64_t i = 0; i < N; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  return v;
}
}  // namespace

Count count_solutions(const DiagonalSystem& sys, std::int64_t N, const SubsetWindow* window, const CountOptions& options) {
  std::vector<std::int64_t> values = value_set(N, window, options);
  return count_coefficient_solutions(sys.lambdas(), values, options);
}

Count count_nontrivial(const DiagonalSystem& sys, std::int64_t N, const SubsetWindow* window, const CountOptions& options) {
  std::vector<std::int64_t> values = value_set(N, window, options);
  const auto s = static_cast<int>(sys.size());
  std::map<std::vector<std::int64_t>, Count> memo;
  SignedCount total = 0;
  // Restricted growth strings enumerate the set partitions of the coordinates.
  std::vector<int> block(static_cast<std::size_t>(s), 0);
  for (;;) {
    int blocks = 1 + *std::max_element(block.begin(), block.end());
    std::vector<std::int64_t> merged(static_cast<std::size_t>(blocks), 0);
    std::vector<int> sizes(static_cast<std::size_t>(blocks), 0);
    for (int i = 0; i < s; ++i) {
      merged[static_cast<std::size_t>(block[static_cast<std::size_t>(i)])] += sys.lambda(static_cast<std::size_t>(i));
      ++sizes[static_cast<std::size_t>(block[static_cast<std::size_t>(i)])];
    }
    SignedCount mu = 1;
    for (int sz : sizes)
      for (int k = 1; k < sz; ++k) mu *= -k;
    std::vector<std::int64_t> key, negated;
    for (std::int64_t c : merged) {
      key.push_back(c);
      negated.push_back(-c);
    }
    std::sort(key.begin(), key.end());
    std::sort(negated.begin(), negated.end());
    if (negated < key) key = negated;
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, count_coefficient_solutions(key, values, options)).first;
    total += mu * static_cast<SignedCount>(it->second);
    // Next restricted growth string.
    int i = s - 1;
    for (; i > 0; --i) {
      int prefix_max = 0;
      for (int j = 0; j < i; ++j) prefix_max = std::max(prefix_max, block[static_cast<std::size_t>(j)]);
      if (block[static_cast<std::size_t>(i)] <= prefix_max) {
        ++block[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < s; ++j) block[static_cast<std::size_t>(j)] = 0;
        break;
      }
    }
    if (i == 0) break;
  }
  if (total < 0) fail(ErrorCode::InvariantViolated, "inclusion-exclusion produced a negative count");
  return static_cast<Count>(total);
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
    return std::hash<std::int64_t>{}(k.first * 0x9e3779b97f4a7c15LL ^ k.second);
  }
};

long double falling_factorial(std::size_t n, std::size_t k) {
  long double r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= static_cast<long double>(n > i ? n - i : 0);
  return r;
}

// Visits every ordered tuple of distinct values for the given coefficients.
template <class F>
void for_each_distinct_tuple(const std::vector<std::int64_t>& coefs, std::span<const std::int64_t> values, F&& fn) {
  const std::size_t k = coefs.size();
  std::vector<std::size_t> idx(k, 0);
  std::vector<std::int64_t> tuple(k);
  std::vector<char> used(values.size(), 0);
  auto rec = [&](auto&& self, std::size_t depth, std::int64_t lin, std::int64_t quad) -> bool {
    if (depth == k) return fn(tuple, lin, quad);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (used[i]) continue;
      used[i] = 1;
      const std::int64_t v = values[i];
      tuple[depth] = v;
      bool stop = self(self, depth + 1, lin + coefs[depth] * v, quad + coefs[depth] * v * v);
      used[i] = 0;
      if (stop) return true;
    }
    return false;
  };
  rec(rec, 0, 0, 0);
}

}  // namespace

std::optional<std::vector<std::int64_t>> find_nontrivial_solution(const DiagonalSystem& sys,
                                                                  std::span<const std::int64_t> values,
                                                                  std::int64_t budget) {
  std::vector<std::size_t> pos_idx, neg_idx;
  std::vector<std::int64_t> pos_c, neg_c;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (sys.lambda(i) > 0) {
      pos_idx.push_back(i);
      pos_c.push_back(sys.lambda(i));
    } else {
      neg_idx.push_back(i);
      neg_c.push_back(sys.lambda(i));
    }
  }
  if (values.size() < sys.size()) return std::nullopt;
  long double pos_count = falling_factorial(values.size(), pos_c.size());
  long double neg_count = falling_factorial(values.size(), neg_c.size());
  if (std::max(pos_count, neg_count) > static_cast<long double>(budget))
    fail(ErrorCode::BudgetExhausted, "solution search needs more than " + std::to_string(budget) + " tuples per side");
  const bool hash_pos = pos_count <= neg_count;
  const auto& small_c = hash_pos ? pos_c : neg_c;
  const auto& large_c = hash_pos ? neg_c : pos_c;
  const std::size_t ks = small_c.size();

  std::vector<std::int64_t> store;
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, PairHash> index;
  for_each_distinct_tuple(small_c, values, [&](const std::vector<std::int64_t>& t, std::int64_t lin, std::int64_t quad) {
    index[{lin, quad}].push_back(store.size());
    store.insert(store.end(), t.begin(), t.end());
    return false;
  });

  std::optional<std::vector<std::int64_t>> found;
  for_each_distinct_tuple(large_c, values, [&](const std::vector<std::int64_t>& t, std::int64_t lin, std::int64_t quad) {
    auto it = index.find({-lin, -quad});
    if (it == index.end()) return false;
    for (std::size_t off : it->second) {
      bool disjoint = true;
      for (std::size_t a = 0; a < ks && disjoint; ++a)
        for (std::int64_t v : t)
          if (store[off + a] == v) {
            disjoint = false;
            break;
          }
      if (!disjoint) continue;
      std::vector<std::int64_t> x(sys.size());
      const auto& small_idx = hash_pos ? pos_idx : neg_idx;
      const auto& large_idx = hash_pos ? neg_idx : pos_idx;
      for (std::size_t a = 0; a < ks; ++a) x[small_idx[a]] = store[off + a];
      for (std::size_t a = 0; a < t.size(); ++a) x[large_idx[a]] = t[a];
      found = std::move(x);
      return true;
    }
    return false;
  });
  return found;
}

}  // namespace quadri
