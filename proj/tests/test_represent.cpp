// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "quadri/error.hpp"
#include "quadri/expsums.hpp"
#include "quadri/represent.hpp"

using namespace quadri;

namespace {

std::uint64_t u64(Count c) { return static_cast<std::uint64_t>(c); }

std::vector<std::vector<std::int64_t>> test_systems() {
  return {{1, 1, 1, 1, -1, -1, -2}, {2, 1, 1, -1, -1, -1, -1}, {1, 1, 1, 1, 1, -2, -3}, {3, 1, 1, -1, -1, -1, -2}};
}

// Odometer over values^s; counts solutions, optionally only pairwise distinct ones.
std::uint64_t brute(const std::vector<std::int64_t>& lam, const std::vector<std::int64_t>& values, bool distinct) {
  const std::size_t s = lam.size();
  std::vector<std::size_t> idx(s, 0);
  std::uint64_t hits = 0;
  if (values.empty()) return 0;
  while (true) {
    std::int64_t l = 0, q = 0;
    for (std::size_t i = 0; i < s; ++i) {
      const std::int64_t x = values[idx[i]];
      l += lam[i] * x;
      q += lam[i] * x * x;
    }
    if (l == 0 && q == 0) {
      bool ok = true;
      if (distinct)
        for (std::size_t i = 0; i < s && ok; ++i)
          for (std::size_t j = i + 1; j < s && ok; ++j) ok = idx[i] != idx[j];
      hits += ok;
    }
    std::size_t k = 0;
    while (k < s && ++idx[k] == values.size()) idx[k++] = 0;
    if (k == s) break;
  }
  return hits;
}

std::vector<std::int64_t> range(std::int64_t n) {
  std::vector<std::int64_t> v;
  for (std::int64_t i = 1; i <= n; ++i) v.push_back(i);
  return v;
}

std::int64_t tau(std::int64_t n) {
  std::int64_t t = 0;
  for (std::int64_t d = 1; d * d <= n; ++d)
    if (n % d == 0) t += (d * d == n) ? 1 : 2;
  return t;
}

}  // namespace

TEST_CASE("representation table examples") {
  for (std::int64_t N : {1, 2, 5}) CHECK(build_representation_table(N).at(3, 3) == 1);
  CHECK(build_representation_table(2).at(4, 6) == 3);
  CHECK(u64(build_representation_table(10).total()) == 1000);
  CHECK_THROWS_AS(build_representation_table(1201), Error);
}

TEST_CASE("representation table matches triple enumeration") {
  for (std::int64_t N : {1, 3, 7, 13}) {
    const auto t = build_representation_table(N);
    std::map<std::pair<std::int64_t, std::int64_t>, std::uint32_t> oracle;
    for (std::int64_t a = 1; a <= N; ++a)
      for (std::int64_t b = 1; b <= N; ++b)
        for (std::int64_t c = 1; c <= N; ++c) ++oracle[{a + b + c, a * a + b * b + c * c}];
    std::size_t nonzero = 0;
    t.for_each_nonzero([&](std::int64_t m1, std::int64_t m2, std::uint32_t v) {
      ++nonzero;
      CHECK(oracle[{m1, m2}] == v);
    });
    CHECK(nonzero == oracle.size());
    CHECK(t.at(1, 1) == 0);
    CHECK(t.at(3 * N, 3 * N * N) == 1);
  }
}

TEST_CASE("moment_sum") {
  const auto t2 = build_representation_table(2);
  CHECK(u64(moment_sum(t2, 1)) == 8);
  std::uint64_t pairs = 0;
  for (int a = 0; a < 64; ++a) {
    const int x[6] = {1 + (a & 1), 1 + ((a >> 1) & 1), 1 + ((a >> 2) & 1), 1 + ((a >> 3) & 1), 1 + ((a >> 4) & 1), 1 + ((a >> 5) & 1)};
    pairs += (x[0] + x[1] + x[2] == x[3] + x[4] + x[5]) && (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] == x[3] * x[3] + x[4] * x[4] + x[5] * x[5]);
  }
  CHECK(u64(moment_sum(t2, 2)) == pairs);
  const auto t30 = build_representation_table(30);
  CHECK(u64(moment_sum(t30, 1)) == 27000);
  std::uint64_t cubes = 0;
  t30.for_each_nonzero([&](std::int64_t, std::int64_t, std::uint32_t v) { cubes += std::uint64_t{v} * v * v; });
  CHECK(u64(moment_sum(t30, 3)) == cubes);
}

TEST_CASE("divisor bound holds") {
  for (std::int64_t N : {3, 20, 50}) {
    const auto t = build_representation_table(N);
    const auto rep = divisor_bound_check(t);
    CHECK(rep.max_ratio <= 9.0);
    CHECK(rep.degenerate_max <= 1);
    CHECK(rep.degenerate_entries == N);
  }
  // Independent recheck at N = 12.
  const auto t = build_representation_table(12);
  t.for_each_nonzero([&](std::int64_t m1, std::int64_t m2, std::uint32_t v) {
    const std::int64_t d = 3 * m2 - m1 * m1;
    if (d == 0)
      CHECK(v <= 1);
    else
      CHECK(v <= 9 * tau(d));
  });
}

TEST_CASE("weighted_table examples") {
  const std::int64_t N = 9;
  const auto t = build_representation_table(N);
  std::vector<Complex> ones(N, 1.0), zeros(N, 0.0);
  const auto w1 = weighted_table(ones);
  const auto w0 = weighted_table(zeros);
  for (std::int64_t m1 = 1; m1 <= 3 * N; ++m1)
    for (std::int64_t m2 = 1; m2 <= 3 * N * N; ++m2) {
      REQUIRE(w1.at(m1, m2) == Complex(t.at(m1, m2), 0));
      REQUIRE(w0.at(m1, m2) == Complex(0, 0));
    }
  std::vector<Complex> even{0, 1, 0, 1};
  CHECK(std::abs(weighted_table(even).at(6, 12) - 1.0) < 1e-12);
  std::vector<Complex> bad{1.0, Complex(1, 1)};
  CHECK_THROWS_AS(weighted_table(bad), Error);
}

TEST_CASE("weighted table Fourier consistency") {
  const std::int64_t N = 24;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Complex> g(N);
  for (auto& x : g) x = std::polar(u(rng), 2 * std::numbers::pi * u(rng));
  const auto w = weighted_table(g);
  for (int t = 0; t < 20; ++t) {
    const FrequencyPoint a(u(rng), u(rng));
    Complex s = 0;
    for (std::int64_t m1 = 1; m1 <= 3 * N; ++m1)
      for (std::int64_t m2 = 1; m2 <= 3 * N * N; ++m2) {
        const Complex v = w.at(m1, m2);
        if (v != Complex(0, 0)) s += v * unit_phase(frac_product(a.alpha1, m1) + frac_product(a.alpha2, m2));
      }
    const Complex V = weighted_quad_sum(g, a);
    const Complex cube = V * V * V;
    CHECK(std::abs(s - cube) <= 1e-6 * std::max(1.0, std::abs(cube)));
  }
}

TEST_CASE("count_solutions matches brute force") {
  for (const auto& lam : test_systems()) {
    const auto sys = validate_system(lam);
    for (std::int64_t N = 1; N <= 4; ++N) {
      const auto vals = range(N);
      CHECK(u64(count_solutions(sys, N)) == brute(lam, vals, false));
      CHECK(u64(count_nontrivial(sys, N)) == brute(lam, vals, true));
    }
  }
}

TEST_CASE("count examples") {
  const auto sys = reference_system();
  CHECK(u64(count_solutions(sys, 1)) == 1);
  CHECK(u64(count_solutions(sys, 2)) >= 2);
  CHECK(u64(count_nontrivial(sys, 1)) == 0);
  const auto one = SubsetWindow::from_members(5, std::vector<std::int64_t>{1});
  for (const auto& lam : test_systems()) CHECK(u64(count_solutions(validate_system(lam), 5, &one)) == 1);
  const auto none = SubsetWindow::empty(5);
  CHECK(u64(count_solutions(sys, 5, &none)) == 0);
  CHECK(u64(count_nontrivial(sys, 5, &none)) == 0);
  CHECK_THROWS_AS(count_solutions(sys, 65), Error);
}

TEST_CASE("windowed counts match brute force") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 6; ++t) {
    std::vector<std::int64_t> members;
    for (std::int64_t n = 1; n <= 12; ++n)
      if (rng() % 2) members.push_back(n);
    if (members.size() > 6) members.resize(6);
    const auto w = SubsetWindow::from_members(12, members);
    const auto lam = test_systems()[static_cast<std::size_t>(t) % 4];
    const auto sys = validate_system(lam);
    CHECK(u64(count_solutions(sys, 12, &w)) == brute(lam, members, false));
    CHECK(u64(count_nontrivial(sys, 12, &w)) == brute(lam, members, true));
    CHECK(u64(count_coefficient_solutions(lam, members)) == brute(lam, members, false));
  }
}

TEST_CASE("variable order does not change the count") {
  const auto a = validate_system(std::vector<std::int64_t>{1, 1, 1, 1, -1, -1, -2});
  const auto b = validate_system(std::vector<std::int64_t>{-2, 1, -1, 1, 1, -1, 1});
  for (std::int64_t N : {5, 9, 14}) {
    CHECK(u64(count_solutions(a, N)) == u64(count_solutions(b, N)));
    CHECK(u64(count_nontrivial(a, N)) == u64(count_nontrivial(b, N)));
  }
}

TEST_CASE("monotone and growing like N^4") {
  const auto sys = reference_system();
  Count prev = 0;
  for (std::int64_t N = 1; N <= 12; ++N) {
    const Count z = count_solutions(sys, N);
    CHECK(z >= prev);
    prev = z;
  }
  const auto w = SubsetWindow::from_predicate(16, [](std::int64_t n) { return n % 3 != 0; });
  CHECK(count_solutions(sys, 16, &w) <= count_solutions(sys, 16));
  std::vector<double> ratios;
  for (std::int64_t N : {16, 24, 32, 48}) ratios.push_back(to_double(count_solutions(sys, N)) / std::pow(static_cast<double>(N), 4));
  for (double r : ratios) CHECK(r > 0.5);
  CHECK(ratios.back() > 0.5 * ratios.front());
}

TEST_CASE("nontrivial witness search") {
  const auto sys = reference_system();
  const auto x = find_nontrivial_solution(sys, range(20));
  REQUIRE(x.has_value());
  CHECK(is_solution(sys, *x));
  CHECK_FALSE(is_trivial(*x));
  for (auto v : *x) CHECK((v >= 1 && v <= 20));
  CHECK_FALSE(find_nontrivial_solution(sys, range(6)).has_value() != (u64(count_nontrivial(sys, 6)) > 0));
  CHECK_THROWS_AS(find_nontrivial_solution(sys, range(200), 1000), Error);
}
