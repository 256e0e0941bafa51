// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "quadri/increment.hpp"
#include "quadri/represent.hpp"
#include "test_util.hpp"

using namespace quadri;
using quadri::testing::error_of;

namespace {

SubsetWindow residue_class(std::int64_t N, std::int64_t m, std::int64_t r) {
  return SubsetWindow::from_predicate(N, [=](std::int64_t n) { return n % m == r; });
}

// Balanced sum by direct long double summation.
double balanced_abs(const SubsetWindow& a, double a1, double a2) {
  const long double delta = static_cast<long double>(a.count()) / a.n_max();
  long double re = 0, im = 0;
  for (std::int64_t n = 1; n <= a.n_max(); ++n) {
    const long double f = (a.contains(n) ? 1.0L : 0.0L) - delta;
    const long double ph = 2 * std::numbers::pi_v<long double> * (a2 * static_cast<long double>(n) * n + a1 * static_cast<long double>(n));
    re += f * std::cos(ph);
    im += f * std::sin(ph);
  }
  return static_cast<double>(std::hypot(re, im));
}

double dist(double x) { return std::abs(x - std::round(x)); }

}  // namespace

TEST_CASE("balanced_sum examples") {
  const auto a = residue_class(300, 3, 0);
  CHECK(balanced_sum(a, FrequencyPoint(0, 0)) == Complex(0, 0));
  CHECK(std::abs(balanced_sum(a, FrequencyPoint(1.0 / 3, 0))) == doctest::Approx(100.0).epsilon(1e-9));
  const auto full = SubsetWindow::full(77);
  for (double x : {0.0, 0.1, 0.37}) CHECK(balanced_sum(full, FrequencyPoint(x, x * x)) == Complex(0, 0));
}

TEST_CASE("balanced_sum is linear in the indicator") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    const std::int64_t N = 50 + static_cast<std::int64_t>(rng() % 200);
    const auto a = SubsetWindow::from_predicate(N, [&](std::int64_t) { return u(rng) < 0.4; });
    std::vector<Complex> ind(static_cast<std::size_t>(N)), ones(static_cast<std::size_t>(N), 1.0);
    for (std::int64_t n = 1; n <= N; ++n) ind[static_cast<std::size_t>(n - 1)] = a.contains(n) ? 1.0 : 0.0;
    const FrequencyPoint al(u(rng), u(rng));
    const Complex want = weighted_quad_sum(ind, al) - a.density() * weighted_quad_sum(ones, al);
    CHECK(std::abs(balanced_sum(a, al) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("spectrum search") {
  const auto a = residue_class(300, 3, 0);
  const auto hit = largest_fourier_coefficient(a);
  CHECK(hit.eta >= 1.0 / 3 - 1e-6);
  // Peaks sit at nonzero multiples of 1/3 in either coordinate, since n^2 = 0 mod 3 iff n = 0 mod 3.
  CHECK(dist(3 * hit.alpha.alpha1) < 1e-3);
  CHECK(dist(3 * hit.alpha.alpha2) < 1e-3);
  CHECK(std::max(std::abs(hit.alpha.alpha1), std::abs(hit.alpha.alpha2)) > 0.3);
  CHECK(hit.magnitude == doctest::Approx(balanced_abs(a, hit.alpha.alpha1, hit.alpha.alpha2)).epsilon(1e-9));
  CHECK(largest_fourier_coefficient(SubsetWindow::full(100)).magnitude == 0.0);

  const double phi = (1 + std::sqrt(5.0)) / 2;
  const std::int64_t N = 2000;
  const auto q = SubsetWindow::from_predicate(N, [&](std::int64_t n) {
    const long double x = static_cast<long double>(phi) * n * n;
    return x - std::floor(x) < 0.2L;
  });
  const double planted = balanced_abs(q, 0, -phi) / N;
  const auto h = largest_fourier_coefficient(q);
  CHECK(h.eta >= 0.9 * planted);
  CHECK(h.magnitude == doctest::Approx(balanced_abs(q, h.alpha.alpha1, h.alpha.alpha2)).epsilon(1e-8));
}

TEST_CASE("Heilbronn approximation") {
  const auto z = heilbronn_approx(0.0, 10);
  CHECK(z.q == 1);
  CHECK(z.value == 0.0);
  const auto h = heilbronn_approx(0.5, 10);
  CHECK(h.q == 2);
  CHECK(h.value == 0.0);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> alphas{std::sqrt(2.0) - 1};
  for (int t = 0; t < 100; ++t) alphas.push_back(u(rng));
  for (double a : alphas) {
    const auto r = heilbronn_approx(a, 200);
    for (std::int64_t q = 1; q <= 200; ++q) REQUIRE(dist(a * static_cast<double>(q * q)) >= r.value - 1e-9);
    CHECK(r.q >= 1);
    CHECK(r.q <= 200);
    CHECK(r.within_bound == (r.value <= kHeilbronnConstant * std::cbrt(1.0 / 200)));
  }
}

TEST_CASE("Dirichlet approximation") {
  CHECK(dirichlet_approx(0.0, 5).r == 1);
  const auto third = dirichlet_approx(1.0 / 3, 9);
  CHECK(third.r == 3);
  CHECK(third.value < 1e-12);
  const double beta = std::numbers::pi - 3;
  const auto d = dirichlet_approx(beta, 10'000);
  CHECK(d.value <= 1e-2);
  for (std::int64_t r = 1; r <= 100; ++r) CHECK(dist(beta * static_cast<double>(r)) >= d.value - 1e-12);
}

TEST_CASE("density increment on a residue class") {
  const std::int64_t N = 3000;
  const auto a = residue_class(N, 3, 0);
  SpectrumHit hit;
  hit.alpha = FrequencyPoint(1.0 / 3, 0);
  hit.magnitude = std::abs(balanced_sum(a, hit.alpha));
  hit.eta = hit.magnitude / N;
  const auto step = density_increment(a, hit);
  CHECK(step.new_density() >= 1.0 / 3 + 1.0 / 12);
  CHECK(step.new_density() == 1.0);
  CHECK(step.progression.step % 3 == 0);
  CHECK(4 * (step.new_count * N - a.count() * step.new_size) >= 0);
  CHECK(step.new_count == a.count_in(step.progression));
  CHECK(step.new_size == step.progression.length);
  CHECK(step.max_variation <= step.eta_used / (4 * std::numbers::pi) + 1e-12);
  CHECK(step.new_size >= increment_length_floor(step.eta_used, N));
}

TEST_CASE("density increment with a planted quadratic bias") {
  const std::int64_t N = 100'000;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0, 1);
  const double a2 = std::sqrt(3.0) - 1;
  const auto a = SubsetWindow::from_predicate(N, [&](std::int64_t n) {
    const double bias = 0.25 * std::cos(2 * std::numbers::pi * frac_product(a2, n * n));
    return u(rng) < 0.5 + bias;
  });
  SearchOptions opts;
  opts.hints.push_back(FrequencyPoint(0, a2));
  const auto hit = largest_fourier_coefficient(a, opts);
  CHECK(hit.eta > 0.1);
  const auto step = density_increment(a, hit);
  // Exact density gain: 4 (|A ∩ P| N - |A| |P|) >= eta N |P|.
  const __int128 lhs = 4 * (static_cast<__int128>(step.new_count) * N - static_cast<__int128>(a.count()) * step.new_size);
  CHECK(static_cast<long double>(lhs) >= static_cast<long double>(step.eta_used) * N * step.new_size);
  CHECK(step.new_count == a.count_in(step.progression));
  CHECK(step.progression.start >= 1);
  CHECK(step.progression.last() <= N);
  CHECK(step.max_variation <= step.eta_used / (4 * std::numbers::pi) + 1e-12);
  CHECK(step.new_size >= increment_length_floor(step.eta_used, N));
}

TEST_CASE("Roth loop") {
  const auto sys = reference_system();
  const auto full = roth_loop(sys, SubsetWindow::full(32));
  REQUIRE(full.found);
  CHECK(is_solution(sys, full.solution));
  CHECK_FALSE(is_trivial(full.solution));
  CHECK(count_nontrivial(sys, 32) > 0);

  const auto single = roth_loop(sys, SubsetWindow::from_members(32, std::vector<std::int64_t>{7}));
  CHECK_FALSE(single.found);
  CHECK((single.reason == StallReason::WindowTooSmall || single.reason == StallReason::SpectrumFlat));
  CHECK(single.trace.empty());

  const auto cls = residue_class(600, 3, 0);
  const auto out = roth_loop(sys, cls);
  REQUIRE(out.found);
  CHECK(is_solution(sys, out.solution));
  CHECK_FALSE(is_trivial(out.solution));
  for (auto x : out.solution) CHECK(cls.contains(x));

  CHECK(stall_name(StallReason::SpectrumFlat) == "SpectrumFlat");
  CHECK(stall_name(StallReason::MaxSteps) == "MaxSteps");
}

TEST_CASE("Roth loop on a set with few solutions") {
  // Powers of two carry no nontrivial solution of the reference system at this size.
  std::vector<std::int64_t> pow2;
  for (std::int64_t p = 1; p <= 4096; p *= 2) pow2.push_back(p);
  const auto sys = reference_system();
  const auto w = SubsetWindow::from_members(4096, pow2);
  RothOptions opts;
  opts.max_steps = 4;
  const auto out = roth_loop(sys, w, opts);
  if (out.found) {
    CHECK(is_solution(sys, out.solution));
    for (auto x : out.solution) CHECK(w.contains(x));
  } else {
    for (const auto& step : out.trace) CHECK(step.new_density() > step.old_density());
  }
}
