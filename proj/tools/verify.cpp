// SPDX-License-Identifier: Apache-2.0
#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "quadri/circle.hpp"
#include "quadri/csv.hpp"
#include "quadri/error.hpp"
#include "quadri/expsums.hpp"
#include "quadri/increment.hpp"
#include "quadri/represent.hpp"
#include "quadri/restriction.hpp"
#include "quadri/rng.hpp"
#include "quadri/systems.hpp"

namespace quadri::tools {

namespace {

using Check = std::function<CheckResult()>;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::int64_t brute_count(const DiagonalSystem& sys, std::int64_t N) {
  const std::size_t s = sys.size();
  std::vector<std::int64_t> x(s, 1);
  std::int64_t hits = 0;
  for (;;) {
    std::int64_t lin = 0, quad = 0;
    for (std::size_t i = 0; i < s; ++i) {
      lin += sys.lambda(i) * x[i];
      quad += sys.lambda(i) * x[i] * x[i];
    }
    hits += lin == 0 && quad == 0;
    std::size_t i = 0;
    while (i < s && ++x[i] > N) x[i++] = 1;
    if (i == s) return hits;
  }
}

CheckResult dp_vs_brute() {
  const DiagonalSystem sys = reference_system();
  bool ok = true;
  std::string detail;
  for (std::int64_t N : {2, 3}) {
    const std::int64_t b = brute_count(sys, N);
    ok &= count_solutions(sys, N) == static_cast<Count>(b);
    detail += "Z(" + std::to_string(N) + ")=" + std::to_string(b) + " ";
  }
  return {"exact count matches brute force", ok, detail};
}

CheckResult nontrivial_vs_brute() {
  const DiagonalSystem sys = reference_system();
  const std::int64_t N = 10;
  std::vector<std::int64_t> x(7, 1);
  std::int64_t hits = 0;
  for (;;) {
    if (is_solution(sys, x) && !is_trivial(x)) ++hits;
    std::size_t i = 0;
    while (i < 7 && ++x[i] > N) x[i++] = 1;
    if (i == 7) break;
  }
  const Count nt = count_nontrivial(sys, N);
  return {"nontrivial count matches brute force", nt == static_cast<Count>(hits), "N=10 count=" + std::to_string(hits)};
}

CheckResult representation_mass() {
  const std::int64_t N = 50;
  const RepresentationTable t = build_representation_table(N);
  return {"representation mass equals N^3", t.total() == static_cast<Count>(N * N * N), "N=50"};
}

CheckResult grid_parseval(std::uint64_t seed) {
  CounterRng rng(seed, 1);
  const std::int64_t N = 24;
  std::vector<Complex> g(static_cast<std::size_t>(N));
  double mass = 0;
  for (auto& x : g) {
    x = std::polar(rng.uniform(), 2 * std::numbers::pi * rng.uniform());
    mass += std::norm(x);
  }
  const double mean = grid_power_mean(g, 2.0, 6 * N, 6 * N * N, true, false);
  const double rel = std::abs(mean - mass) / mass;
  return {"grid Parseval", rel <= 1e-8, "relative gap " + num(rel)};
}

CheckResult transform_identity() {
  CounterRng rng(5, 2);
  double worst = 0;
  for (std::int64_t q = 1; q <= 16; ++q)
    for (int t = 0; t < 4; ++t) {
      const auto m1 = static_cast<std::int64_t>(rng.below(500)) + 1, m2 = static_cast<std::int64_t>(rng.below(50000)) + 1;
      const Complex a = arithmetic_factor(q, m1, m2), b = arithmetic_factor_transform(q, m1, m2);
      worst = std::max(worst, std::abs(a - b) / std::max(1e-6, std::abs(a)));
    }
  return {"transform identity", worst <= 1e-6, "max relative gap " + num(worst)};
}

CheckResult multiplicativity() {
  const DiagonalSystem sys = reference_system();
  bool ok = true;
  double worst = 0;
  // Many terms vanish identically, so the gap is measured against a floor.
  for (auto [q1, q2] : {std::pair<std::int64_t, std::int64_t>{2, 3}, {3, 4}, {4, 5}, {8, 9}, {8, 25}, {9, 32}, {5, 7}}) {
    const Complex lhs = singular_series_term(sys, q1 * q2);
    const Complex rhs = singular_series_term(sys, q1) * singular_series_term(sys, q2);
    const double gap = std::abs(lhs - rhs);
    ok &= gap <= 1e-8 * std::abs(rhs) + 1e-14;
    worst = std::max(worst, gap);
  }
  return {"singular series term multiplicative", ok, "max gap " + num(worst)};
}

CheckResult mod_count_routes() {
  const DiagonalSystem sys = reference_system();
  bool ok = true;
  for (std::int64_t q = 1; q <= 12; ++q)
    ok &= count_solutions_mod(sys, q, ModCountMethod::CharacterSum) == count_solutions_mod(sys, q, ModCountMethod::Dynamic);
  return {"congruence counts agree across routes", ok, "q <= 12"};
}

CheckResult hensel_idempotent() {
  const DiagonalSystem sys = reference_system();
  bool ok = true;
  for (std::int64_t p : {2, 3, 5}) {
    const PadicSolution s = find_nonsingular_padic(sys, p);
    const PadicSolution a = hensel_lift(sys, p, s.x, 5, s.pair);
    const PadicSolution b = hensel_lift(sys, p, a.x, 5, s.pair);
    ok &= a.x == b.x;
  }
  return {"Hensel lifting idempotent", ok, "p in {2,3,5}, k=5"};
}

CheckResult heilbronn_minimal(std::uint64_t seed) {
  CounterRng rng(seed, 3);
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    const double alpha = rng.uniform();
    const HeilbronnResult r = heilbronn_approx(alpha, 200);
    for (std::int64_t q = 1; q <= 200; ++q) ok &= circle_norm(frac_product(alpha, q * q)) >= r.value;
  }
  return {"Heilbronn scan minimal", ok, "20 random alpha, Q=200"};
}

CheckResult balanced_linearity(std::uint64_t seed) {
  CounterRng rng(seed, 4);
  const std::int64_t N = 300;
  const SubsetWindow a = SubsetWindow::from_predicate(N, [&](std::int64_t) { return rng.uniform() < 0.4; });
  std::vector<Complex> ind(static_cast<std::size_t>(N)), one(static_cast<std::size_t>(N), 1.0);
  for (std::int64_t n = 1; n <= N; ++n) ind[static_cast<std::size_t>(n - 1)] = a.contains(n) ? 1.0 : 0.0;
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    const FrequencyPoint alpha(rng.uniform(), rng.uniform());
    const Complex lhs = balanced_sum(a, alpha);
    const Complex rhs = weighted_quad_sum(ind, alpha) - a.density() * weighted_quad_sum(one, alpha);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }
  return {"balanced sum linearity", worst <= 1e-9, "max gap " + num(worst)};
}

CheckResult roth_full_window() {
  const DiagonalSystem sys = reference_system();
  const SubsetWindow a0 = SubsetWindow::full(32);
  const RothOutcome out = roth_loop(sys, a0);
  const bool ok = out.found && is_solution(sys, out.solution) && !is_trivial(out.solution);
  return {"increment loop finds a witness in {1..32}", ok, ok ? "found" : "not found"};
}

CheckResult decomposition_complete() {
  const std::int64_t N = 8, Q = 2;
  const Decomposition d = decompose_representation(N, Q);
  const RepresentationTable r = build_representation_table(N);
  double worst = 0;
  for (std::int64_t m1 = 1; m1 <= 3 * N; ++m1)
    for (std::int64_t m2 = 1; m2 <= 3 * N * N; ++m2) {
      Complex sum = d.remainder.values.at(m1, m2);
      for (const auto& piece : d.pieces) sum += piece.values.at(m1, m2);
      worst = std::max(worst, std::abs(sum - static_cast<double>(r.at(m1, m2))));
    }
  return {"decomposition completeness", worst <= 1e-9, "max gap " + num(worst)};
}

CheckResult arcs_partition(std::uint64_t seed) {
  CounterRng rng(seed, 5);
  const std::int64_t N = 1000, Q = 3;
  int bad = 0;
  for (int i = 0; i < 2000; ++i) {
    const ArcClass c = classify_arc(FrequencyPoint(rng.uniform(), rng.uniform()), Q, N);
    if (c.major && c.candidates != 1 && !CutoffParams(Q, N).separation_warning()) ++bad;
  }
  return {"arc classification unique", bad == 0, std::to_string(bad) + " ambiguous points"};
}

CheckResult second_moment_shape() {
  const std::int64_t N = 100;
  const double m = to_double(moment_sum(build_representation_table(N), 2));
  const double ratio = m / (1e6 * std::log(100.0));
  return {"second moment near 18/pi^2 N^3 log N", ratio > 1.824 * 0.6 && ratio < 1.824 * 1.4, "ratio " + num(ratio)};
}

CheckResult eighth_moment() {
  const std::int64_t N = 16;
  std::vector<Complex> g(static_cast<std::size_t>(N), 1.0);
  const LpMoment lp = lp_moment(g, 8.0);
  std::vector<double> hist(static_cast<std::size_t>((4 * N + 1) * (4 * N * N + 1)), 0.0);
  for (std::int64_t a = 1; a <= N; ++a)
    for (std::int64_t b = 1; b <= N; ++b)
      for (std::int64_t c = 1; c <= N; ++c)
        for (std::int64_t d = 1; d <= N; ++d)
          hist[static_cast<std::size_t>((a + b + c + d) * (4 * N * N + 1) + a * a + b * b + c * c + d * d)] += 1;
  double exact = 0;
  for (double h : hist) exact += h * h;
  const double rel = std::abs(lp.moment - exact) / exact;
  return {"eighth moment matches lattice count", rel <= 0.01, "relative gap " + num(rel)};
}

CheckResult prediction_small() {
  const DiagonalSystem sys = reference_system();
  const Prediction p = predict_Z(sys, 32, 32);
  const double exact = to_double(count_solutions(sys, 32));
  const double rel = std::abs(p.prediction - exact) / exact;
  return {"circle-method prediction at N=32", rel <= 0.25, "relative error " + num(rel)};
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(bool quick, std::uint64_t seed) {
  std::vector<Check> checks = {
      dp_vs_brute,
      nontrivial_vs_brute,
      representation_mass,
      [seed] { return grid_parseval(seed); },
      transform_identity,
      multiplicativity,
      mod_count_routes,
      hensel_idempotent,
      [seed] { return heilbronn_minimal(seed); },
      [seed] { return balanced_linearity(seed); },
      roth_full_window,
      decomposition_complete,
      [seed] { return arcs_partition(seed); },
  };
  if (!quick) {
    checks.push_back(second_moment_shape);
    checks.push_back(eighth_moment);
    checks.push_back(prediction_small);
  }
  std::vector<CheckResult> out;
  for (const Check& c : checks) {
    try {
      out.push_back(c());
    } catch (const std::exception& e) {
      out.push_back({"check raised", false, e.what()});
    }
  }
  return out;
}

}  // namespace quadri::tools
