// SPDX-License-Identifier: Apache-2.0
// Acceptance runner: one PASS/FAIL line per criterion. With an argument k only
// criterion k runs. Oracles are computed here independently of the library
// wherever the criterion names one.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "quadri/circle.hpp"
#include "quadri/error.hpp"
#include "quadri/expsums.hpp"
#include "quadri/increment.hpp"
#include "quadri/represent.hpp"
#include "quadri/restriction.hpp"
#include "quadri/systems.hpp"

using namespace quadri;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

Complex e_rat(std::int64_t num, std::int64_t q) {
  const std::int64_t r = ((num % q) + q) % q;
  const double t = kTwoPi * static_cast<double>(r) / static_cast<double>(q);
  return {std::cos(t), std::sin(t)};
}

// 1. DP count against brute force over N^7 tuples.
Verdict exact_counts() {
  const DiagonalSystem sys = reference_system();
  std::ostringstream out;
  bool ok = true;
  for (std::int64_t N : {2, 3, 4}) {
    std::int64_t brute = 0;
    std::vector<std::int64_t> x(7, 1);
    for (;;) {
      std::int64_t lin = 0, quad = 0;
      for (int i = 0; i < 7; ++i) {
        lin += sys.lambda(i) * x[i];
        quad += sys.lambda(i) * x[i] * x[i];
      }
      if (lin == 0 && quad == 0) ++brute;
      int i = 0;
      while (i < 7 && ++x[i] > N) x[i++] = 1;
      if (i == 7) break;
    }
    const Count dp = count_solutions(sys, N);
    out << "N=" << N << " dp=" << to_string(dp) << " brute=" << brute << "; ";
    ok &= dp == static_cast<Count>(brute);
  }
  return {ok, out.str()};
}

// 2. Total mass of R.
Verdict representation_mass() {
  std::ostringstream out;
  bool ok = true;
  for (std::int64_t N : {10, 100, 500}) {
    const RepresentationTable t = build_representation_table(N);
    Count sum = 0;
    t.for_each_nonzero([&](std::int64_t, std::int64_t, std::uint32_t c) { sum += c; });
    const Count cube = static_cast<Count>(N) * N * N;
    out << "N=" << N << " sum=" << to_string(sum) << "; ";
    ok &= sum == cube && t.total() == cube;
  }
  return {ok, out.str()};
}

// Independent second moment: histogram of all triples.
Count second_moment_oracle(std::int64_t N) {
  std::unordered_map<std::int64_t, std::uint32_t> hist;
  hist.reserve(static_cast<std::size_t>(N * N * N / 2));
  const std::int64_t stride = 3 * N * N + 1;
  for (std::int64_t a = 1; a <= N; ++a)
    for (std::int64_t b = 1; b <= N; ++b)
      for (std::int64_t c = 1; c <= N; ++c) ++hist[(a + b + c) * stride + a * a + b * b + c * c];
  Count total = 0;
  for (const auto& [k, v] : hist) total += static_cast<Count>(v) * v;
  return total;
}

// 3. Second moment of R against 18/pi^2 N^3 log N.
Verdict second_moment() {
  const double target = 18.0 / (3.14159265358979323846 * 3.14159265358979323846);
  double ratio[2];
  std::ostringstream out;
  bool ok = true;
  int i = 0;
  for (std::int64_t N : {100, 500}) {
    const Count m2 = moment_sum(build_representation_table(N), 2);
    if (N == 100) {
      const Count oracle = second_moment_oracle(N);
      ok &= oracle == m2;
      out << "N=100 oracle " << (oracle == m2 ? "agrees" : "DISAGREES") << "; ";
    }
    const double n = static_cast<double>(N);
    ratio[i++] = to_double(m2) / (n * n * n * std::log(n));
    out << "N=" << N << " ratio=" << fmt("%.5f", ratio[i - 1]) << "; ";
  }
  ok &= ratio[1] >= 0.6 * 1.824 && ratio[1] <= 1.4 * 1.824;
  ok &= std::abs(ratio[1] - target) < std::abs(ratio[0] - target);
  return {ok, out.str()};
}

// 4. Complete Gauss sums, checked against direct summation at sampled points.
Verdict gauss_bound() {
  double worst = 0;
  std::int64_t worst_q = 0;
  bool spot_ok = true;
  std::mt19937_64 rng(4);
  for (std::int64_t q = 1; q <= 300; ++q) {
    const GaussSumTable table(q);
    for (std::int64_t a1 = 0; a1 < q; ++a1)
      for (std::int64_t a2 = 0; a2 < q; ++a2) {
        if (std::gcd(std::gcd(a1, a2), q) != 1) continue;
        const double r = std::abs(table.at(a1, a2)) / std::sqrt(static_cast<double>(q));
        if (r > worst) {
          worst = r;
          worst_q = q;
        }
      }
    for (int s = 0; s < 3; ++s) {
      const auto a1 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q));
      const auto a2 = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q));
      Complex direct = 0;
      for (std::int64_t r = 1; r <= q; ++r) direct += e_rat(a2 * r * r + a1 * r, q);
      spot_ok &= std::abs(direct - table.at(a1, a2)) <= 1e-9 * std::max(1.0, std::abs(direct));
    }
  }
  return {worst <= 3.0 && spot_ok,
          "max |V|/sqrt(q) = " + fmt("%.6f", worst) + " at q=" + std::to_string(worst_q) + (spot_ok ? "" : "; spot check failed")};
}

// 5. Transform identity with both sides summed directly here.
Verdict transform_identity() {
  std::mt19937_64 rng(5);
  double worst = 0;
  bool lib_ok = true;
  for (std::int64_t q = 1; q <= 40; ++q) {
    std::vector<Complex> V(static_cast<std::size_t>(q * q));
    for (std::int64_t a1 = 0; a1 < q; ++a1)
      for (std::int64_t a2 = 0; a2 < q; ++a2) {
        Complex s = 0;
        for (std::int64_t r = 1; r <= q; ++r) s += e_rat(a2 * r * r + a1 * r, q);
        V[static_cast<std::size_t>(a1 * q + a2)] = s;
      }
    for (int t = 0; t < 10; ++t) {
      const auto m1 = static_cast<std::int64_t>(rng() % 1000) + 1, m2 = static_cast<std::int64_t>(rng() % 100000) + 1;
      Complex lhs = 0, rhs = 0;
      double scale = 0;
      for (std::int64_t a1 = 0; a1 < q; ++a1)
        for (std::int64_t a2 = 0; a2 < q; ++a2) {
          if (std::gcd(std::gcd(a1, a2), q) != 1) continue;
          const Complex v = V[static_cast<std::size_t>(a1 * q + a2)];
          lhs += v * v * v * e_rat(-(a1 * (m1 % q) + a2 * (m2 % q)), q);
          scale += std::pow(std::abs(v), 3);
        }
      for (std::int64_t a = 0; a < q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        Complex G = 0;
        for (std::int64_t r1 = 1; r1 <= q; ++r1)
          for (std::int64_t r2 = 1; r2 <= q; ++r2) {
            const std::int64_t F2 = 2 * r1 * r1 + 2 * r1 * r2 + 2 * r2 * r2;
            const std::int64_t F1 = -2 * (m1 % q) * (r1 + r2) + (m1 % q) * (m1 % q);
            G += e_rat(a * ((F2 + F1) % q), q);
          }
        rhs += G * e_rat(-a * (m2 % q), q);
      }
      rhs *= static_cast<double>(q);
      // Relative to the size of the summands: individual totals can vanish.
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), scale * 1e-3));
      const double q3 = static_cast<double>(q * q * q);
      lib_ok &= std::abs(arithmetic_factor(q, m1, m2) - lhs / q3) <= 1e-9 * std::max(1.0, scale / q3);
      lib_ok &= std::abs(arithmetic_factor_transform(q, m1, m2) - lhs / q3) <= 1e-9 * std::max(1.0, scale / q3);
    }
  }
  return {worst <= 1e-6 && lib_ok, "max relative gap " + fmt("%.3g", worst) + (lib_ok ? "; library agrees" : "; library DISAGREES")};
}

// 6. Analytic factor bounded by the doubled-resolution maximum.
Verdict analytic_bound() {
  const std::int64_t N = 64, Q = 4;
  const AnalyticFactor base(N, Q, 3 * N, 3 * N * N, 1);
  const AnalyticFactor fine(N, Q, 3 * N, 3 * N * N, 2);
  std::mt19937_64 rng(6);
  double max_base = 0, max_fine = 0, max_gap = 0;
  for (int i = 0; i < 200; ++i) {
    const auto m1 = static_cast<std::int64_t>(rng() % (3 * N)) + 1;
    const auto m2 = static_cast<std::int64_t>(rng() % (3 * N * N)) + 1;
    const double b = base.at(m1, m2), f = fine.at(m1, m2);
    max_base = std::max(max_base, std::abs(b));
    max_fine = std::max(max_fine, std::abs(f));
    max_gap = std::max(max_gap, std::abs(b - f));
  }
  const double C = 1.1 * max_fine;
  return {max_base <= C && max_gap <= 1e-6,
          "max |A| = " + fmt("%.6f", max_base) + ", C = " + fmt("%.6f", C) + ", max resolution gap " + fmt("%.2g", max_gap)};
}

// Exact integral of |V|^8 for g = 1: sum over m of r_4(m)^2.
double eighth_moment_oracle(std::int64_t N) {
  const std::int64_t W = 4 * N * N + 1;
  std::vector<std::uint32_t> hist(static_cast<std::size_t>((4 * N + 1) * W), 0);
  for (std::int64_t a = 1; a <= N; ++a)
    for (std::int64_t b = 1; b <= N; ++b)
      for (std::int64_t c = 1; c <= N; ++c)
        for (std::int64_t d = 1; d <= N; ++d) ++hist[static_cast<std::size_t>((a + b + c + d) * W + a * a + b * b + c * c + d * d)];
  double total = 0;
  for (std::uint32_t h : hist) total += static_cast<double>(h) * h;
  return total;
}

// 7. Restriction scaling and the p = 8 lattice identity.
Verdict restriction_scaling() {
  std::ostringstream out;
  bool ok = true;
  double worst_spread = 0;
  for (int seed = 1; seed <= 5; ++seed) {
    double lo = 1e300, hi = 0;
    for (std::int64_t N : {16, 24, 32, 48}) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(1000 * seed + N));
      std::vector<Complex> g(static_cast<std::size_t>(N));
      for (auto& x : g) x = (rng() & 1) ? 1.0 : -1.0;
      const LpMoment m = lp_moment(g, 7.0);
      const double r = m.moment / std::pow(static_cast<double>(N), 4);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    worst_spread = std::max(worst_spread, hi / lo);
  }
  ok &= worst_spread <= 4;
  out << "p=7 worst max/min " << fmt("%.3f", worst_spread) << "; ";
  for (std::int64_t N : {16, 32}) {
    std::vector<Complex> g(static_cast<std::size_t>(N), 1.0);
    const LpMoment m = lp_moment(g, 8.0);
    const double exact = eighth_moment_oracle(N);
    const double rel = std::abs(m.moment - exact) / exact;
    ok &= rel <= 0.01;
    out << "p=8 N=" << N << " rel err " << fmt("%.2e", rel) << "; ";
  }
  return {ok, out.str()};
}

// 8. Toy inequality on random instances.
Verdict toy_inequality() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double ps[3] = {3.0, 4.0, 3.5};
  double worst = 0;
  int violations = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const bool two_d = inst % 2 == 1;
    const std::int64_t n1 = two_d ? 2 + static_cast<std::int64_t>(rng() % 15) : 2 + static_cast<std::int64_t>(rng() % 63);
    const std::int64_t n2 = two_d ? 2 + static_cast<std::int64_t>(rng() % 15) : 1;
    const double p = ps[inst % 3];
    const auto size = static_cast<std::size_t>(n1 * n2);
    std::vector<double> omega(size);
    std::vector<Complex> f(size);
    for (std::size_t c = 0; c < size; ++c) {
      omega[c] = 0.05 + u(rng);
      f[c] = std::polar(u(rng), kTwoPi * u(rng));
    }
    const int J = 1 + static_cast<int>(rng() % 4);
    std::vector<std::vector<double>> pieces(static_cast<std::size_t>(J), std::vector<double>(size, 0.0));
    for (std::size_t c = 0; c < size; ++c) {
      std::vector<double> w(static_cast<std::size_t>(J));
      double tot = 0;
      for (auto& x : w) tot += x = u(rng) * u(rng);
      double used = 0;
      for (int j = 0; j + 1 < J; ++j) used += pieces[static_cast<std::size_t>(j)][c] = omega[c] * w[static_cast<std::size_t>(j)] / tot;
      pieces[static_cast<std::size_t>(J - 1)][c] = std::max(0.0, omega[c] - used);
    }
    const InequalitySides s = theorem4_inequality_check(n1, n2, omega, f, pieces, p);
    worst = std::max(worst, s.lhs / s.rhs);
    if (s.lhs > s.rhs * (1 + 1e-6)) ++violations;
  }
  return {violations == 0, "violations " + std::to_string(violations) + ", max lhs/rhs " + fmt("%.4f", worst)};
}

// 9. Circle-method prediction at N = 48.
Verdict circle_prediction() {
  const DiagonalSystem sys = reference_system();
  const std::int64_t N = 48;
  const SingularSeries series = singular_series(sys, 64);
  IntegralOptions opt;
  opt.samples = 1'000'000;
  opt.seed = 9;
  const SingularIntegral integral = singular_integral(sys, opt);
  const Prediction pred = predict_Z(sys, N, series, integral);
  const double exact = to_double(count_solutions(sys, N));
  const double rel = std::abs(pred.prediction - exact) / exact;
  double euler = 1.0;
  for (std::int64_t p = 2; p <= 64; ++p) {
    if (!is_prime(p)) continue;
    int k = 0;
    for (std::int64_t pk = p; pk * p <= 64; pk *= p) ++k;
    euler *= local_factor(sys, p, k + 1).estimate();
  }
  const double gap = std::abs(euler - series.value);
  std::ostringstream out;
  out << "S(64)=" << fmt("%.5f", series.value) << " J=" << fmt("%.5f", integral.value) << " prediction="
      << fmt("%.1f", pred.prediction) << " exact=" << fmt("%.0f", exact) << " rel_err=" << fmt("%.4f", rel)
      << " Euler=" << fmt("%.5f", euler) << " gap=" << fmt("%.5f", gap) << " proxy=" << fmt("%.5f", series.tail_proxy);
  return {rel <= 0.25 && series.value > 0 && gap <= series.tail_proxy && integral.samples >= 1'000'000, out.str()};
}

// 10. Hensel lifting and stabilization of local densities.
Verdict hensel() {
  const DiagonalSystem sys = reference_system();
  std::ostringstream out;
  bool ok = true;
  for (std::int64_t p : {2, 3, 5}) {
    const std::vector<PadicSolution> seeds = padic_seeds(sys, p, 5);
    ok &= seeds.size() == 5;
    std::int64_t p6 = 1;
    for (int i = 0; i < 6; ++i) p6 *= p;
    for (const PadicSolution& seed : seeds) {
      const PadicSolution lifted = hensel_lift(sys, p, seed.x, 6, seed.pair);
      __int128 lin = 0, quad = 0;
      for (std::size_t i = 0; i < 7; ++i) {
        lin += static_cast<__int128>(sys.lambda(i)) * lifted.x[i];
        quad += static_cast<__int128>(sys.lambda(i)) * lifted.x[i] * lifted.x[i];
      }
      ok &= lin % p6 == 0 && quad % p6 == 0;
      for (std::size_t i = 0; i < 7; ++i) ok &= ((lifted.x[i] - seed.x[i]) % seed.modulus) == 0;
      const PadicSolution again = hensel_lift(sys, p, lifted.x, 6, seed.pair);
      ok &= again.x == lifted.x;
    }
    int k_max = 0;
    for (std::int64_t pk = p; pk <= 256; pk *= p) ++k_max;
    const LocalFactor lf = local_factor(sys, p, k_max);
    const double last = std::abs(lf.values[static_cast<std::size_t>(k_max)] - lf.values[static_cast<std::size_t>(k_max - 1)]);
    ok &= last <= 1e-2;
    out << "p=" << p << " seeds=" << seeds.size() << " k=" << k_max << " last step " << fmt("%.2e", last) << "; ";
  }
  return {ok, out.str()};
}

SubsetWindow planted(std::int64_t N, double a1, double a2, double bias, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<char> in(static_cast<std::size_t>(N + 1));
  for (std::int64_t n = 1; n <= N; ++n) {
    const double ph = std::fmod(a2 * static_cast<double>(n % 100000) * static_cast<double>(n % 100000) + a1 * static_cast<double>(n), 1.0);
    in[static_cast<std::size_t>(n)] = u(rng) < 0.5 + bias * std::cos(kTwoPi * ph);
  }
  return SubsetWindow::from_predicate(N, [&](std::int64_t n) { return in[static_cast<std::size_t>(n)] != 0; });
}

// 11. Density increment on structured and random sets.
Verdict density_increments() {
  const double phi = (1 + std::sqrt(5.0)) / 2;
  std::vector<std::pair<std::string, SubsetWindow>> sets;
  for (std::int64_t N : {10000, 100000}) {
    const std::string tag = " N=" + std::to_string(N);
    sets.emplace_back("mod3" + tag, SubsetWindow::from_predicate(N, [](std::int64_t n) { return n % 3 == 0; }));
    sets.emplace_back("mod5 in {1,2}" + tag, SubsetWindow::from_predicate(N, [](std::int64_t n) { return n % 5 == 1 || n % 5 == 2; }));
    sets.emplace_back("squares mod 7" + tag, SubsetWindow::from_predicate(N, [](std::int64_t n) { const auto r = n * n % 7; return r == 1 || r == 2 || r == 4; }));
    sets.emplace_back("frac(phi n^2)<0.2" + tag, SubsetWindow::from_predicate(N, [&](std::int64_t n) { return frac_product(phi, n * n) < 0.2; }));
    sets.emplace_back("frac(sqrt2 n^2)<0.3" + tag, SubsetWindow::from_predicate(N, [&](std::int64_t n) { return frac_product(std::sqrt(2.0), n * n) < 0.3; }));
    sets.emplace_back("frac(n/7.3)<0.4" + tag, SubsetWindow::from_predicate(N, [&](std::int64_t n) { return frac_product(1 / 7.3, n) < 0.4; }));
    sets.emplace_back("planted rational" + tag, planted(N, 0.25, 1.0 / 3, 0.3, 11 + static_cast<std::uint64_t>(N)));
    sets.emplace_back("planted irrational" + tag, planted(N, 0.1, 0.0, 0.35, 12 + static_cast<std::uint64_t>(N)));
    sets.emplace_back("random 1/2" + tag, planted(N, 0, 0, 0, 13 + static_cast<std::uint64_t>(N)));
    sets.emplace_back("first third" + tag, SubsetWindow::from_predicate(N, [&](std::int64_t n) { return 3 * n <= N; }));
  }
  int qualifying = 0, failures = 0;
  std::ostringstream out;
  for (const auto& [name, a] : sets) {
    const SpectrumHit hit = largest_fourier_coefficient(a);
    if (hit.eta < 0.05) continue;
    ++qualifying;
    try {
      const IncrementStep step = density_increment(a, hit);
      const __int128 gain = 4 * (static_cast<__int128>(step.new_count) * step.old_size - static_cast<__int128>(step.old_count) * step.new_size);
      const bool gain_ok = static_cast<long double>(gain) >= static_cast<long double>(step.eta_used) * step.old_size * step.new_size;
      const bool count_ok = a.count_in(step.progression) == step.new_count;
      const bool length_ok = step.new_size >= static_cast<std::int64_t>(std::floor(step.eta_used * step.eta_used * std::pow(static_cast<double>(a.n_max()), 1.0 / 16) / 256));
      if (!(gain_ok && count_ok && length_ok)) {
        ++failures;
        out << name << " invariant failed; ";
      }
    } catch (const Error& e) {
      ++failures;
      out << name << ": " << e.what() << "; ";
    }
  }
  out << qualifying << " of " << sets.size() << " sets with eta >= 0.05, " << failures << " failures";
  return {failures == 0 && qualifying >= 10, out.str()};
}

// 12. Heilbronn minimizers against an independent scan.
Verdict heilbronn() {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  bool exact = true;
  for (int i = 0; i < 100; ++i) {
    const double alpha = u(rng);
    for (std::int64_t Q : {100, 1000, 10000}) {
      long double best = 1;
      for (std::int64_t q = 1; q <= Q; ++q) {
        const long double x = static_cast<long double>(alpha) * static_cast<long double>(q * q);
        best = std::min(best, std::abs(x - std::nearbyint(x)));
      }
      const HeilbronnResult r = heilbronn_approx(alpha, Q);
      exact &= std::abs(static_cast<long double>(r.value) - best) <= 1e-9L;
      worst = std::max(worst, static_cast<double>(best) * std::cbrt(static_cast<double>(Q)));
    }
  }
  return {exact && worst <= kHeilbronnConstant,
          "max value*Q^(1/3) = " + fmt("%.4f", worst) + " vs C_H = " + fmt("%.2f", kHeilbronnConstant)};
}

// 13. End-to-end loop on the full window.
Verdict roth() {
  const DiagonalSystem sys = reference_system();
  const SubsetWindow a0 = SubsetWindow::full(32);
  const RothOutcome out = roth_loop(sys, a0);
  if (!out.found) return {false, std::string("stalled: ") + std::string(stall_name(out.reason))};
  __int128 lin = 0, quad = 0;
  bool distinct = true, inside = true;
  for (std::size_t i = 0; i < 7; ++i) {
    lin += sys.lambda(i) * out.solution[i];
    quad += static_cast<__int128>(sys.lambda(i)) * out.solution[i] * out.solution[i];
    inside &= out.solution[i] >= 1 && out.solution[i] <= 32;
    for (std::size_t j = 0; j < i; ++j) distinct &= out.solution[i] != out.solution[j];
  }
  std::ostringstream s;
  s << "x = (";
  for (std::size_t i = 0; i < 7; ++i) s << (i ? "," : "") << out.solution[i];
  s << ")";
  return {lin == 0 && quad == 0 && distinct && inside, s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"exact-count oracle equivalence", exact_counts},
      {"representation mass", representation_mass},
      {"second moment of R", second_moment},
      {"Gauss-sum bound", gauss_bound},
      {"transform identity", transform_identity},
      {"analytic-factor uniform bound", analytic_bound},
      {"restriction scaling", restriction_scaling},
      {"toy restriction inequality", toy_inequality},
      {"circle-method prediction", circle_prediction},
      {"Hensel lifting", hensel},
      {"density increment", density_increments},
      {"Heilbronn bound", heilbronn},
      {"increment loop end to end", roth},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != static_cast<int>(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %-32s %s (%.1f s) %s\n", i + 1, criteria[i].first, v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
