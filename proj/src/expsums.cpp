// SPDX-License-Identifier: Apache-2.0
#include "quadri/expsums.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>

#include "quadri/error.hpp"
#include "quadri/parallel.hpp"

namespace quadri {

double reduce_centered(double x) {
  double r = x - std::floor(x + 0.5);
  return r >= 0.5 ? r - 1.0 : r;
}

double circle_norm(double x) { return std::abs(reduce_centered(x)); }

double frac_product(double alpha, std::int64_t n) {
  const double nd = static_cast<double>(n);
  const double p = alpha * nd;
  const double e = std::fma(alpha, nd, -p);  // alpha*n = p + e exactly
  double f = p - std::floor(p);
  f += e;
  f -= std::floor(f);
  return f >= 1.0 ? 0.0 : f;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t q) {
  std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

std::int64_t gcd3(std::int64_t a, std::int64_t b, std::int64_t c) { return std::gcd(std::gcd(a, b), c); }

std::vector<Complex> roots_of_unity(std::int64_t q) {
  std::vector<Complex> roots(static_cast<std::size_t>(q));
  for (std::int64_t k = 0; k < q; ++k) {
    // Use the nearer of k/q and k/q - 1 so the argument stays small.
    double x = static_cast<double>(2 * k <= q ? k : k - q) / static_cast<double>(q);
    roots[static_cast<std::size_t>(k)] = unit_phase(x);
  }
  return roots;
}

RationalPoint::RationalPoint(std::int64_t num1, std::int64_t num2, std::int64_t denom) {
  if (denom < 1) fail(ErrorCode::InvalidArgument, "denominator must be positive");
  q = denom;
  a1 = floor_mod(num1, denom);
  a2 = floor_mod(num2, denom);
  if (a1 == 0) a1 = q;
  if (a2 == 0) a2 = q;
}

std::int64_t RationalPoint::content() const { return gcd3(a1, a2, q); }

CutoffParams::CutoffParams(std::int64_t q, std::int64_t n) : Q(q), N(n) {
  if (Q < 1 || N < 1) fail(ErrorCode::InvalidArgument, "cutoff parameters must be positive");
}

bool CutoffParams::separation_warning() const {
  return std::log(64.0L) + 52.0L * std::log(static_cast<long double>(Q)) > std::log(static_cast<long double>(N));
}

namespace {
void check_weights(std::span<const Complex> g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i]) > 1.0 + 1e-12)
      fail(ErrorCode::WeightOutOfRange, "|g(" + std::to_string(i + 1) + ")| exceeds 1");
}
}  // namespace

Complex weighted_quad_sum(std::span<const Complex> g, FrequencyPoint alpha) {
  check_weights(g);
  Complex total = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == Complex{}) continue;
    auto n = static_cast<std::int64_t>(i + 1);
    double phase = frac_product(alpha.alpha2, n * n) + frac_product(alpha.alpha1, n);
    total += g[i] * unit_phase(phase);
  }
  return total;
}

Complex weighted_quad_sum(std::span<const Complex> g, const RationalPoint& alpha) {
  check_weights(g);
  const std::int64_t q = alpha.q;
  std::vector<Complex> roots = roots_of_unity(q);
  Complex total = 0;
  std::int64_t r = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    r = r + 1 == q ? 0 : r + 1;  // r = (i + 1) mod q
    if (g[i] == Complex{}) continue;
    auto k = static_cast<std::int64_t>((static_cast<__int128>(alpha.a2) * r * r + static_cast<__int128>(alpha.a1) * r) % q);
    total += g[i] * roots[static_cast<std::size_t>(k)];
  }
  return total;
}

Complex quad_sum(std::int64_t N, FrequencyPoint alpha) {
  Complex total = 0;
  for (std::int64_t n = 1; n <= N; ++n) total += unit_phase(frac_product(alpha.alpha2, n * n) + frac_product(alpha.alpha1, n));
  return total;
}

Complex complete_gauss_sum(std::int64_t q, std::int64_t a1, std::int64_t a2) {
  if (q < 1) fail(ErrorCode::InvalidArgument, "modulus must be positive");
  std::vector<Complex> roots = roots_of_unity(q);
  a1 = floor_mod(a1, q);
  a2 = floor_mod(a2, q);
  // idx(r) = a2 r^2 + a1 r mod q, advanced by first differences.
  std::int64_t idx = 0;
  std::int64_t step = floor_mod(a2 + a1, q);
  const std::int64_t step_inc = floor_mod(2 * a2, q);
  Complex total = 0;
  for (std::int64_t r = 1; r <= q; ++r) {
    idx += step;
    if (idx >= q) idx -= q;
    step += step_inc;
    if (step >= q) step -= q;
    total += roots[static_cast<std::size_t>(idx)];
  }
  return total;
}

GaussSumTable::GaussSumTable(std::int64_t q) : q_(q), values_(static_cast<std::size_t>(q * q)) {
  if (q < 1) fail(ErrorCode::InvalidArgument, "modulus must be positive");
  std::vector<Complex> roots = roots_of_unity(q);
  std::vector<double> root_re(static_cast<std::size_t>(q)), root_im(static_cast<std::size_t>(q));
  for (std::int64_t k = 0; k < q; ++k) {
    root_re[static_cast<std::size_t>(k)] = roots[static_cast<std::size_t>(k)].real();
    root_im[static_cast<std::size_t>(k)] = roots[static_cast<std::size_t>(k)].imag();
  }
  parallel_for(q, [&](std::int64_t a2) {
    std::vector<double> acc_re(static_cast<std::size_t>(q), 0.0), acc_im(static_cast<std::size_t>(q), 0.0);
    for (std::int64_t r = 0; r < q; ++r) {
      std::int64_t idx = static_cast<std::int64_t>((static_cast<__int128>(a2) * r * r) % q);
      for (std::int64_t a1 = 0; a1 < q; ++a1) {
        acc_re[static_cast<std::size_t>(a1)] += root_re[static_cast<std::size_t>(idx)];
        acc_im[static_cast<std::size_t>(a1)] += root_im[static_cast<std::size_t>(idx)];
        idx += r;
        if (idx >= q) idx -= q;
      }
    }
    for (std::int64_t a1 = 0; a1 < q; ++a1)
      values_[static_cast<std::size_t>(a1 * q + a2)] = {acc_re[static_cast<std::size_t>(a1)], acc_im[static_cast<std::size_t>(a1)]};
  });
}

std::shared_ptr<const GaussSumTable> gauss_table(std::int64_t q) {
  if (q > kGaussCacheLimit) return std::make_shared<const GaussSumTable>(q);
  static std::mutex mutex;
  static std::map<std::int64_t, std::shared_ptr<const GaussSumTable>> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(q);
    if (it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const GaussSumTable>(q);
  std::lock_guard lock(mutex);
  return cache.emplace(q, table).first->second;
}

namespace {
double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - (std::numbers::pi * x) * (std::numbers::pi * x) / 6.0;
  return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}
}  // namespace

Complex phi_integral(double b1, double b2, double tol) {
  if (b2 == 0.0) return unit_phase(0.5 * b1) * sinc(b1);
  const double fmax = std::max({std::abs(b1), std::abs(b1 + 2.0 * b2), 1.0});
  auto f = [b1, b2](double s) { return unit_phase(b2 * s * s + b1 * s); };
  return integrate_adaptive(f, 0.0, 1.0, tol, 0.25 / fmax).value;
}

Complex continuous_v(double alpha1, double alpha2, double N, double tol) {
  if (N <= 0) return 0;
  if (tol <= 0) tol = 1e-8 * N;
  return N * phi_integral(alpha1 * N, alpha2 * N * N, tol / N);
}

SplitMatrix phi_grid(std::span<const double> b1s, std::span<const double> b2s) {
  double r1 = 0, r2 = 0;
  for (double b : b1s) r1 = std::max(r1, std::abs(b));
  for (double b : b2s) r2 = std::max(r2, std::abs(b));
  const double rate = r1 + 2.0 * r2 + 1.0;
  QuadratureRule rule = composite_rule(0.0, 1.0, {}, std::min(0.25, 1.5 / rate), 16);
  const auto K = static_cast<std::int64_t>(rule.nodes.size());
  SplitMatrix left(static_cast<std::int64_t>(b1s.size()), K);
  SplitMatrix right(K, static_cast<std::int64_t>(b2s.size()));
  for (std::size_t i = 0; i < b1s.size(); ++i)
    for (std::int64_t k = 0; k < K; ++k)
      left.set(static_cast<std::int64_t>(i), k, rule.weights[static_cast<std::size_t>(k)] * unit_phase(b1s[i] * rule.nodes[static_cast<std::size_t>(k)]));
  for (std::int64_t k = 0; k < K; ++k) {
    double s = rule.nodes[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < b2s.size(); ++j) right.set(k, static_cast<std::int64_t>(j), unit_phase(b2s[j] * s * s));
  }
  return multiply(left, right);
}

Complex linear_sum(std::int64_t M, double alpha) {
  if (M <= 0) return 0;
  const double a = reduce_centered(alpha);
  const double half = 0.5 * a;
  Complex centre = unit_phase(frac_product(half, M + 1));
  if (std::abs(a) <= 1e-12) {
    double md = static_cast<double>(M);
    double x = std::numbers::pi * a;
    return centre * (md - x * x * md * (md * md - 1.0) / 6.0);
  }
  // sin(pi M a) from M a reduced mod 2.
  double y = 2.0 * frac_product(half, M);
  return centre * (std::sin(std::numbers::pi * y) / std::sin(std::numbers::pi * a));
}

double cutoff_psi(FrequencyPoint alpha, const CutoffParams& params) {
  const double P1 = static_cast<double>(params.Q) / static_cast<double>(params.N);
  const double P2 = P1 * P1;
  return psi_1d(alpha.alpha1, P1) * psi_1d(alpha.alpha2, P2);
}

Complex gauss_sum_G(std::int64_t q, std::int64_t a, std::int64_t m1) {
  if (q < 1) fail(ErrorCode::InvalidArgument, "modulus must be positive");
  std::vector<Complex> roots = roots_of_unity(q);
  const __int128 am = a;
  Complex total = 0;
  for (std::int64_t r1 = 0; r1 < q; ++r1)
    for (std::int64_t r2 = 0; r2 < q; ++r2) {
      __int128 f2 = 2 * static_cast<__int128>(r1) * r1 + 2 * static_cast<__int128>(r1) * r2 + 2 * static_cast<__int128>(r2) * r2;
      __int128 f1 = -2 * static_cast<__int128>(m1) * (r1 + r2) + static_cast<__int128>(m1) * m1;
      __int128 k = (am * ((f2 + f1) % q)) % q;
      if (k < 0) k += q;
      total += roots[static_cast<std::size_t>(k)];
    }
  return total;
}

}  // namespace quadri
