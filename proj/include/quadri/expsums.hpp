// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "quadri/quadrature.hpp"

namespace quadri {

/// Fractional part reduced to [-1/2, 1/2).
double reduce_centered(double x);
/// Distance to the nearest integer.
double circle_norm(double x);
/// frac(alpha * n) in [0, 1) with the rounding error of the product recovered,
/// so |n| up to 2^53 keeps full fractional precision.
double frac_product(double alpha, std::int64_t n);

/// e(x) = exp(2 pi i x).
inline Complex unit_phase(double x) {
  double s, c;
  ::sincos(2.0 * std::numbers::pi * x, &s, &c);
  return {c, s};
}

/// A point of the two-torus, stored in [-1/2, 1/2)^2.
struct FrequencyPoint {
  double alpha1 = 0;
  double alpha2 = 0;

  FrequencyPoint() = default;
  FrequencyPoint(double a1, double a2) : alpha1(reduce_centered(a1)), alpha2(reduce_centered(a2)) {}
};

/// (a1/q, a2/q) with numerators normalized to 1..q.
struct RationalPoint {
  std::int64_t a1 = 1;
  std::int64_t a2 = 1;
  std::int64_t q = 1;

  RationalPoint() = default;
  RationalPoint(std::int64_t num1, std::int64_t num2, std::int64_t denom);
  /// gcd(a1, a2, q).
  std::int64_t content() const;
  FrequencyPoint to_frequency() const {
    return {static_cast<double>(a1) / static_cast<double>(q), static_cast<double>(a2) / static_cast<double>(q)};
  }
};

/// Cutoff scale. `separation_warning` is raised when 64 Q^52 > N, i.e. when
/// distinct major boxes may overlap.
struct CutoffParams {
  std::int64_t Q = 1;
  std::int64_t N = 1;

  CutoffParams(std::int64_t q, std::int64_t n);
  bool separation_warning() const;
};

/// Sum of g(n) e(alpha2 n^2 + alpha1 n) over n = 1..g.size().
Complex weighted_quad_sum(std::span<const Complex> g, FrequencyPoint alpha);
/// Same at a rational point, with phases reduced exactly mod q.
Complex weighted_quad_sum(std::span<const Complex> g, const RationalPoint& alpha);
/// Unweighted case g = 1 on {1..N}.
Complex quad_sum(std::int64_t N, FrequencyPoint alpha);

/// V(q, a) = sum_{r=1}^{q} e_q(a2 r^2 + a1 r).
Complex complete_gauss_sum(std::int64_t q, std::int64_t a1, std::int64_t a2);

/// All V(q, a1, a2) for one q, indexed by residues. Built once per q and cached
/// for q up to kGaussCacheLimit.
class GaussSumTable {
 public:
  explicit GaussSumTable(std::int64_t q);
  std::int64_t q() const { return q_; }
  Complex at(std::int64_t a1, std::int64_t a2) const {
    auto i = mod(a1), j = mod(a2);
    return values_[static_cast<std::size_t>(i * q_ + j)];
  }

 private:
  std::int64_t mod(std::int64_t a) const {
    a %= q_;
    return a < 0 ? a + q_ : a;
  }
  std::int64_t q_;
  std::vector<Complex> values_;
};

inline constexpr std::int64_t kGaussCacheLimit = 512;
/// Cached table for q <= kGaussCacheLimit, freshly built above it. Thread safe.
std::shared_ptr<const GaussSumTable> gauss_table(std::int64_t q);

/// v(alpha) = integral_0^N e(alpha2 t^2 + alpha1 t) dt for real (unreduced)
/// alpha. Absolute tolerance defaults to 1e-8 N.
Complex continuous_v(double alpha1, double alpha2, double N, double tol = -1);
/// Normalized phi(b1, b2) = integral_0^1 e(b2 s^2 + b1 s) ds, so
/// v(alpha) = N phi(alpha1 N, alpha2 N^2).
Complex phi_integral(double b1, double b2, double tol = 1e-10);
/// phi on the tensor grid b1s x b2s via a Gauss-Legendre rule in s evaluated as
/// one matrix product. Row index runs over b1s.
SplitMatrix phi_grid(std::span<const double> b1s, std::span<const double> b2s);

/// L_M(alpha) = sum_{n=1}^{M} e(alpha n).
Complex linear_sum(std::int64_t M, double alpha);

/// Lambda(x) = max(1 - |x|, 0).
inline double tent(double x) {
  double t = 1.0 - std::abs(x);
  return t > 0 ? t : 0.0;
}
/// psi_P(x) = 2 Lambda(x / 2P) - Lambda(x / P): 1 on [-P, P], 0 off [-2P, 2P].
inline double psi_1d(double x, double P) { return 2.0 * tent(x / (2.0 * P)) - tent(x / P); }
/// psi(alpha) = psi_{Q/N}(alpha1) psi_{Q^2/N^2}(alpha2) on reduced coordinates.
double cutoff_psi(FrequencyPoint alpha, const CutoffParams& params);

/// G_{m1}(q, a) = sum over r1, r2 mod q of e_q(a F2(r) + a F1(r)) with
/// F2 = 2r1^2 + 2r1r2 + 2r2^2 and F1 = -2 m1 (r1 + r2) + m1^2.
Complex gauss_sum_G(std::int64_t q, std::int64_t a, std::int64_t m1);

std::int64_t gcd3(std::int64_t a, std::int64_t b, std::int64_t c);
std::int64_t floor_mod(std::int64_t a, std::int64_t q);
/// Root of unity table e(k/q), k = 0..q-1.
std::vector<Complex> roots_of_unity(std::int64_t q);

}  // namespace quadri
