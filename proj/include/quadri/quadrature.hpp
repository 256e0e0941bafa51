// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace quadri {

using Complex = std::complex<double>;

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre(int n);

/// Composite Gauss-Legendre rule on [a, b]: the interval is cut at the given
/// interior breakpoints and each piece is split into panels of width at most
/// max_panel, each carrying an `order`-point rule.
QuadratureRule composite_rule(double a, double b, const std::vector<double>& breakpoints, double max_panel, int order = 16);

struct AdaptiveResult {
  Complex value;
  double error_estimate = 0;
  std::int64_t panels = 0;
};

/// Adaptive 7/15-point Gauss-Kronrod integration of a complex integrand.
/// The initial partition uses panels no wider than initial_width; panels whose
/// Kronrod-Gauss difference exceeds their share of abs_tol are bisected.
/// Throws QuadratureNotConverged when max_panels is exhausted.
AdaptiveResult integrate_adaptive(const std::function<Complex(double)>& f, double a, double b, double abs_tol,
                                  double initial_width, std::int64_t max_panels = 2'000'000);

/// Dense complex matrix in split real/imaginary storage, row-major.
struct SplitMatrix {
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::vector<double> re;
  std::vector<double> im;

  SplitMatrix() = default;
  SplitMatrix(std::int64_t r, std::int64_t c)
      : rows(r), cols(c), re(static_cast<std::size_t>(r * c), 0.0), im(static_cast<std::size_t>(r * c), 0.0) {}
  Complex at(std::int64_t i, std::int64_t j) const { return {re[i * cols + j], im[i * cols + j]}; }
  void set(std::int64_t i, std::int64_t j, Complex z) {
    re[i * cols + j] = z.real();
    im[i * cols + j] = z.imag();
  }
};

/// C = A * B, parallel over rows of A.
SplitMatrix multiply(const SplitMatrix& a, const SplitMatrix& b);

}  // namespace quadri
