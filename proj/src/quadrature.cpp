// SPDX-License-Identifier: Apache-2.0
#include "quadri/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "quadri/error.hpp"
#include "quadri/parallel.hpp"

namespace quadri {

const QuadratureRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  // Newton iteration on P_n from the Tricomi initial guesses.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    double w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

QuadratureRule composite_rule(double a, double b, const std::vector<double>& breakpoints, double max_panel, int order) {
  std::vector<double> cuts{a};
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  const QuadratureRule& base = gauss_legendre(order);
  QuadratureRule out;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double lo = cuts[k], hi = cuts[k + 1];
    if (hi <= lo) continue;
    auto panels = static_cast<std::int64_t>(std::ceil((hi - lo) / max_panel));
    panels = std::max<std::int64_t>(panels, 1);
    double h = (hi - lo) / static_cast<double>(panels);
    for (std::int64_t j = 0; j < panels; ++j) {
      double mid = lo + (static_cast<double>(j) + 0.5) * h;
      for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        out.nodes.push_back(mid + 0.5 * h * base.nodes[i]);
        out.weights.push_back(0.5 * h * base.weights[i]);
      }
    }
  }
  return out;
}

namespace {

// Standard 15-point Kronrod extension of the 7-point Gauss rule.
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  Complex value;
  double error;
};

Panel gk15(const std::function<Complex(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  Complex fc = f(c);
  Complex kron = fc * kWgk[7];
  Complex gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    Complex s = f(c - h * kXgk[j]) + f(c + h * kXgk[j]);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

AdaptiveResult integrate_adaptive(const std::function<Complex(double)>& f, double a, double b, double abs_tol,
                                  double initial_width, std::int64_t max_panels) {
  AdaptiveResult result;
  if (b <= a) return result;
  auto n0 = static_cast<std::int64_t>(std::ceil((b - a) / initial_width));
  n0 = std::max<std::int64_t>(n0, 1);
  if (n0 > max_panels) fail(ErrorCode::QuadratureNotConverged, "initial partition exceeds panel budget");
  std::vector<std::pair<double, double>> stack;
  double h = (b - a) / static_cast<double>(n0);
  for (std::int64_t i = n0 - 1; i >= 0; --i)
    stack.emplace_back(a + static_cast<double>(i) * h, i + 1 == n0 ? b : a + static_cast<double>(i + 1) * h);
  const double density = abs_tol / (b - a);
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    Panel p = gk15(f, lo, hi);
    ++result.panels;
    if (result.panels > max_panels)
      fail(ErrorCode::QuadratureNotConverged, "panel budget exhausted before reaching tolerance");
    double allowed = std::max(density * (hi - lo), 1e-15 * std::abs(p.value));
    if (p.error <= allowed || (hi - lo) < 1e-12 * (b - a)) {
      result.value += p.value;
      result.error_estimate += p.error;
    } else {
      double mid = 0.5 * (lo + hi);
      stack.emplace_back(mid, hi);
      stack.emplace_back(lo, mid);
    }
  }
  return result;
}

SplitMatrix multiply(const SplitMatrix& a, const SplitMatrix& b) {
  if (a.cols != b.rows) fail(ErrorCode::InvalidArgument, "matrix dimension mismatch");
  SplitMatrix c(a.rows, b.cols);
  const std::int64_t n = b.cols;
  parallel_for(a.rows, [&](std::int64_t i) {
    double* cr = c.re.data() + i * n;
    double* ci = c.im.data() + i * n;
    for (std::int64_t k = 0; k < a.cols; ++k) {
      const double ar = a.re[i * a.cols + k];
      const double ai = a.im[i * a.cols + k];
      if (ar == 0.0 && ai == 0.0) continue;
      const double* br = b.re.data() + k * n;
      const double* bi = b.im.data() + k * n;
      for (std::int64_t j = 0; j < n; ++j) {
        cr[j] += ar * br[j] - ai * bi[j];
        ci[j] += ar * bi[j] + ai * br[j];
      }
    }
  });
  return c;
}

}  // namespace quadri
