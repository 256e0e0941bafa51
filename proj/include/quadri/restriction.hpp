// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "quadri/quadrature.hpp"
#include "quadri/represent.hpp"

namespace quadri {

using Complex = std::complex<double>;

/// Oversampling factors: the grid has G1 = c1 * 3N points in alpha1 and
/// G2 = c2 * 3N^2 points in alpha2.
struct MomentGridSpec {
  int c1 = 2;
  int c2 = 2;
};

struct LpMoment {
  double moment = 0;    // estimate on the doubled grid
  double coarse = 0;    // estimate on the base grid
  double self_err = 0;  // |moment - coarse| / moment
  std::int64_t G1 = 0, G2 = 0;  // base grid sizes
};

/// Riemann-sum estimate of the integral of |V_g|^p over T^2. The doubled grid
/// is the union of four half-shifted copies of the base grid, so both
/// estimates come from one pass. Throws GridTooCoarse when self_err > 2% and
/// `certify` is set.
LpMoment lp_moment(std::span<const Complex> g, double p, MomentGridSpec grid = {}, bool certify = true);

/// Mean of |V_g|^p over the G1 x G2 grid shifted by (s1/G1, s2/G2), with
/// s1, s2 in {0, 1/2}.
double grid_power_mean(std::span<const Complex> g, double p, std::int64_t G1, std::int64_t G2, bool shift1 = false,
                       bool shift2 = false);

/// Integral over R^2 of psi(alpha) v(alpha)^3 e(-alpha . m) in scaled
/// coordinates beta = (alpha1 N, alpha2 N^2), evaluated by tensor
/// Gauss-Legendre quadrature. The value is real because psi is even and
/// v(-alpha) is the conjugate of v(alpha).
class AnalyticFactor {
 public:
  /// Rules resolve frequencies up to |m1| <= m1_reach and |m2| <= m2_reach.
  /// `resolution` multiplies the node density.
  AnalyticFactor(std::int64_t N, std::int64_t Q, std::int64_t m1_reach, std::int64_t m2_reach, int resolution = 1);

  double at(std::int64_t m1, std::int64_t m2) const;
  /// All lattice values 1 <= m1 <= m1_max, 1 <= m2 <= m2_max by two matrix products.
  LatticeTable<double> table(std::int64_t m1_max, std::int64_t m2_max) const;
  std::int64_t nodes() const { return static_cast<std::int64_t>(b1_.size() * b2_.size()); }

 private:
  std::int64_t N_, Q_;
  std::vector<double> b1_, b2_;  // nodes; b2 covers the half line beta2 >= 0
  SplitMatrix weighted_;         // w1 w2 psi phi^3 on the node grid
};

/// Single value with self-convergence check against doubled resolution;
/// throws QuadratureNotConverged if they differ by more than tol.
double analytic_factor(std::int64_t m1, std::int64_t m2, std::int64_t N, std::int64_t Q, double tol = 1e-6);

/// q^-3 sum over a mod q with gcd(a1, a2, q) = 1 of V(q, a)^3 e_q(-a . m).
Complex arithmetic_factor(std::int64_t q, std::int64_t m1, std::int64_t m2);
/// Same quantity through the one-dimensional transform:
/// q^-2 sum over a mod q with gcd(a, q) = 1 of G_{m1}(q, a) e_q(-a m2).
Complex arithmetic_factor_transform(std::int64_t q, std::int64_t m1, std::int64_t m2);

/// Dyadic scales {1, 2, 4, ..., 2^D} with D = ceil(log2 Q).
std::vector<std::int64_t> dyadic_scales(std::int64_t Q);

struct DecompositionPiece {
  std::int64_t Y = 0;  // 0 for the remainder R'
  bool remainder = false;
  std::int64_t N = 0, Q = 0;
  LatticeTable<Complex> values;  // over 1 <= m <= (3N, 3N^2)
};

struct Decomposition {
  std::int64_t N = 0, Q = 0;
  std::vector<DecompositionPiece> pieces;  // one per dyadic scale
  DecompositionPiece remainder;            // R - sum of pieces
};

/// R_Y(m) = A(m) sum_{Y <= q < 2Y} arithmetic_factor(q, m) for every scale,
/// plus R'. Requires Y <= 2Q for all scales (true by construction).
Decomposition decompose_representation(std::int64_t N, std::int64_t Q, int resolution = 1);
DecompositionPiece r_piece(std::int64_t Y, std::int64_t N, std::int64_t Q, int resolution = 1);

struct PieceNorms {
  double sup = 0;   // max |W_Y| on the grid
  double l2sq = 0;  // integral of |W_Y|^2 (grid mean; exact by Parseval)
};

/// W_Y(alpha) = sum_m R_Y(m) e(alpha . m) evaluated on the moment grid.
PieceNorms w_piece_sup_and_l2(const DecompositionPiece& piece, MomentGridSpec grid = {});

/// Sum over the lattice of |R_Y(m)|^{2k}.
double piece_moment(const DecompositionPiece& piece, int k);

struct InequalitySides {
  double lhs = 0;
  double rhs = 0;
};

/// Both sides of
///   ||W_f||_p <= (sum |f|^2 w)^{1/2} (sum_j ||W_j||_p^{(p-2)/p} ||w_j||_{2p/(p-2)}^{2/p})^{1/2}
/// on an n1 x n2 lattice (n2 = 1 for one dimension), where W_f has
/// coefficients f w and W_j has coefficients w_j. Pieces may be signed but
/// must sum to w within 1e-10, else DecompositionMismatch. Lattice sides are
/// limited to 64.
InequalitySides theorem4_inequality_check(std::int64_t n1, std::int64_t n2, std::span<const double> omega,
                                          std::span<const Complex> f, const std::vector<std::vector<double>>& pieces,
                                          double p);

struct BetaMoment {
  double value = 0;
  bool hypothesis_ok = true;  // X^{4k} <= M
};

/// sum_{m <= M} |beta(m)|^{2k}, beta(m) = sum_{q <= X} sum_{a <= q} g(a, q) e_q(-a m).
/// Throws HypothesisViolated only when `strict` is set; otherwise the flag is
/// cleared and the value still computed.
BetaMoment beta_moment_check(std::int64_t X, std::int64_t M, int k,
                             const std::function<Complex(std::int64_t, std::int64_t)>& g, bool strict = false);

}  // namespace quadri
