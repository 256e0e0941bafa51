// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quadri/count.hpp"
#include "quadri/expsums.hpp"
#include "quadri/systems.hpp"

namespace quadri {

// ---- arcs -----------------------------------------------------------------

/// Result of classifying alpha against the boxes |alpha_i - a_i/q| <= Q^i/N^i
/// with q <= Q and gcd(a1, a2, q) = 1. When several boxes contain alpha the
/// smallest q (then smallest a) is reported and `ambiguous` is set.
struct ArcClass {
  bool major = false;
  RationalPoint centre;
  int candidates = 0;
  bool ambiguous = false;
};

/// Throws AmbiguousArc only if boxes overlap although 64 Q^52 <= N.
ArcClass classify_arc(FrequencyPoint alpha, std::int64_t Q, std::int64_t N);

/// Exhaustive pairwise check that distinct major boxes do not meet. Q <= 16.
bool major_boxes_disjoint(std::int64_t Q, std::int64_t N);

struct MajorArcApprox {
  Complex approx;  // q^-1 V(q, a) v(beta)
  Complex actual;  // V(alpha) summed directly
  double bound = 0;  // q (1 + |beta1| N + |beta2| N^2)
  RationalPoint centre;
  double beta1 = 0, beta2 = 0;
};

/// Approximation at an explicit centre a/q.
MajorArcApprox major_arc_approx_at(FrequencyPoint alpha, const RationalPoint& centre, std::int64_t N);
/// Classifies first; throws NotMajorArc on minor arcs.
MajorArcApprox major_arc_approx_error(FrequencyPoint alpha, std::int64_t Q, std::int64_t N);

struct MinorArcSup {
  double sup = 0;  // largest |V(alpha)| seen on the minor arcs
  FrequencyPoint argmax;
  std::int64_t minor_samples = 0;
  std::int64_t major_samples = 0;
};

/// Random sampling of |V(alpha)| over minor-arc points of T^2.
MinorArcSup minor_arc_sup(std::int64_t N, std::int64_t Q, std::int64_t samples, std::uint64_t seed);

// ---- local densities ------------------------------------------------------

enum class ModCountMethod { CharacterSum, Dynamic };

/// Number of x in (Z/q)^s solving both congruences. The character-sum route
/// uses cached Gauss sums; the dynamic route convolves residue-pair counts.
Count count_solutions_mod(const DiagonalSystem& sys, std::int64_t q, ModCountMethod method = ModCountMethod::Dynamic);

/// V(q) = q^-s sum over a mod q with gcd(a1, a2, q) = 1 of prod_i V(q, lambda_i a).
Complex singular_series_term(const DiagonalSystem& sys, std::int64_t q);

struct SingularSeries {
  double value = 0;
  double tail_proxy = 0;   // |S(Q) - S(floor(Q/2))|
  double imag_residue = 0;
  std::vector<double> terms;  // real parts of V(q), index q (terms[0] unused)
};

/// Truncated series over q <= Q. Throws ImaginaryResidue if |Im| > 1e-8.
SingularSeries singular_series(const DiagonalSystem& sys, std::int64_t Q);

struct LocalFactor {
  std::int64_t p = 0;
  std::vector<double> values;  // p^{(2-s)k} S(p^k), k = 0..k_max
  int u = -1;                  // first k >= 1 with |values[k] - values[k-1]| <= tol, -1 if none
  bool stabilized = false;     // last step within tol
  double estimate() const { return values.back(); }
};

/// Throws NotStabilized when `require_stable` is set and the last step moves
/// by more than tol.
LocalFactor local_factor(const DiagonalSystem& sys, std::int64_t p, int k_max, double tol = 1e-2,
                         bool require_stable = false);

/// Product over primes p <= P of the local factor at k = floor(log_p(depth)),
/// i.e. each factor resolved to the prime powers the truncated series sees.
double euler_product(const DiagonalSystem& sys, std::int64_t P, std::int64_t depth);

// ---- p-adic and real solutions -------------------------------------------

struct PadicSolution {
  std::int64_t p = 0;
  int k = 0;
  std::int64_t modulus = 1;        // p^k
  std::vector<std::int64_t> x;     // residues in [0, p^k)
  bool jacobian_unit = false;      // Delta_0 not divisible by p
  int delta_valuation = 0;         // v_p(Delta_0)
  std::pair<std::size_t, std::size_t> pair{0, 1};
};

/// Newton lifting of a seed solving both congruences to sufficient p-adic
/// precision, re-solving the coordinates in `pair`. Throws SingularPoint when
/// x_i = x_j mod p and HypothesisFails when v_p(F(x0)) <= 2 v_p(Delta_0).
PadicSolution hensel_lift(const DiagonalSystem& sys, std::int64_t p, std::span<const std::int64_t> x0, int k,
                          std::pair<std::size_t, std::size_t> pair = {0, 1});

/// Seeds mod p^u (u = 1, 2, ... up to u_max) satisfying the lifting
/// hypothesis for `pair`, found by exhaustive search with the first free
/// coordinate fixed to 0. Returns up to max_seeds seeds at the smallest u that
/// has any; throws NotFound if none exist within the budget.
std::vector<PadicSolution> padic_seeds(const DiagonalSystem& sys, std::int64_t p, std::size_t max_seeds,
                                       std::pair<std::size_t, std::size_t> pair = {0, 1}, int u_max = -1,
                                       std::int64_t budget = 50'000'000);
PadicSolution find_nonsingular_padic(const DiagonalSystem& sys, std::int64_t p,
                                     std::pair<std::size_t, std::size_t> pair = {0, 1});

/// Explicit real solution with two unequal coordinates, built by perturbing
/// the constant vector 1 along the first two positive and the first two
/// negative coefficients.
std::vector<double> find_nonsingular_real(const DiagonalSystem& sys);

// ---- singular integral and prediction -------------------------------------

enum class IntegralMethod { MonteCarlo, Quadrature, Fejer };

struct IntegralOptions {
  IntegralMethod method = IntegralMethod::MonteCarlo;
  std::int64_t samples = 1'000'000;  // Monte Carlo budget
  std::uint64_t seed = 1;
  double box = 20.0;                  // quadrature half-width in normalized frequency
  double fejer_width = 20.0;          // smoothing scale for the Fejer diagnostic
};

struct SingularIntegral {
  double value = 0;  // J / N^{s-3}
  double error = 0;  // standard error (Monte Carlo) or |J(B) - J(B/2)| (quadrature)
  IntegralMethod method = IntegralMethod::MonteCarlo;
  std::int64_t samples = 0;
};

SingularIntegral singular_integral(const DiagonalSystem& sys, const IntegralOptions& options = {});

struct Prediction {
  double prediction = 0;
  double error = 0;
  SingularSeries series;
  SingularIntegral integral;
};

/// S(Q) J N^{s-3}.
Prediction predict_Z(const DiagonalSystem& sys, std::int64_t N, std::int64_t Q, const IntegralOptions& options = {});

/// Same from precomputed components.
Prediction predict_Z(const DiagonalSystem& sys, std::int64_t N, const SingularSeries& series,
                     const SingularIntegral& integral);

bool is_prime(std::int64_t n);
int p_valuation(__int128 n, std::int64_t p);

}  // namespace quadri
