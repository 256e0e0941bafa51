// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "quadri/expsums.hpp"
#include "quadri/systems.hpp"

namespace quadri {

/// Measured constant in min_{q <= Q} ||alpha q^2|| <= C_H Q^{-1/3}.
inline constexpr double kHeilbronnConstant = 0.6;

struct SpectrumHit {
  FrequencyPoint alpha;
  double magnitude = 0;  // |V_f(alpha)|, evaluated at alpha
  double eta = 0;        // magnitude / N
};

/// sum_{n <= N} (1_A(n) - delta) e(alpha2 n^2 + alpha1 n), delta = |A| / N.
Complex balanced_sum(const SubsetWindow& a, FrequencyPoint alpha);

struct SearchOptions {
  /// Windows up to this size are searched on the full (1/8N, 1/8N^2) grid.
  std::int64_t full_grid_max_n = 128;
  /// Larger windows: full grid on a prefix of this length, then each peak is
  /// tracked while the prefix doubles up to N.
  std::int64_t prefix_length = 128;
  int prefix_candidates = 16;
  /// alpha2 = a/q for every q up to this bound is scanned over all alpha1.
  std::int64_t rational_q_max = 12;
  std::vector<FrequencyPoint> hints;
};

/// Searches for a large |V_f(alpha)| and refines the best point by three
/// levels of 5x5 grids. The magnitude is evaluated at the returned point, so
/// it is a lower bound for the supremum.
SpectrumHit largest_fourier_coefficient(const SubsetWindow& a, const SearchOptions& options = {});

struct HeilbronnResult {
  std::int64_t q = 1;
  double value = 0;           // ||alpha2 q^2||
  bool within_bound = true;   // value <= kHeilbronnConstant * Q^{-1/3}
};
/// Exhaustive minimizer of ||alpha2 q^2|| over 1 <= q <= Q (smallest q on ties).
HeilbronnResult heilbronn_approx(double alpha2, std::int64_t Q);

struct DirichletResult {
  std::int64_t r = 1;
  double value = 0;  // ||beta r||
};
/// Exhaustive minimizer of ||beta r|| over 1 <= r <= floor(sqrt K); throws
/// AssertionFailed if the pigeonhole bound 1/(floor(sqrt K) + 1) fails.
DirichletResult dirichlet_approx(double beta, std::int64_t K);

struct IncrementStep {
  Progression progression;      // in the coordinates of the window it was cut from
  std::int64_t old_count = 0;   // |A|
  std::int64_t old_size = 0;    // N
  std::int64_t new_count = 0;   // |A ∩ P|
  std::int64_t new_size = 0;    // |P|
  double eta_used = 0;
  // Construction diagnostics.
  std::int64_t heilbronn_q = 1;
  std::int64_t block_length = 1;     // K
  std::int64_t dirichlet_bound = 1;  // largest r used
  std::int64_t pieces = 0;           // number of subprogressions scanned
  double max_variation = 0;          // largest ||h(n) - h(first)|| observed

  double old_density() const { return static_cast<double>(old_count) / static_cast<double>(old_size); }
  double new_density() const { return static_cast<double>(new_count) / static_cast<double>(new_size); }
};

/// Partitions {1..N} into progressions on which the phase
/// alpha2 n^2 + alpha1 n varies by at most eta/(4 pi), then returns the piece
/// of largest density. The averaging argument guarantees a piece with
/// |A ∩ P| >= (delta + eta/4)|P|; this is checked by integer
/// cross-multiplication and NoQualifyingProgression is raised if it fails.
IncrementStep density_increment(const SubsetWindow& a, const SpectrumHit& hit);

/// Length floor floor(2^-8 eta^2 N^{1/16}) asserted for every step.
std::int64_t increment_length_floor(double eta, std::int64_t N);

enum class StallReason { SpectrumFlat, WindowTooSmall, MaxSteps };
std::string_view stall_name(StallReason reason);

struct RothOptions {
  int max_steps = 32;
  double eta_min = 0.05;
  std::int64_t length_min = 8;
  SearchOptions search;
  /// Tuple budget per side for the witness search; larger windows are
  /// searched on their smallest members.
  std::int64_t witness_budget = 2'000'000;
};

struct RothOutcome {
  bool found = false;
  std::vector<std::int64_t> solution;  // original coordinates when found
  StallReason reason = StallReason::MaxSteps;
  std::vector<IncrementStep> trace;
};

/// Iterates witness search, spectrum search and density increment on
/// successively rescaled windows. Any witness is pulled back through the
/// chain of affine maps and verified in exact arithmetic against A0.
RothOutcome roth_loop(const DiagonalSystem& sys, const SubsetWindow& a0, const RothOptions& options = {});

}  // namespace quadri
