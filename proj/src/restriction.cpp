// SPDX-License-Identifier: Apache-2.0
#include "quadri/restriction.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "fft_lock.hpp"
#include "quadri/error.hpp"
#include "quadri/expsums.hpp"
#include "quadri/parallel.hpp"
#include "quadri/quadrature.hpp"

namespace quadri {

namespace {

struct FftBuffer {
  fftw_complex* data = nullptr;
  explicit FftBuffer(std::size_t n) : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(n, 1)))) {
    if (!data) fail(ErrorCode::CapacityExceeded, "FFT buffer allocation failed");
    std::fill_n(reinterpret_cast<double*>(data), 2 * std::max<std::size_t>(n, 1), 0.0);
  }
  ~FftBuffer() { fftw_free(data); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  Complex get(std::size_t i) const { return {data[i][0], data[i][1]}; }
  void add(std::size_t i, Complex z) {
    data[i][0] += z.real();
    data[i][1] += z.imag();
  }
};

struct Plan {
  fftw_plan plan = nullptr;
  ~Plan() {
    if (plan) {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

// In-place inverse-sign transform: out[k] = sum_j in[j] e(+jk/n).
void make_plan_1d(Plan& p, std::int64_t n, FftBuffer& buf) {
  std::lock_guard lock(detail::fftw_planner_mutex());
  p.plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data, buf.data, FFTW_BACKWARD, FFTW_ESTIMATE);
}

void make_plan_2d(Plan& p, std::int64_t n1, std::int64_t n2, FftBuffer& buf) {
  std::lock_guard lock(detail::fftw_planner_mutex());
  p.plan = fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), buf.data, buf.data, FFTW_BACKWARD, FFTW_ESTIMATE);
}

double power_of_abs2(double abs2, double p) {
  if (p == 2.0) return abs2;
  if (p == 4.0) return abs2 * abs2;
  if (p == 8.0) {
    double a4 = abs2 * abs2;
    return a4 * a4;
  }
  return std::pow(abs2, 0.5 * p);
}

void check_weights(std::span<const Complex> g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i]) > 1.0 + 1e-12) fail(ErrorCode::WeightOutOfRange, "|g(" + std::to_string(i + 1) + ")| exceeds 1");
}

}  // namespace

double grid_power_mean(std::span<const Complex> g, double p, std::int64_t G1, std::int64_t G2, bool shift1, bool shift2) {
  if (!(p > 0) || p > 16) fail(ErrorCode::InvalidArgument, "exponent must lie in (0, 16]");
  check_weights(g);
  const auto N = static_cast<std::int64_t>(g.size());
  if (N == 0) return 0.0;
  // Phases are exact rationals with denominators 2 G1 and 2 G2.
  const std::vector<Complex> roots1 = roots_of_unity(2 * G1);
  const std::vector<Complex> roots2 = roots_of_unity(2 * G2);
  std::vector<std::int64_t> bin(static_cast<std::size_t>(N));
  std::vector<Complex> base(static_cast<std::size_t>(N));
  for (std::int64_t n = 1; n <= N; ++n) {
    const std::int64_t sq = static_cast<std::int64_t>(static_cast<__int128>(n) * n % (2 * G2));
    bin[static_cast<std::size_t>(n - 1)] = sq % G2;
    base[static_cast<std::size_t>(n - 1)] = g[static_cast<std::size_t>(n - 1)] * (shift2 ? roots2[static_cast<std::size_t>(sq)] : Complex{1.0, 0.0});
  }
  Plan plan;
  {
    FftBuffer probe(static_cast<std::size_t>(G2));
    make_plan_1d(plan, G2, probe);
  }
  std::vector<double> column_sums(static_cast<std::size_t>(G1), 0.0);
  parallel_for(G1, [&](std::int64_t j) {
    FftBuffer buf(static_cast<std::size_t>(G2));
    const std::int64_t num = 2 * j + (shift1 ? 1 : 0);
    for (std::int64_t n = 1; n <= N; ++n) {
      const Complex w = base[static_cast<std::size_t>(n - 1)];
      if (w == Complex{}) continue;
      const auto idx = static_cast<std::size_t>(static_cast<__int128>(num) * n % (2 * G1));
      buf.add(static_cast<std::size_t>(bin[static_cast<std::size_t>(n - 1)]), w * roots1[idx]);
    }
    fftw_execute_dft(plan.plan, buf.data, buf.data);
    double sum = 0;
    for (std::int64_t k = 0; k < G2; ++k) {
      const double a2 = buf.data[k][0] * buf.data[k][0] + buf.data[k][1] * buf.data[k][1];
      sum += power_of_abs2(a2, p);
    }
    column_sums[static_cast<std::size_t>(j)] = sum;
  });
  double total = 0;
  for (double s : column_sums) total += s;
  return total / (static_cast<double>(G1) * static_cast<double>(G2));
}

LpMoment lp_moment(std::span<const Complex> g, double p, MomentGridSpec grid, bool certify) {
  if (!(p > 2) || p > 16) fail(ErrorCode::InvalidArgument, "exponent must lie in (2, 16]");
  if (grid.c1 < 2 || grid.c2 < 2) fail(ErrorCode::InvalidArgument, "oversampling factors must be at least 2");
  const auto N = static_cast<std::int64_t>(g.size());
  LpMoment out;
  out.G1 = grid.c1 * 3 * N;
  out.G2 = grid.c2 * 3 * N * N;
  if (N == 0) return out;
  double means[4];
  for (int s = 0; s < 4; ++s) means[s] = grid_power_mean(g, p, out.G1, out.G2, s & 1, s & 2);
  out.coarse = means[0];
  out.moment = 0.25 * (means[0] + means[1] + means[2] + means[3]);
  out.self_err = out.moment > 0 ? std::abs(out.moment - out.coarse) / out.moment : 0.0;
  if (certify && out.self_err > 0.02)
    fail(ErrorCode::GridTooCoarse, "grid estimates differ by " + std::to_string(100 * out.self_err) + "%");
  return out;
}

// ---- analytic factor ------------------------------------------------------

AnalyticFactor::AnalyticFactor(std::int64_t N, std::int64_t Q, std::int64_t m1_reach, std::int64_t m2_reach, int resolution)
    : N_(N), Q_(Q) {
  if (N < 1 || Q < 1 || resolution < 1) fail(ErrorCode::InvalidArgument, "N, Q and resolution must be positive");
  const double n = static_cast<double>(N), q = static_cast<double>(Q);
  // phi^3 carries frequencies in [0, 3]; the character adds |m|/N (resp. /N^2).
  const double rate1 = 3.0 + static_cast<double>(std::abs(m1_reach)) / n;
  const double rate2 = 3.0 + static_cast<double>(std::abs(m2_reach)) / (n * n);
  const double width1 = 2.0 / (rate1 * resolution), width2 = 2.0 / (rate2 * resolution);
  QuadratureRule r1 = composite_rule(-2 * q, 2 * q, {-q, 0.0, q}, width1, 16);
  QuadratureRule r2 = composite_rule(0.0, 2 * q * q, {q * q}, width2, 16);
  b1_ = r1.nodes;
  b2_ = r2.nodes;
  weighted_ = phi_grid(b1_, b2_);
  for (std::size_t i = 0; i < b1_.size(); ++i)
    for (std::size_t j = 0; j < b2_.size(); ++j) {
      const auto ii = static_cast<std::int64_t>(i), jj = static_cast<std::int64_t>(j);
      const Complex f = weighted_.at(ii, jj);
      const double w = r1.weights[i] * r2.weights[j] * psi_1d(b1_[i], q) * psi_1d(b2_[j], q * q);
      weighted_.set(ii, jj, w * f * f * f);
    }
}

double AnalyticFactor::at(std::int64_t m1, std::int64_t m2) const {
  const double n = static_cast<double>(N_);
  const double x1 = static_cast<double>(m1) / n, x2 = static_cast<double>(m2) / (n * n);
  std::vector<Complex> e2(b2_.size());
  for (std::size_t j = 0; j < b2_.size(); ++j) e2[j] = unit_phase(-b2_[j] * x2);
  Complex total = 0;
  for (std::size_t i = 0; i < b1_.size(); ++i) {
    Complex row = 0;
    for (std::size_t j = 0; j < b2_.size(); ++j) row += weighted_.at(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) * e2[j];
    total += unit_phase(-b1_[i] * x1) * row;
  }
  return 2.0 * total.real();
}

LatticeTable<double> AnalyticFactor::table(std::int64_t m1_max, std::int64_t m2_max) const {
  const double n = static_cast<double>(N_);
  const auto n1 = static_cast<std::int64_t>(b1_.size()), n2 = static_cast<std::int64_t>(b2_.size());
  SplitMatrix e1(m1_max, n1), e2t(n2, m2_max);
  for (std::int64_t m1 = 1; m1 <= m1_max; ++m1)
    for (std::int64_t i = 0; i < n1; ++i)
      e1.set(m1 - 1, i, unit_phase(-b1_[static_cast<std::size_t>(i)] * static_cast<double>(m1) / n));
  for (std::int64_t j = 0; j < n2; ++j)
    for (std::int64_t m2 = 1; m2 <= m2_max; ++m2)
      e2t.set(j, m2 - 1, unit_phase(-b2_[static_cast<std::size_t>(j)] * static_cast<double>(m2) / (n * n)));
  SplitMatrix full = multiply(multiply(e1, weighted_), e2t);
  LatticeTable<double> out(m1_max, m2_max);
  for (std::size_t c = 0; c < out.data.size(); ++c) out.data[c] = 2.0 * full.re[c];
  return out;
}

double analytic_factor(std::int64_t m1, std::int64_t m2, std::int64_t N, std::int64_t Q, double tol) {
  const std::int64_t r1 = std::max<std::int64_t>(std::abs(m1), 3 * N), r2 = std::max<std::int64_t>(std::abs(m2), 3 * N * N);
  const double base = AnalyticFactor(N, Q, r1, r2, 1).at(m1, m2);
  const double fine = AnalyticFactor(N, Q, r1, r2, 2).at(m1, m2);
  if (std::abs(base - fine) > tol)
    fail(ErrorCode::QuadratureNotConverged, "resolution doubling moved the value by " + std::to_string(std::abs(base - fine)));
  return fine;
}

// ---- arithmetic factor and decomposition -----------------------------------

Complex arithmetic_factor(std::int64_t q, std::int64_t m1, std::int64_t m2) {
  auto table = gauss_table(q);
  const std::vector<Complex> roots = roots_of_unity(q);
  Complex total = 0;
  for (std::int64_t a1 = 0; a1 < q; ++a1)
    for (std::int64_t a2 = 0; a2 < q; ++a2) {
      if (gcd3(a1, a2, q) != 1) continue;
      const Complex v = table->at(a1, a2);
      const std::int64_t k = floor_mod(-(a1 * floor_mod(m1, q) + a2 * floor_mod(m2, q)), q);
      total += v * v * v * roots[static_cast<std::size_t>(k)];
    }
  const double qd = static_cast<double>(q);
  return total / (qd * qd * qd);
}

Complex arithmetic_factor_transform(std::int64_t q, std::int64_t m1, std::int64_t m2) {
  const std::vector<Complex> roots = roots_of_unity(q);
  Complex total = 0;
  for (std::int64_t a = 0; a < q; ++a) {
    if (std::gcd(a, q) != 1) continue;
    total += gauss_sum_G(q, a, m1) * roots[static_cast<std::size_t>(floor_mod(-a * floor_mod(m2, q), q))];
  }
  const double qd = static_cast<double>(q);
  return total / (qd * qd);
}

std::vector<std::int64_t> dyadic_scales(std::int64_t Q) {
  if (Q < 1) fail(ErrorCode::InvalidArgument, "Q must be positive");
  std::int64_t top = 1;
  while (top < Q) top *= 2;
  std::vector<std::int64_t> scales;
  for (std::int64_t y = 1; y <= top; y *= 2) scales.push_back(y);
  return scales;
}

namespace {

// q^-3 sum over admissible a of V(q,a)^3 e_q(-a . r) for every residue pair r,
// evaluated as two one-dimensional transforms.
std::vector<Complex> arithmetic_residue_table(std::int64_t q) {
  auto table = gauss_table(q);
  const std::vector<Complex> roots = roots_of_unity(q);
  const auto qs = static_cast<std::size_t>(q);
  std::vector<Complex> partial(qs * qs, 0.0);  // [a1][r2]
  for (std::int64_t a1 = 0; a1 < q; ++a1)
    for (std::int64_t a2 = 0; a2 < q; ++a2) {
      if (gcd3(a1, a2, q) != 1) continue;
      const Complex v = table->at(a1, a2);
      const Complex c = v * v * v;
      for (std::int64_t r2 = 0; r2 < q; ++r2)
        partial[static_cast<std::size_t>(a1 * q + r2)] += c * roots[static_cast<std::size_t>(floor_mod(-a2 * r2, q))];
    }
  std::vector<Complex> out(qs * qs, 0.0);  // [r1][r2]
  const double scale = 1.0 / (static_cast<double>(q) * q * q);
  for (std::int64_t r1 = 0; r1 < q; ++r1)
    for (std::int64_t a1 = 0; a1 < q; ++a1) {
      const Complex e = roots[static_cast<std::size_t>(floor_mod(-a1 * r1, q))] * scale;
      for (std::int64_t r2 = 0; r2 < q; ++r2)
        out[static_cast<std::size_t>(r1 * q + r2)] += e * partial[static_cast<std::size_t>(a1 * q + r2)];
    }
  return out;
}

DecompositionPiece build_piece(std::int64_t Y, std::int64_t N, std::int64_t Q, const LatticeTable<double>& analytic) {
  DecompositionPiece piece;
  piece.Y = Y;
  piece.N = N;
  piece.Q = Q;
  piece.values = LatticeTable<Complex>(3 * N, 3 * N * N);
  std::vector<std::vector<Complex>> residue_tables;
  for (std::int64_t q = Y; q < 2 * Y; ++q) residue_tables.push_back(arithmetic_residue_table(q));
  parallel_for(3 * N, [&](std::int64_t row) {
    const std::int64_t m1 = row + 1;
    for (std::int64_t m2 = 1; m2 <= 3 * N * N; ++m2) {
      Complex arith = 0;
      for (std::int64_t q = Y; q < 2 * Y; ++q)
        arith += residue_tables[static_cast<std::size_t>(q - Y)][static_cast<std::size_t>((m1 % q) * q + (m2 % q))];
      piece.values.at(m1, m2) = arith * analytic.at(m1, m2);
    }
  });
  return piece;
}

void check_scale(std::int64_t Y, std::int64_t Q) {
  if (Y < 1 || (Y & (Y - 1)) != 0) fail(ErrorCode::InvalidArgument, "scale must be a power of two");
  if (Y > 2 * Q) fail(ErrorCode::InvalidArgument, "scale exceeds 2Q");
}

}  // namespace

Decomposition decompose_representation(std::int64_t N, std::int64_t Q, int resolution) {
  Decomposition out;
  out.N = N;
  out.Q = Q;
  const LatticeTable<double> analytic = AnalyticFactor(N, Q, 3 * N, 3 * N * N, resolution).table(3 * N, 3 * N * N);
  LatticeTable<Complex> rest(3 * N, 3 * N * N);
  build_representation_table(N).for_each_nonzero(
      [&](std::int64_t m1, std::int64_t m2, std::uint32_t c) { rest.at(m1, m2) = static_cast<double>(c); });
  for (std::int64_t Y : dyadic_scales(Q)) {
    check_scale(Y, Q);
    out.pieces.push_back(build_piece(Y, N, Q, analytic));
    const auto& v = out.pieces.back().values.data;
    for (std::size_t c = 0; c < v.size(); ++c) rest.data[c] -= v[c];
  }
  out.remainder.remainder = true;
  out.remainder.N = N;
  out.remainder.Q = Q;
  out.remainder.values = std::move(rest);
  return out;
}

DecompositionPiece r_piece(std::int64_t Y, std::int64_t N, std::int64_t Q, int resolution) {
  check_scale(Y, Q);
  const LatticeTable<double> analytic = AnalyticFactor(N, Q, 3 * N, 3 * N * N, resolution).table(3 * N, 3 * N * N);
  return build_piece(Y, N, Q, analytic);
}

PieceNorms w_piece_sup_and_l2(const DecompositionPiece& piece, MomentGridSpec grid) {
  const std::int64_t N = piece.N;
  const std::int64_t G1 = grid.c1 * 3 * N, G2 = grid.c2 * 3 * N * N;
  FftBuffer buf(static_cast<std::size_t>(G1 * G2));
  Plan plan;
  make_plan_2d(plan, G1, G2, buf);
  for (std::int64_t m1 = 1; m1 <= piece.values.m1_max; ++m1)
    for (std::int64_t m2 = 1; m2 <= piece.values.m2_max; ++m2)
      buf.add(static_cast<std::size_t>((m1 % G1) * G2 + (m2 % G2)), piece.values.at(m1, m2));
  fftw_execute(plan.plan);
  PieceNorms out;
  double sum = 0;
  for (std::int64_t c = 0; c < G1 * G2; ++c) {
    const double a2 = buf.data[c][0] * buf.data[c][0] + buf.data[c][1] * buf.data[c][1];
    sum += a2;
    out.sup = std::max(out.sup, std::sqrt(a2));
  }
  out.l2sq = sum / (static_cast<double>(G1) * static_cast<double>(G2));
  return out;
}

double piece_moment(const DecompositionPiece& piece, int k) {
  double total = 0;
  for (const Complex& z : piece.values.data) total += std::pow(std::norm(z), k);
  return total;
}

// ---- toy inequality ---------------------------------------------------------

namespace {

double lattice_lp_norm(std::int64_t n1, std::int64_t n2, const std::vector<Complex>& coeffs, double p) {
  std::int64_t G1, G2;
  if (n2 == 1) {
    G1 = std::min<std::int64_t>(1024, std::max<std::int64_t>(64, 16 * n1));
    G2 = 1;
  } else {
    G1 = std::min<std::int64_t>(512, std::max<std::int64_t>(32, 8 * n1));
    G2 = std::min<std::int64_t>(512, std::max<std::int64_t>(32, 8 * n2));
  }
  FftBuffer buf(static_cast<std::size_t>(G1 * G2));
  Plan plan;
  if (G2 == 1) make_plan_1d(plan, G1, buf);
  else make_plan_2d(plan, G1, G2, buf);
  for (std::int64_t i = 0; i < n1; ++i)
    for (std::int64_t j = 0; j < n2; ++j) buf.add(static_cast<std::size_t>(i * G2 + j), coeffs[static_cast<std::size_t>(i * n2 + j)]);
  fftw_execute(plan.plan);
  double sum = 0;
  for (std::int64_t c = 0; c < G1 * G2; ++c)
    sum += power_of_abs2(buf.data[c][0] * buf.data[c][0] + buf.data[c][1] * buf.data[c][1], p);
  return std::pow(sum / (static_cast<double>(G1) * static_cast<double>(G2)), 1.0 / p);
}

}  // namespace

InequalitySides theorem4_inequality_check(std::int64_t n1, std::int64_t n2, std::span<const double> omega,
                                          std::span<const Complex> f, const std::vector<std::vector<double>>& pieces,
                                          double p) {
  if (!(p > 2)) fail(ErrorCode::InvalidArgument, "exponent must exceed 2");
  if (n1 < 1 || n2 < 1 || n1 > 64 || n2 > 64) fail(ErrorCode::CapacityExceeded, "lattice sides must lie in 1..64");
  const auto size = static_cast<std::size_t>(n1 * n2);
  if (omega.size() != size || f.size() != size) fail(ErrorCode::LengthMismatch, "weights do not match the lattice");
  for (double w : omega)
    if (w < 0) fail(ErrorCode::InvalidArgument, "omega must be nonnegative");
  std::vector<double> sum(size, 0.0);
  for (const auto& piece : pieces) {
    if (piece.size() != size) fail(ErrorCode::LengthMismatch, "piece does not match the lattice");
    for (std::size_t c = 0; c < size; ++c) sum[c] += piece[c];
  }
  for (std::size_t c = 0; c < size; ++c)
    if (std::abs(sum[c] - omega[c]) > 1e-10 * std::max(1.0, std::abs(omega[c])))
      fail(ErrorCode::DecompositionMismatch, "pieces do not sum to omega at index " + std::to_string(c));

  InequalitySides out;
  std::vector<Complex> fw(size);
  double energy = 0;
  for (std::size_t c = 0; c < size; ++c) {
    fw[c] = f[c] * omega[c];
    energy += std::norm(f[c]) * omega[c];
  }
  out.lhs = lattice_lp_norm(n1, n2, fw, p);
  const double r = 2 * p / (p - 2);
  double bracket = 0;
  for (const auto& piece : pieces) {
    std::vector<Complex> coeffs(piece.begin(), piece.end());
    double wn = lattice_lp_norm(n1, n2, coeffs, p);
    double rn = 0;
    for (double w : piece) rn += std::pow(std::abs(w), r);
    rn = std::pow(rn, 1.0 / r);
    bracket += std::pow(wn, (p - 2) / p) * std::pow(rn, 2 / p);
  }
  out.rhs = std::sqrt(energy) * std::sqrt(bracket);
  return out;
}

// ---- one-dimensional moment ----------------------------------------------

BetaMoment beta_moment_check(std::int64_t X, std::int64_t M, int k,
                             const std::function<Complex(std::int64_t, std::int64_t)>& g, bool strict) {
  if (X < 1 || M < 1 || k < 1) fail(ErrorCode::InvalidArgument, "X, M and k must be positive");
  if (M > 10'000'000) fail(ErrorCode::CapacityExceeded, "M above 1e7");
  BetaMoment out;
  out.hypothesis_ok = std::pow(static_cast<long double>(X), 4.0L * k) <= static_cast<long double>(M);
  if (!out.hypothesis_ok && strict) fail(ErrorCode::HypothesisViolated, "X^{4k} exceeds M");
  std::vector<std::vector<Complex>> coeff(static_cast<std::size_t>(X + 1));
  for (std::int64_t q = 1; q <= X; ++q)
    for (std::int64_t a = 1; a <= q; ++a) coeff[static_cast<std::size_t>(q)].push_back(g(a, q));
  // beta is periodic modulo lcm(1..X); evaluate one period when it is short.
  std::int64_t period = 1;
  for (std::int64_t q = 1; q <= X && period <= M; ++q) period = std::lcm(period, q);
  const std::int64_t span = std::min(period, M);
  std::vector<double> powers(static_cast<std::size_t>(span + 1), 0.0);
  std::vector<std::vector<Complex>> roots(static_cast<std::size_t>(X + 1));
  for (std::int64_t q = 1; q <= X; ++q) roots[static_cast<std::size_t>(q)] = roots_of_unity(q);
  for (std::int64_t m = 1; m <= span; ++m) {
    Complex beta = 0;
    for (std::int64_t q = 1; q <= X; ++q)
      for (std::int64_t a = 1; a <= q; ++a)
        beta += coeff[static_cast<std::size_t>(q)][static_cast<std::size_t>(a - 1)] *
                roots[static_cast<std::size_t>(q)][static_cast<std::size_t>(floor_mod(-a * (m % q), q))];
    powers[static_cast<std::size_t>(m)] = std::pow(std::norm(beta), k);
  }
  if (span == M) {
    for (std::int64_t m = 1; m <= M; ++m) out.value += powers[static_cast<std::size_t>(m)];
    return out;
  }
  double per_period = 0;
  for (std::int64_t m = 1; m <= period; ++m) per_period += powers[static_cast<std::size_t>(m)];
  const std::int64_t full = M / period;
  out.value = per_period * static_cast<double>(full);
  for (std::int64_t m = 1; m <= M - full * period; ++m) out.value += powers[static_cast<std::size_t>(m)];
  return out;
}

}  // namespace quadri
