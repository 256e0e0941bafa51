// SPDX-License-Identifier: Apache-2.0
#include "quadri/circle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "quadri/error.hpp"
#include "quadri/parallel.hpp"
#include "quadri/quadrature.hpp"
#include "quadri/rng.hpp"

namespace quadri {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int p_valuation(__int128 n, std::int64_t p) {
  if (n == 0) return std::numeric_limits<int>::max() / 2;
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

namespace {

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > std::numeric_limits<std::int64_t>::max() / base) fail(ErrorCode::CapacityExceeded, "prime power overflows 64 bits");
    r *= base;
  }
  return r;
}

__int128 mod128(__int128 a, __int128 m) {
  __int128 r = a % m;
  return r < 0 ? r + m : r;
}

__int128 mod_inverse(__int128 a, __int128 m) {
  __int128 g = m, x = 0, x1 = 1, b = mod128(a, m);
  while (b != 0) {
    __int128 q = g / b;
    __int128 t = g - q * b;
    g = b;
    b = t;
    t = x - q * x1;
    x = x1;
    x1 = t;
  }
  if (g != 1) fail(ErrorCode::InvariantViolated, "Jacobian unit is not invertible");
  return mod128(x, m);
}

}  // namespace

// ---- arcs -----------------------------------------------------------------

ArcClass classify_arc(FrequencyPoint alpha, std::int64_t Q, std::int64_t N) {
  if (Q < 1 || N < 1) fail(ErrorCode::InvalidArgument, "Q and N must be positive");
  const double d1 = static_cast<double>(Q) / static_cast<double>(N);
  const double d2 = d1 * d1;
  const double slack = 1e-14;
  ArcClass out;
  for (std::int64_t q = 1; q <= Q; ++q) {
    auto numerators = [&](double a, double delta) {
      std::vector<std::int64_t> list;
      if (delta >= 0.5) {
        for (std::int64_t r = 1; r <= q; ++r) list.push_back(r);
        return list;
      }
      auto lo = static_cast<std::int64_t>(std::ceil((a - delta - slack) * static_cast<double>(q)));
      auto hi = static_cast<std::int64_t>(std::floor((a + delta + slack) * static_cast<double>(q)));
      for (std::int64_t r = lo; r <= hi; ++r) {
        std::int64_t n = floor_mod(r, q);
        list.push_back(n == 0 ? q : n);
      }
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
      return list;
    };
    for (std::int64_t a1 : numerators(alpha.alpha1, d1)) {
      if (circle_norm(alpha.alpha1 - static_cast<double>(a1) / static_cast<double>(q)) > d1 + slack) continue;
      for (std::int64_t a2 : numerators(alpha.alpha2, d2)) {
        if (circle_norm(alpha.alpha2 - static_cast<double>(a2) / static_cast<double>(q)) > d2 + slack) continue;
        if (gcd3(a1, a2, q) != 1) continue;
        if (out.candidates == 0) {
          out.major = true;
          out.centre = RationalPoint(a1, a2, q);
        }
        ++out.candidates;
      }
    }
  }
  out.ambiguous = out.candidates > 1;
  if (out.ambiguous && !CutoffParams(Q, N).separation_warning())
    fail(ErrorCode::AmbiguousArc, "overlapping major boxes although 64 Q^52 <= N");
  return out;
}

bool major_boxes_disjoint(std::int64_t Q, std::int64_t N) {
  if (Q > 16) fail(ErrorCode::CapacityExceeded, "pairwise box check limited to Q <= 16");
  const double d1 = static_cast<double>(Q) / static_cast<double>(N);
  const double d2 = d1 * d1;
  std::vector<std::pair<double, double>> centres;
  for (std::int64_t q = 1; q <= Q; ++q)
    for (std::int64_t a1 = 1; a1 <= q; ++a1)
      for (std::int64_t a2 = 1; a2 <= q; ++a2)
        if (gcd3(a1, a2, q) == 1)
          centres.emplace_back(static_cast<double>(a1) / static_cast<double>(q), static_cast<double>(a2) / static_cast<double>(q));
  for (std::size_t i = 0; i < centres.size(); ++i)
    for (std::size_t j = i + 1; j < centres.size(); ++j)
      if (circle_norm(centres[i].first - centres[j].first) <= 2 * d1 &&
          circle_norm(centres[i].second - centres[j].second) <= 2 * d2)
        return false;
  return true;
}

MajorArcApprox major_arc_approx_at(FrequencyPoint alpha, const RationalPoint& centre, std::int64_t N) {
  MajorArcApprox out;
  out.centre = centre;
  const double q = static_cast<double>(centre.q);
  out.beta1 = reduce_centered(alpha.alpha1 - static_cast<double>(centre.a1) / q);
  out.beta2 = reduce_centered(alpha.alpha2 - static_cast<double>(centre.a2) / q);
  const double n = static_cast<double>(N);
  out.approx = complete_gauss_sum(centre.q, centre.a1, centre.a2) / q * continuous_v(out.beta1, out.beta2, n);
  out.actual = quad_sum(N, alpha);
  out.bound = q * (1.0 + std::abs(out.beta1) * n + std::abs(out.beta2) * n * n);
  return out;
}

MajorArcApprox major_arc_approx_error(FrequencyPoint alpha, std::int64_t Q, std::int64_t N) {
  ArcClass arc = classify_arc(alpha, Q, N);
  if (!arc.major) fail(ErrorCode::NotMajorArc, "point lies on the minor arcs");
  return major_arc_approx_at(alpha, arc.centre, N);
}

MinorArcSup minor_arc_sup(std::int64_t N, std::int64_t Q, std::int64_t samples, std::uint64_t seed) {
  constexpr std::int64_t kChunk = 256;
  const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<MinorArcSup> parts(static_cast<std::size_t>(chunks));
  parallel_for(chunks, [&](std::int64_t c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c));
    MinorArcSup& part = parts[static_cast<std::size_t>(c)];
    const std::int64_t end = std::min(samples, (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      FrequencyPoint alpha(rng.uniform() - 0.5, rng.uniform() - 0.5);
      if (classify_arc(alpha, Q, N).major) {
        ++part.major_samples;
        continue;
      }
      ++part.minor_samples;
      double mag = std::abs(quad_sum(N, alpha));
      if (mag > part.sup) {
        part.sup = mag;
        part.argmax = alpha;
      }
    }
  });
  MinorArcSup out;
  for (const MinorArcSup& part : parts) {
    out.major_samples += part.major_samples;
    out.minor_samples += part.minor_samples;
    if (part.sup > out.sup) {
      out.sup = part.sup;
      out.argmax = part.argmax;
    }
  }
  return out;
}

// ---- local densities ------------------------------------------------------

Count count_solutions_mod(const DiagonalSystem& sys, std::int64_t q, ModCountMethod method) {
  if (q < 1) fail(ErrorCode::InvalidArgument, "modulus must be positive");
  if (q > 512) fail(ErrorCode::CapacityExceeded, "modulus above 512");
  if (method == ModCountMethod::CharacterSum) {
    auto table = gauss_table(q);
    long double total = 0;
    for (std::int64_t a1 = 0; a1 < q; ++a1)
      for (std::int64_t a2 = 0; a2 < q; ++a2) {
        std::complex<long double> prod = 1;
        for (std::int64_t l : sys.lambdas()) {
          Complex v = table->at(l * a1, l * a2);
          prod *= std::complex<long double>(v.real(), v.imag());
        }
        total += prod.real();
      }
    total /= static_cast<long double>(q) * static_cast<long double>(q);
    long double rounded = std::round(total);
    if (std::abs(total - rounded) > 0.25L)
      fail(ErrorCode::InvariantViolated, "character sum not close to an integer; use the dynamic route");
    return static_cast<Count>(rounded);
  }
  // Residue-pair distribution of (lambda x, lambda x^2) for each variable,
  // convolved over the q x q torus.
  const auto cells = static_cast<std::size_t>(q * q);
  std::vector<Count> table(cells, 0);
  table[0] = 1;
  for (std::int64_t l : sys.lambdas()) {
    std::vector<Count> mult(cells, 0);
    for (std::int64_t x = 0; x < q; ++x) {
      std::int64_t d1 = floor_mod(static_cast<std::int64_t>(static_cast<__int128>(l) * x % q), q);
      std::int64_t d2 = floor_mod(static_cast<std::int64_t>(static_cast<__int128>(l) * x % q * x % q), q);
      ++mult[static_cast<std::size_t>(d1 * q + d2)];
    }
    std::vector<std::pair<std::int64_t, Count>> shifts;
    for (std::size_t c = 0; c < cells; ++c)
      if (mult[c]) shifts.emplace_back(static_cast<std::int64_t>(c), mult[c]);
    std::vector<Count> next(cells, 0);
    parallel_for(q, [&](std::int64_t r1) {
      for (auto [shift, m] : shifts) {
        const std::int64_t s1 = shift / q, s2 = shift % q;
        const std::int64_t src1 = floor_mod(r1 - s1, q);
        const Count* in = table.data() + src1 * q;
        Count* out = next.data() + r1 * q;
        for (std::int64_t r2 = 0; r2 < q; ++r2) {
          std::int64_t src2 = r2 - s2;
          if (src2 < 0) src2 += q;
          out[r2] += m * in[src2];
        }
      }
    });
    table = std::move(next);
  }
  return table[0];
}

Complex singular_series_term(const DiagonalSystem& sys, std::int64_t q) {
  auto table = gauss_table(q);
  Complex total = 0;
  for (std::int64_t a1 = 0; a1 < q; ++a1)
    for (std::int64_t a2 = 0; a2 < q; ++a2) {
      if (gcd3(a1, a2, q) != 1) continue;
      Complex prod = 1;
      for (std::int64_t l : sys.lambdas()) prod *= table->at(l * a1, l * a2);
      total += prod;
    }
  return total / std::pow(static_cast<double>(q), static_cast<double>(sys.size()));
}

SingularSeries singular_series(const DiagonalSystem& sys, std::int64_t Q) {
  if (Q < 1) fail(ErrorCode::InvalidArgument, "truncation must be positive");
  if (Q > kGaussCacheLimit) fail(ErrorCode::CapacityExceeded, "truncation above the Gauss-sum cache limit");
  std::vector<Complex> terms(static_cast<std::size_t>(Q + 1));
  // Largest moduli first so the expensive tables start early.
  parallel_for(Q, [&](std::int64_t i) {
    std::int64_t q = Q - i;
    terms[static_cast<std::size_t>(q)] = singular_series_term(sys, q);
  });
  SingularSeries out;
  out.terms.assign(static_cast<std::size_t>(Q + 1), 0.0);
  Complex full = 0, half = 0;
  for (std::int64_t q = 1; q <= Q; ++q) {
    full += terms[static_cast<std::size_t>(q)];
    if (q <= Q / 2) half += terms[static_cast<std::size_t>(q)];
    out.terms[static_cast<std::size_t>(q)] = terms[static_cast<std::size_t>(q)].real();
  }
  out.value = full.real();
  out.imag_residue = std::abs(full.imag());
  out.tail_proxy = Q >= 2 ? std::abs(full.real() - half.real()) : std::abs(full.real());
  if (out.imag_residue > 1e-8) fail(ErrorCode::ImaginaryResidue, "imaginary part " + std::to_string(out.imag_residue));
  return out;
}

LocalFactor local_factor(const DiagonalSystem& sys, std::int64_t p, int k_max, double tol, bool require_stable) {
  if (!is_prime(p)) fail(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  if (k_max < 0) fail(ErrorCode::InvalidArgument, "k_max must be nonnegative");
  LocalFactor out;
  out.p = p;
  const auto s = static_cast<long double>(sys.size());
  for (int k = 0; k <= k_max; ++k) {
    const std::int64_t q = ipow(p, k);
    Count c = count_solutions_mod(sys, q, ModCountMethod::Dynamic);
    long double scale = std::pow(static_cast<long double>(p), (2.0L - s) * k);
    out.values.push_back(static_cast<double>(static_cast<long double>(c) * scale));
    if (k >= 1 && out.u < 0 && std::abs(out.values[static_cast<std::size_t>(k)] - out.values[static_cast<std::size_t>(k - 1)]) <= tol)
      out.u = k;
  }
  out.stabilized = k_max >= 1 && std::abs(out.values[static_cast<std::size_t>(k_max)] - out.values[static_cast<std::size_t>(k_max - 1)]) <= tol;
  if (require_stable && !out.stabilized)
    fail(ErrorCode::NotStabilized, "local factor at p = " + std::to_string(p) + " still moving at k = " + std::to_string(k_max));
  return out;
}

double euler_product(const DiagonalSystem& sys, std::int64_t P, std::int64_t depth) {
  double product = 1.0;
  for (std::int64_t p = 2; p <= P; ++p) {
    if (!is_prime(p)) continue;
    int k = 0;
    for (std::int64_t pk = p; pk <= depth; pk *= p) ++k;
    product *= local_factor(sys, p, k).estimate();
  }
  return product;
}

// ---- p-adic and real solutions -------------------------------------------

namespace {

struct Residual {
  __int128 f1 = 0, f2 = 0;
};

Residual residual(const DiagonalSystem& sys, const std::vector<__int128>& x) {
  Residual r;
  for (std::size_t i = 0; i < x.size(); ++i) {
    __int128 t = static_cast<__int128>(sys.lambda(i)) * x[i];
    r.f1 += t;
    r.f2 += t * x[i];
  }
  return r;
}

void check_pair(const DiagonalSystem& sys, std::pair<std::size_t, std::size_t> pair) {
  if (pair.first == pair.second || pair.first >= sys.size() || pair.second >= sys.size())
    fail(ErrorCode::InvalidArgument, "designated pair must be two distinct coordinates");
}

}  // namespace

PadicSolution hensel_lift(const DiagonalSystem& sys, std::int64_t p, std::span<const std::int64_t> x0, int k,
                          std::pair<std::size_t, std::size_t> pair) {
  if (!is_prime(p)) fail(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  if (x0.size() != sys.size()) fail(ErrorCode::LengthMismatch, "seed length differs from the number of variables");
  if (k < 1) fail(ErrorCode::InvalidArgument, "precision must be at least 1");
  check_pair(sys, pair);
  const auto [i, j] = pair;
  const __int128 li = sys.lambda(i), lj = sys.lambda(j);

  std::vector<__int128> x(x0.begin(), x0.end());
  if (mod128(x[j] - x[i], p) == 0)
    fail(ErrorCode::SingularPoint, "designated coordinates agree mod " + std::to_string(p));
  const __int128 delta0 = 2 * li * lj * (x[j] - x[i]);
  const int v = p_valuation(delta0, p);
  Residual r0 = residual(sys, x);
  const int w = std::min(p_valuation(r0.f1, p), p_valuation(r0.f2, p));
  if (w <= 2 * v)
    fail(ErrorCode::HypothesisFails, "v_p(F) = " + std::to_string(w) + " is not above 2 v_p(Delta_0) = " + std::to_string(2 * v));

  const int K = k + 2 * v + 2;
  const __int128 M = ipow(p, K);
  if (M >= (static_cast<__int128>(1) << 40)) fail(ErrorCode::CapacityExceeded, "working precision p^K above 2^40");
  const __int128 pv = ipow(p, v);
  const __int128 target = ipow(p, k + v + 1);
  for (auto& xi : x) xi = mod128(xi, M);

  bool converged = false;
  for (int iter = 0; iter < 64 && !converged; ++iter) {
    Residual r = residual(sys, x);
    const __int128 delta = 2 * li * lj * (x[j] - x[i]);
    if (p_valuation(delta, p) != v) fail(ErrorCode::InvariantViolated, "Jacobian valuation changed during lifting");
    const __int128 ni = 2 * lj * x[j] * r.f1 - lj * r.f2;
    const __int128 nj = -2 * li * x[i] * r.f1 + li * r.f2;
    if (ni % pv != 0 || nj % pv != 0) fail(ErrorCode::InvariantViolated, "Newton numerator not divisible by p^v");
    const __int128 uinv = mod_inverse(delta / pv, M);
    const __int128 di = mod128(mod128(ni / pv, M) * uinv, M);
    const __int128 dj = mod128(mod128(nj / pv, M) * uinv, M);
    converged = di % target == 0 && dj % target == 0;
    x[i] = mod128(x[i] - di, M);
    x[j] = mod128(x[j] - dj, M);
  }
  if (!converged) fail(ErrorCode::InvariantViolated, "Newton iteration did not converge");

  PadicSolution out;
  out.p = p;
  out.k = k;
  out.modulus = ipow(p, k);
  out.pair = pair;
  out.delta_valuation = v;
  out.jacobian_unit = v == 0;
  std::vector<__int128> reduced(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    reduced[c] = mod128(x[c], out.modulus);
    out.x.push_back(static_cast<std::int64_t>(reduced[c]));
  }
  Residual check = residual(sys, reduced);
  if (mod128(check.f1, out.modulus) != 0 || mod128(check.f2, out.modulus) != 0)
    fail(ErrorCode::InvariantViolated, "lifted point fails the congruences");
  return out;
}

std::vector<PadicSolution> padic_seeds(const DiagonalSystem& sys, std::int64_t p, std::size_t max_seeds,
                                       std::pair<std::size_t, std::size_t> pair, int u_max, std::int64_t budget) {
  if (!is_prime(p)) fail(ErrorCode::InvalidArgument, std::to_string(p) + " is not prime");
  check_pair(sys, pair);
  if (u_max < 0) u_max = p == 2 ? 4 : 3;
  const auto [i, j] = pair;
  const std::size_t s = sys.size();
  // Free coordinates vary fastest, the designated pair slowest; coordinate
  // `fixed` stays 0 (translation invariance).
  std::vector<std::size_t> order;
  std::size_t fixed = s;
  for (std::size_t c = 0; c < s; ++c) {
    if (c == i || c == j) continue;
    if (fixed == s) fixed = c;
    else order.push_back(c);
  }
  order.push_back(i);
  order.push_back(j);
  const __int128 li = sys.lambda(i), lj = sys.lambda(j);
  std::int64_t spent = 0;
  for (int u = 1; u <= u_max; ++u) {
    const std::int64_t M = ipow(p, u);
    long double tuples = std::pow(static_cast<long double>(M), static_cast<long double>(order.size()));
    if (spent + tuples > static_cast<long double>(budget)) break;
    spent += static_cast<std::int64_t>(tuples);
    std::vector<PadicSolution> seeds;
    std::vector<__int128> x(s, 0);
    for (;;) {
      if (mod128(x[j] - x[i], p) != 0) {
        Residual r = residual(sys, x);
        if (r.f1 % M == 0 && r.f2 % M == 0) {
          const int v = p_valuation(2 * li * lj * (x[j] - x[i]), p);
          const int w = std::min(p_valuation(r.f1, p), p_valuation(r.f2, p));
          if (w > 2 * v) {
            PadicSolution seed;
            seed.p = p;
            seed.k = u;
            seed.modulus = M;
            seed.pair = pair;
            seed.delta_valuation = v;
            seed.jacobian_unit = v == 0;
            for (auto xc : x) seed.x.push_back(static_cast<std::int64_t>(xc));
            seeds.push_back(std::move(seed));
            if (seeds.size() >= max_seeds) return seeds;
          }
        }
      }
      std::size_t d = 0;
      for (; d < order.size(); ++d) {
        if (++x[order[d]] < M) break;
        x[order[d]] = 0;
      }
      if (d == order.size()) break;
    }
    if (!seeds.empty()) return seeds;
  }
  fail(ErrorCode::NotFound, "no seed satisfying the lifting hypothesis mod " + std::to_string(p) + "^u for u <= " +
                                std::to_string(u_max) + " within budget");
}

PadicSolution find_nonsingular_padic(const DiagonalSystem& sys, std::int64_t p, std::pair<std::size_t, std::size_t> pair) {
  return padic_seeds(sys, p, 1, pair).front();
}

std::vector<double> find_nonsingular_real(const DiagonalSystem& sys) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t c = 0; c < sys.size(); ++c) (sys.lambda(c) > 0 ? pos : neg).push_back(c);
  if (pos.size() < 2 || neg.size() < 2)
    fail(ErrorCode::SignConditionViolated, "need two positive and two negative coefficients");
  const double l1 = static_cast<double>(sys.lambda(pos[0])), l2 = static_cast<double>(sys.lambda(pos[1]));
  const double m1 = -static_cast<double>(sys.lambda(neg[0])), m2 = -static_cast<double>(sys.lambda(neg[1]));
  const double theta = 1.0;
  const double phi = theta * std::sqrt(l1 * l2 * (l1 + l2) / (m1 * m2 * (m1 + m2)));
  std::vector<double> x(sys.size(), 1.0);
  x[pos[0]] = 1.0 + l2 * theta;
  x[pos[1]] = 1.0 - l1 * theta;
  x[neg[0]] = 1.0 + m2 * phi;
  x[neg[1]] = 1.0 - m1 * phi;
  return x;
}

// ---- singular integral and prediction -------------------------------------

namespace {

struct Moments {
  double sum = 0, sum_sq = 0;
};

SingularIntegral integral_monte_carlo(const DiagonalSystem& sys, const IntegralOptions& opt, bool fejer) {
  if (opt.samples < 100'000) fail(ErrorCode::BudgetExhausted, "Monte Carlo needs at least 1e5 samples");
  std::vector<std::size_t> pos;
  for (std::size_t c = 0; c < sys.size(); ++c)
    if (sys.lambda(c) > 0) pos.push_back(c);
  if (pos.size() < 2) fail(ErrorCode::SignConditionViolated, "need two positive coefficients");
  const std::size_t ia = pos[0], ib = pos[1];
  const double la = static_cast<double>(sys.lambda(ia)), lb = static_cast<double>(sys.lambda(ib));
  const double c2 = la * (la + lb);
  const double P = opt.fejer_width;
  constexpr std::int64_t kChunk = 1 << 16;
  const std::int64_t chunks = (opt.samples + kChunk - 1) / kChunk;
  std::vector<Moments> parts(static_cast<std::size_t>(chunks));
  auto sinc2 = [](double x) {
    if (std::abs(x) < 1e-8) return 1.0;
    double s = std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    return s * s;
  };
  parallel_for(chunks, [&](std::int64_t c) {
    CounterRng rng(opt.seed, static_cast<std::uint64_t>(c));
    Moments m;
    const std::int64_t end = std::min(opt.samples, (c + 1) * kChunk);
    for (std::int64_t n = c * kChunk; n < end; ++n) {
      double w = 0;
      if (fejer) {
        double k1 = 0, k2 = 0;
        for (std::size_t t = 0; t < sys.size(); ++t) {
          double y = rng.uniform(), l = static_cast<double>(sys.lambda(t));
          k1 += l * y;
          k2 += l * y * y;
        }
        w = P * P * sinc2(P * k1) * sinc2(P * k2);
      } else {
        // Coarea form: fix all but the designated pair, solve for the pair
        // and weight each root by the inverse Jacobian.
        double A = 0, B = 0;
        for (std::size_t t = 0; t < sys.size(); ++t) {
          if (t == ia || t == ib) continue;
          double y = rng.uniform(), l = static_cast<double>(sys.lambda(t));
          A -= l * y;
          B -= l * y * y;
        }
        const double c1 = -2.0 * A * la;
        const double c0 = A * A - B * lb;
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc > 0) {
          const double root = std::sqrt(disc);
          for (double sign : {-1.0, 1.0}) {
            double ya = (-c1 + sign * root) / (2.0 * c2);
            double yb = (A - la * ya) / lb;
            if (ya < 0 || ya > 1 || yb < 0 || yb > 1) continue;
            w += 1.0 / std::abs(2.0 * la * lb * (yb - ya));
          }
        }
      }
      m.sum += w;
      m.sum_sq += w * w;
    }
    parts[static_cast<std::size_t>(c)] = m;
  });
  Moments total;
  for (const Moments& m : parts) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  const double n = static_cast<double>(opt.samples);
  SingularIntegral out;
  out.method = fejer ? IntegralMethod::Fejer : IntegralMethod::MonteCarlo;
  out.samples = opt.samples;
  out.value = total.sum / n;
  const double var = std::max(0.0, total.sum_sq / n - out.value * out.value);
  out.error = std::sqrt(var / n);
  return out;
}

SingularIntegral integral_quadrature(const DiagonalSystem& sys, const IntegralOptions& opt) {
  const double B = std::round(opt.box);
  if (B < 2) fail(ErrorCode::InvalidArgument, "quadrature box must be at least 2");
  const double half = std::round(B / 2);
  QuadratureRule r1 = composite_rule(-B, B, {-half, half}, 1.0, 16);
  QuadratureRule r2 = composite_rule(0.0, B, {half}, 1.0, 16);
  // Only |lambda| matters: phi(-b) is the conjugate of phi(b).
  std::map<std::int64_t, SplitMatrix> grids;
  for (std::int64_t l : sys.lambdas()) {
    std::int64_t a = std::abs(l);
    if (grids.count(a)) continue;
    std::vector<double> b1(r1.nodes), b2(r2.nodes);
    for (double& b : b1) b *= static_cast<double>(a);
    for (double& b : b2) b *= static_cast<double>(a);
    grids.emplace(a, phi_grid(b1, b2));
  }
  // The integrand at -beta is the conjugate of the integrand at beta, so the
  // half plane beta2 >= 0 carries twice the real part.
  double full = 0, inner = 0;
  for (std::size_t u = 0; u < r1.nodes.size(); ++u)
    for (std::size_t v = 0; v < r2.nodes.size(); ++v) {
      Complex prod = 1;
      for (std::int64_t l : sys.lambdas()) {
        Complex f = grids.at(std::abs(l)).at(static_cast<std::int64_t>(u), static_cast<std::int64_t>(v));
        prod *= l > 0 ? f : std::conj(f);
      }
      const double term = r1.weights[u] * r2.weights[v] * prod.real();
      full += term;
      if (std::abs(r1.nodes[u]) <= half && r2.nodes[v] <= half) inner += term;
    }
  SingularIntegral out;
  out.method = IntegralMethod::Quadrature;
  out.value = 2 * full;
  out.error = 2 * std::abs(full - inner);
  return out;
}

}  // namespace

SingularIntegral singular_integral(const DiagonalSystem& sys, const IntegralOptions& options) {
  switch (options.method) {
    case IntegralMethod::MonteCarlo: return integral_monte_carlo(sys, options, false);
    case IntegralMethod::Fejer: return integral_monte_carlo(sys, options, true);
    case IntegralMethod::Quadrature: return integral_quadrature(sys, options);
  }
  fail(ErrorCode::InvalidArgument, "unknown integration method");
}

Prediction predict_Z(const DiagonalSystem& sys, std::int64_t N, const SingularSeries& series,
                     const SingularIntegral& integral) {
  Prediction out;
  out.series = series;
  out.integral = integral;
  const double scale = std::pow(static_cast<double>(N), static_cast<double>(sys.size()) - 3.0);
  out.prediction = series.value * integral.value * scale;
  double rel_s = series.value != 0 ? series.tail_proxy / std::abs(series.value) : 0;
  double rel_j = integral.value != 0 ? integral.error / std::abs(integral.value) : 0;
  out.error = std::abs(out.prediction) * std::hypot(rel_s, rel_j);
  return out;
}

Prediction predict_Z(const DiagonalSystem& sys, std::int64_t N, std::int64_t Q, const IntegralOptions& options) {
  return predict_Z(sys, N, singular_series(sys, Q), singular_integral(sys, options));
}

}  // namespace quadri
