// SPDX-License-Identifier: Apache-2.0
#include "quadri/increment.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fft_lock.hpp"
#include "quadri/error.hpp"
#include "quadri/parallel.hpp"
#include "quadri/represent.hpp"

namespace quadri {

namespace {

double quad_phase(FrequencyPoint alpha, std::int64_t n) {
  return frac_product(alpha.alpha2, n * n) + frac_product(alpha.alpha1, n);
}

// Balanced weights f(n) = 1_A(n) - |A|/N as doubles, used by the search only.
struct Balanced {
  std::int64_t N = 0;
  std::vector<double> f;  // f[n - 1]

  explicit Balanced(const SubsetWindow& a) : N(a.n_max()), f(static_cast<std::size_t>(a.n_max())) {
    const double delta = a.density();
    for (std::int64_t n = 1; n <= N; ++n) f[static_cast<std::size_t>(n - 1)] = (a.contains(n) ? 1.0 : 0.0) - delta;
  }

  double magnitude(FrequencyPoint alpha, std::int64_t length) const {
    Complex total = 0;
    for (std::int64_t n = 1; n <= length; ++n) total += f[static_cast<std::size_t>(n - 1)] * unit_phase(quad_phase(alpha, n));
    return std::abs(total);
  }
};

struct Candidate {
  FrequencyPoint alpha;
  double magnitude = 0;
};

struct Fft {
  std::int64_t n;
  fftw_complex* probe;
  fftw_plan plan;
  explicit Fft(std::int64_t len) : n(len) {
    std::lock_guard lock(detail::fftw_planner_mutex());
    probe = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)));
    plan = fftw_plan_dft_1d(static_cast<int>(n), probe, probe, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(probe);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
};

struct Buffer {
  fftw_complex* data;
  std::int64_t n;
  explicit Buffer(std::int64_t len) : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(len)))), n(len) {}
  ~Buffer() { fftw_free(data); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  void clear() { std::fill_n(reinterpret_cast<double*>(data), 2 * n, 0.0); }
  // Index and squared modulus of the largest entry.
  std::pair<std::int64_t, double> argmax() const {
    std::int64_t best = 0;
    double best_v = -1;
    for (std::int64_t k = 0; k < n; ++k) {
      const double v = data[k][0] * data[k][0] + data[k][1] * data[k][1];
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
    return {best, best_v};
  }
};

// Full grid over (alpha1, alpha2) = (k / 8L, j / 8L^2) on the prefix n <= L.
// Returns the best alpha1 for every alpha2 row.
std::vector<Candidate> full_grid_rows(const Balanced& b, std::int64_t L) {
  const std::int64_t G1 = 8 * L, G2 = 8 * L * L;
  const std::vector<Complex> roots = roots_of_unity(G2);
  Fft fft(G1);
  std::vector<Candidate> rows(static_cast<std::size_t>(G2));
  const std::int64_t chunk = 64;
  parallel_for((G2 + chunk - 1) / chunk, [&](std::int64_t task) {
    Buffer buf(G1);
    for (std::int64_t j = task * chunk; j < std::min(G2, (task + 1) * chunk); ++j) {
      buf.clear();
      for (std::int64_t n = 1; n <= L; ++n) {
        const Complex z = b.f[static_cast<std::size_t>(n - 1)] * roots[static_cast<std::size_t>(j * n * n % G2)];
        buf.data[n % G1][0] += z.real();
        buf.data[n % G1][1] += z.imag();
      }
      fftw_execute_dft(fft.plan, buf.data, buf.data);
      auto [k, v] = buf.argmax();
      rows[static_cast<std::size_t>(j)] = {FrequencyPoint(static_cast<double>(k) / static_cast<double>(G1), static_cast<double>(j) / static_cast<double>(G2)), std::sqrt(v)};
    }
  });
  return rows;
}

// Best rows with neighbours within two rows suppressed.
std::vector<Candidate> top_rows(const std::vector<Candidate>& rows, int count) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return rows[x].magnitude > rows[y].magnitude; });
  std::vector<Candidate> out;
  std::vector<std::size_t> taken;
  const auto n = rows.size();
  for (std::size_t idx : order) {
    if (static_cast<int>(out.size()) >= count) break;
    bool near = false;
    for (std::size_t t : taken) {
      const std::size_t d = idx > t ? idx - t : t - idx;
      if (std::min(d, n - d) <= 2) near = true;
    }
    if (near) continue;
    taken.push_back(idx);
    out.push_back(rows[idx]);
  }
  return out;
}

// Moves to the best point of a (2r+1)^2 grid with the given spacings. Grid
// phases are built from per-n unit factors by repeated multiplication.
Candidate grid_step(const Balanced& b, Candidate c, std::int64_t length, double s1, double s2, int r) {
  const int side = 2 * r + 1;
  const auto len = static_cast<std::size_t>(length);
  std::vector<Complex> base(len), w(len), w_start(len);
  for (std::int64_t n = 1; n <= length; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    base[i] = b.f[i] * unit_phase(quad_phase(c.alpha, n));
    const double t = frac_product(s2, n * n);
    w[i] = unit_phase(t);
    w_start[i] = unit_phase(-r * t);
  }
  std::vector<Candidate> evals(static_cast<std::size_t>(side * side));
  parallel_for(side, [&](std::int64_t row) {
    const int di = static_cast<int>(row) - r;
    std::vector<Complex> acc(static_cast<std::size_t>(side), 0.0);
    for (std::int64_t n = 1; n <= length; ++n) {
      const auto i = static_cast<std::size_t>(n - 1);
      Complex z = base[i] * unit_phase(frac_product(di * s1, n)) * w_start[i];
      for (int j = 0; j < side; ++j) {
        acc[static_cast<std::size_t>(j)] += z;
        z *= w[i];
      }
    }
    for (int j = 0; j < side; ++j)
      evals[static_cast<std::size_t>(row * side + j)] = {FrequencyPoint(c.alpha.alpha1 + di * s1, c.alpha.alpha2 + (j - r) * s2),
                                                         std::abs(acc[static_cast<std::size_t>(j)])};
  });
  Candidate best = evals[static_cast<std::size_t>(r * side + r)];
  best.alpha = c.alpha;
  for (const auto& e : evals)
    if (e.magnitude > best.magnitude) best = e;
  return best;
}

Candidate refine_final(const Balanced& b, Candidate c) {
  const double n = static_cast<double>(b.N);
  double s1 = 1.0 / (8 * n), s2 = 1.0 / (8 * n * n);
  for (int level = 0; level < 3; ++level) {
    c = grid_step(b, c, b.N, s1, s2, 2);
    s1 /= 4;
    s2 /= 4;
  }
  return c;
}

}  // namespace

Complex balanced_sum(const SubsetWindow& a, FrequencyPoint alpha) {
  const std::int64_t N = a.n_max(), count = a.count();
  if (count == 0 || count == N) return 0.0;
  Complex in_a = 0, all = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    const Complex z = unit_phase(quad_phase(alpha, n));
    all += z;
    if (a.contains(n)) in_a += z;
  }
  // (|A| * S) / N keeps the alpha = 0 case exact.
  return in_a - (static_cast<double>(count) * all) / static_cast<double>(N);
}

SpectrumHit largest_fourier_coefficient(const SubsetWindow& a, const SearchOptions& options) {
  SpectrumHit hit;
  const std::int64_t N = a.n_max();
  if (N == 0 || a.count() == 0 || a.count() == N) return hit;
  Balanced b(a);
  std::vector<Candidate> pool;

  if (N <= options.full_grid_max_n) {
    pool = top_rows(full_grid_rows(b, N), options.prefix_candidates);
  } else {
    const std::int64_t L0 = std::min(N, options.prefix_length);
    for (Candidate c : top_rows(full_grid_rows(b, L0), options.prefix_candidates)) {
      // Each doubling halves the peak width; the previous estimate is within
      // one alpha1 step and two alpha2 steps of the new grid.
      for (std::int64_t L = std::min(N, 2 * L0);; L = std::min(N, 2 * L)) {
        const double l = static_cast<double>(L);
        c = grid_step(b, c, L, 1.0 / (4 * l), 1.0 / (4 * l * l), 3);
        if (L == N) break;
      }
      pool.push_back(c);
    }
  }

  // Rational alpha2 rows at full length.
  {
    const std::int64_t G1 = 8 * N;
    Fft fft(G1);
    std::vector<std::pair<std::int64_t, std::int64_t>> fractions;
    for (std::int64_t q = 1; q <= options.rational_q_max; ++q)
      for (std::int64_t r = 0; r < q; ++r)
        if (std::gcd(r, q) == 1) fractions.emplace_back(r, q);
    std::vector<Candidate> rows(fractions.size());
    parallel_for(static_cast<std::int64_t>(fractions.size()), [&](std::int64_t t) {
      const auto [r, q] = fractions[static_cast<std::size_t>(t)];
      const std::vector<Complex> roots = roots_of_unity(q);
      Buffer buf(G1);
      buf.clear();
      for (std::int64_t n = 1; n <= N; ++n) {
        const Complex z = b.f[static_cast<std::size_t>(n - 1)] * roots[static_cast<std::size_t>(r * (n % q) % q * (n % q) % q)];
        buf.data[n % G1][0] += z.real();
        buf.data[n % G1][1] += z.imag();
      }
      fftw_execute_dft(fft.plan, buf.data, buf.data);
      auto [k, v] = buf.argmax();
      rows[static_cast<std::size_t>(t)] = {FrequencyPoint(static_cast<double>(k) / static_cast<double>(G1), static_cast<double>(r) / static_cast<double>(q)), std::sqrt(v)};
    });
    pool.insert(pool.end(), rows.begin(), rows.end());
  }
  for (const FrequencyPoint& h : options.hints) pool.push_back({h, b.magnitude(h, N)});
  for (Candidate& c : pool) c.magnitude = b.magnitude(c.alpha, N);

  std::stable_sort(pool.begin(), pool.end(), [](const Candidate& x, const Candidate& y) { return x.magnitude > y.magnitude; });
  Candidate best{};
  const std::size_t refine = std::min<std::size_t>(pool.size(), 4);
  for (std::size_t i = 0; i < refine; ++i) {
    Candidate c = refine_final(b, pool[i]);
    if (c.magnitude > best.magnitude) best = c;
  }
  hit.alpha = best.alpha;
  hit.magnitude = std::abs(balanced_sum(a, best.alpha));
  hit.eta = hit.magnitude / static_cast<double>(N);
  return hit;
}

HeilbronnResult heilbronn_approx(double alpha2, std::int64_t Q) {
  if (Q < 1) fail(ErrorCode::InvalidArgument, "Q must be positive");
  HeilbronnResult out;
  out.value = 2.0;
  for (std::int64_t q = 1; q <= Q; ++q) {
    const double v = circle_norm(frac_product(alpha2, q * q));
    if (v < out.value) {
      out.value = v;
      out.q = q;
    }
  }
  out.within_bound = out.value <= kHeilbronnConstant * std::cbrt(1.0 / static_cast<double>(Q));
  return out;
}

DirichletResult dirichlet_approx(double beta, std::int64_t K) {
  if (K < 1) fail(ErrorCode::InvalidArgument, "K must be positive");
  auto R = static_cast<std::int64_t>(std::sqrt(static_cast<double>(K)));
  while (R * R > K) --R;
  while ((R + 1) * (R + 1) <= K) ++R;
  DirichletResult out;
  out.value = 2.0;
  for (std::int64_t r = 1; r <= R; ++r) {
    const double v = circle_norm(frac_product(beta, r));
    if (v < out.value) {
      out.value = v;
      out.r = r;
    }
  }
  if (out.value > 1.0 / static_cast<double>(R + 1) + 1e-12)
    fail(ErrorCode::AssertionFailed, "Dirichlet bound failed for beta = " + std::to_string(beta));
  return out;
}

std::int64_t increment_length_floor(double eta, std::int64_t N) {
  return static_cast<std::int64_t>(std::floor(eta * eta * std::pow(static_cast<double>(N), 1.0 / 16.0) / 256.0));
}

IncrementStep density_increment(const SubsetWindow& a, const SpectrumHit& hit) {
  const std::int64_t N = a.n_max(), count = a.count();
  if (!(hit.eta > 0) || N < 1) fail(ErrorCode::InvalidArgument, "density increment needs a hit with eta > 0");
  const FrequencyPoint alpha = hit.alpha;
  // The averaging argument needs |V_f(alpha)| >= eta N at the point itself.
  const double eta = std::min(hit.eta, std::abs(balanced_sum(a, alpha)) / static_cast<double>(N));
  if (!(eta > 0)) fail(ErrorCode::InvalidArgument, "balanced sum vanishes at the hit");
  const double allowed = eta / (4 * std::numbers::pi);
  const double tau = allowed * (1 - 1e-9);

  IncrementStep step;
  step.old_count = count;
  step.old_size = N;
  step.eta_used = eta;

  const auto Q = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(N), 0.75))));
  const HeilbronnResult heil = heilbronn_approx(alpha.alpha2, std::min(Q, N));
  const std::int64_t q = heil.q;
  step.heilbronn_q = q;
  // Quadratic drift over a block of K consecutive multiples of q.
  std::int64_t K = (N + q - 1) / q;
  if (heil.value > 0) {
    auto k = static_cast<std::int64_t>(std::floor(std::sqrt(0.5 * tau / heil.value))) + 1;
    while (k > 1 && static_cast<double>(k - 1) * static_cast<double>(k - 1) * heil.value > 0.5 * tau) --k;
    K = std::min(K, std::max<std::int64_t>(1, k));
  }
  step.block_length = K;

  bool have_best = false;
  Progression best{};
  std::int64_t best_count = 0;
  auto consider = [&](const Progression& p) {
    ++step.pieces;
    const double h0 = quad_phase(alpha, p.start);
    for (std::int64_t t = 1; t < p.length; ++t) {
      const double d = circle_norm(quad_phase(alpha, p.at(t)) - h0);
      step.max_variation = std::max(step.max_variation, d);
      if (d > allowed + 1e-12) {
        std::ostringstream msg;
        msg << "phase varies by " << d << " > " << allowed << " on progression start=" << p.start << " step=" << p.step
            << " length=" << p.length;
        fail(ErrorCode::AssertionFailed, msg.str());
      }
    }
    const std::int64_t c = a.count_in(p);
    const __int128 lhs = static_cast<__int128>(c) * (have_best ? best.length : 1);
    const __int128 rhs = static_cast<__int128>(best_count) * p.length;
    if (!have_best || lhs > rhs || (lhs == rhs && p.length > best.length)) {
      have_best = true;
      best = p;
      best_count = c;
    }
  };

  for (std::int64_t x = 1; x <= std::min(q, N); ++x) {
    const std::int64_t terms = (N - x) / q + 1;
    for (std::int64_t b0 = 0; b0 < terms; b0 += K) {
      const std::int64_t kb = std::min(K, terms - b0);
      const std::int64_t x0 = x + b0 * q;
      // Linear coefficient of the phase in the block index.
      const double beta = frac_product(alpha.alpha2, 2 * x0 * q) + frac_product(alpha.alpha1, q);
      const DirichletResult dir = dirichlet_approx(beta, kb);
      const std::int64_t r = dir.r;
      step.dirichlet_bound = std::max(step.dirichlet_bound, r);
      const double quad_drift = static_cast<double>(kb - 1) * static_cast<double>(kb - 1) * heil.value;
      const double room = std::max(0.0, tau - quad_drift);
      std::int64_t L = (kb + r - 1) / r;
      if (dir.value > 0) L = std::min(L, static_cast<std::int64_t>(std::floor(room / dir.value)) + 1);
      L = std::max<std::int64_t>(1, L);
      for (std::int64_t c = 0; c < std::min(r, kb); ++c) {
        const std::int64_t tc = (kb - 1 - c) / r + 1;
        for (std::int64_t t0 = 0; t0 < tc; t0 += L) {
          Progression p{x0 + (c + r * t0) * q, r * q, std::min(L, tc - t0)};
          consider(p);
        }
      }
    }
  }

  step.progression = best;
  step.new_count = best_count;
  step.new_size = best.length;
  // 4 (|A ∩ P| N - |A| |P|) >= eta N |P|.
  const __int128 gain = 4 * (static_cast<__int128>(best_count) * N - static_cast<__int128>(count) * best.length);
  const long double need = static_cast<long double>(eta) * N * best.length;
  if (static_cast<long double>(gain) < need) {
    std::ostringstream msg;
    msg << "best piece start=" << best.start << " step=" << best.step << " length=" << best.length << " holds "
        << best_count << " members; N=" << N << " |A|=" << count << " eta=" << eta << " q=" << q << " K=" << K
        << " pieces=" << step.pieces;
    fail(ErrorCode::NoQualifyingProgression, msg.str());
  }
  if (best.length < increment_length_floor(eta, N)) fail(ErrorCode::AssertionFailed, "progression shorter than the length floor");
  return step;
}

std::string_view stall_name(StallReason reason) {
  switch (reason) {
    case StallReason::SpectrumFlat: return "SpectrumFlat";
    case StallReason::WindowTooSmall: return "WindowTooSmall";
    case StallReason::MaxSteps: return "MaxSteps";
  }
  return "Unknown";
}

namespace {

// Ordered distinct k-tuples from m values, saturating at limit + 1.
std::int64_t ordered_tuples(std::int64_t m, std::int64_t k, std::int64_t limit) {
  std::int64_t total = 1;
  for (std::int64_t i = 0; i < k; ++i) {
    if (m - i <= 0) return 0;
    total *= m - i;
    if (total > limit) return limit + 1;
  }
  return total;
}

}  // namespace

RothOutcome roth_loop(const DiagonalSystem& sys, const SubsetWindow& a0, const RothOptions& options) {
  if (!sys.strict()) fail(ErrorCode::InvalidArgument, "the increment loop needs a strict system");
  std::int64_t pos = 0, neg = 0;
  for (std::int64_t l : sys.lambdas()) (l > 0 ? pos : neg) += 1;
  const std::int64_t side = std::max(pos, neg);

  RothOutcome out;
  SubsetWindow window = a0;
  // Window index k corresponds to original value offset + scale k.
  std::int64_t offset = 0, scale = 1;
  for (int iter = 0;; ++iter) {
    std::vector<std::int64_t> members = window.members();
    std::int64_t m = static_cast<std::int64_t>(members.size());
    while (m > 0 && ordered_tuples(m, side, options.witness_budget) > options.witness_budget) --m;
    members.resize(static_cast<std::size_t>(m));
    std::optional<std::vector<std::int64_t>> witness;
    if (m >= static_cast<std::int64_t>(sys.size())) {
      try {
        witness = find_nontrivial_solution(sys, members, options.witness_budget);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetExhausted) throw;
      }
    }
    if (witness) {
      std::vector<std::int64_t> x(witness->size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = offset + scale * (*witness)[i];
      bool members_ok = std::all_of(x.begin(), x.end(), [&](std::int64_t v) { return a0.contains(v); });
      if (!is_solution(sys, x) || is_trivial(x) || !members_ok)
        fail(ErrorCode::InvariantViolated, "pulled-back witness failed verification");
      out.found = true;
      out.solution = std::move(x);
      return out;
    }
    if (window.n_max() < options.length_min) {
      out.reason = StallReason::WindowTooSmall;
      return out;
    }
    if (iter >= options.max_steps) {
      out.reason = StallReason::MaxSteps;
      return out;
    }
    const SpectrumHit hit = largest_fourier_coefficient(window, options.search);
    if (hit.eta < options.eta_min) {
      out.reason = StallReason::SpectrumFlat;
      return out;
    }
    IncrementStep step = density_increment(window, hit);
    const Progression& p = step.progression;
    offset += scale * (p.start - p.step);
    scale *= p.step;
    window = restrict_and_rescale(window, p);
    out.trace.push_back(std::move(step));
  }
}

}  // namespace quadri
