// SPDX-License-Identifier: Apache-2.0
// quadri: experiment runner for diagonal translation-invariant quadratic systems.
#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quadri/circle.hpp"
#include "quadri/csv.hpp"
#include "quadri/error.hpp"
#include "quadri/increment.hpp"
#include "quadri/parallel.hpp"
#include "quadri/represent.hpp"
#include "quadri/restriction.hpp"
#include "quadri/rng.hpp"
#include "quadri/systems.hpp"
#include "verify.hpp"

using namespace quadri;

namespace {

constexpr int kExitConfig = 64;
constexpr int kExitStalled = 2;

struct RunConfig {
  std::string system = "1,1,1,1,-1,-1,-2";
  std::int64_t n = 0;
  std::string n_list;
  std::int64_t q = 0;  // 0: subcommand default
  double p = 7.0;
  std::uint64_t seed = 1;
  std::int64_t budget = 0;  // 0: subcommand default
  std::string out;
  unsigned workers = 0;
  bool strict = true;
  double eta_min = 0.05;
  std::int64_t length_min = 8;
  bool dry_run = false;
  // Subcommand knobs.
  std::string window = "full";
  bool table = false;
  bool brute = true;
  bool exact = true;
  std::string weights = "random-sign";
  int c1 = 2, c2 = 2;
  int k = 1;
  int max_steps = 32;
  bool quick = false;
  std::string integral = "montecarlo";
};

std::vector<std::int64_t> n_values(const RunConfig& c) {
  std::vector<std::int64_t> out;
  if (!c.n_list.empty()) {
    std::stringstream ss(c.n_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        const long long v = std::stoll(tok, &used);
        if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
        out.push_back(v);
      } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, "bad --n-list entry '" + tok + "'");
      }
    }
  } else if (c.n > 0) {
    out.push_back(c.n);
  }
  if (out.empty()) fail(ErrorCode::ConfigError, "--n or --n-list is required");
  return out;
}

std::int64_t single_n(const RunConfig& c) {
  const auto ns = n_values(c);
  if (ns.size() != 1) fail(ErrorCode::ConfigError, "this subcommand takes a single --n");
  return ns.front();
}

// Window syntax: full | mod:M:R | range:A:B | file:PATH (one member per line).
SubsetWindow parse_window(const std::string& text, std::int64_t N) {
  auto parts = std::vector<std::string>{};
  {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
  }
  auto as_int = [&](const std::string& s) -> std::int64_t {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigError, "bad window '" + text + "'");
    }
  };
  if (text == "full") return SubsetWindow::full(N);
  if (parts.size() == 3 && parts[0] == "mod") {
    const std::int64_t m = as_int(parts[1]), r = as_int(parts[2]);
    if (m < 1) fail(ErrorCode::ConfigError, "window modulus must be positive");
    return SubsetWindow::from_predicate(N, [&](std::int64_t n) { return ((n - r) % m + m) % m == 0; });
  }
  if (parts.size() == 3 && parts[0] == "range") {
    const std::int64_t a = as_int(parts[1]), b = as_int(parts[2]);
    return SubsetWindow::from_predicate(N, [&](std::int64_t n) { return n >= a && n <= b; });
  }
  if (parts.size() >= 2 && parts[0] == "file") {
    std::ifstream in(text.substr(5));
    if (!in) fail(ErrorCode::ConfigError, "cannot read window file '" + text.substr(5) + "'");
    std::vector<std::int64_t> members;
    std::int64_t v;
    while (in >> v) {
      if (v < 1 || v > N) fail(ErrorCode::ConfigError, "window member " + std::to_string(v) + " outside 1..N");
      members.push_back(v);
    }
    return SubsetWindow::from_members(N, members);
  }
  fail(ErrorCode::ConfigError, "bad window '" + text + "' (use full, mod:M:R, range:A:B or file:PATH)");
}

// Canonical text of everything that determines the CSV body.
std::string config_text(const std::string& sub, const RunConfig& c) {
  std::ostringstream s;
  s << "subcommand=" << sub << "\nsystem=" << c.system << "\nn=" << c.n << "\nn-list=" << c.n_list << "\nq=" << c.q
    << "\np=" << format_double(c.p) << "\nseed=" << c.seed << "\nbudget=" << c.budget << "\nstrict=" << c.strict
    << "\neta-min=" << format_double(c.eta_min) << "\nlength-min=" << c.length_min << "\nwindow=" << c.window
    << "\ntable=" << c.table << "\nbrute=" << c.brute << "\nexact=" << c.exact << "\nweights=" << c.weights
    << "\nc1=" << c.c1 << "\nc2=" << c.c2 << "\nk=" << c.k << "\nmax-steps=" << c.max_steps << "\nquick=" << c.quick
    << "\nintegral=" << c.integral << "\n";
  return s.str();
}

std::int64_t default_cutoff(std::int64_t N) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(N), 0.125) - 1e-12)));
}

std::string dstr(double x) { return format_double(x); }

// ---- subcommands ------------------------------------------------------------

int run_count(const RunConfig& c, const DiagonalSystem& sys, std::ostream& out) {
  const auto ns = n_values(c);
  if (c.table) {
    if (ns.size() != 1) fail(ErrorCode::ConfigError, "--table takes a single --n");
    CsvWriter csv(out, c.seed, config_text("count", c), "m1,m2,count");
    build_representation_table(ns.front()).for_each_nonzero([&](std::int64_t m1, std::int64_t m2, std::uint32_t v) {
      csv.row({std::to_string(m1), std::to_string(m2), std::to_string(v)});
    });
    return 0;
  }
  CsvWriter csv(out, c.seed, config_text("count", c), "N,Z,Z_A,nontrivial,brute_force");
  for (std::int64_t N : ns) {
    const Count z = count_solutions(sys, N);
    std::string za;
    if (c.window != "full") {
      const SubsetWindow w = parse_window(c.window, N);
      za = to_string(count_solutions(sys, N, &w));
    } else {
      za = to_string(z);
    }
    const Count nt = count_nontrivial(sys, N);
    std::string brute = "not_run";
    const double tuples = std::pow(static_cast<double>(N), static_cast<double>(sys.size()));
    if (c.brute && tuples <= 2e7) {
      std::vector<std::int64_t> x(sys.size(), 1);
      Count hits = 0;
      for (;;) {
        if (is_solution(sys, x)) ++hits;
        std::size_t i = 0;
        while (i < x.size() && ++x[i] > N) x[i++] = 1;
        if (i == x.size()) break;
      }
      brute = hits == z ? "agrees" : "DISAGREES";
      if (hits != z) fail(ErrorCode::InvariantViolated, "brute force gives " + to_string(hits));
    }
    csv.row({std::to_string(N), to_string(z), za, to_string(nt), brute});
  }
  return 0;
}

int run_predict(const RunConfig& c, const DiagonalSystem& sys, std::ostream& out) {
  CsvWriter csv(out, c.seed, config_text("predict", c), "N,Q,sing,sing_err,J,J_err,prediction,exact,rel_err");
  const std::int64_t Q = c.q > 0 ? c.q : 64;
  IntegralOptions opt;
  opt.seed = c.seed;
  opt.samples = c.budget > 0 ? c.budget : 1'000'000;
  if (c.integral == "quadrature") opt.method = IntegralMethod::Quadrature;
  else if (c.integral == "fejer") opt.method = IntegralMethod::Fejer;
  const SingularSeries series = singular_series(sys, Q);
  const SingularIntegral integral = singular_integral(sys, opt);
  for (std::int64_t N : n_values(c)) {
    const Prediction p = predict_Z(sys, N, series, integral);
    std::string exact, rel;
    if (c.exact) {
      const Count z = count_solutions(sys, N);
      exact = to_string(z);
      rel = dstr(std::abs(p.prediction - to_double(z)) / to_double(z));
    }
    csv.row({std::to_string(N), std::to_string(Q), dstr(series.value), dstr(series.tail_proxy), dstr(integral.value),
             dstr(integral.error), dstr(p.prediction), exact, rel});
  }
  return 0;
}

std::vector<Complex> make_weights(const std::string& kind, std::int64_t N, std::uint64_t seed) {
  CounterRng rng(seed, static_cast<std::uint64_t>(N));
  std::vector<Complex> g(static_cast<std::size_t>(N));
  for (auto& x : g) {
    if (kind == "ones") x = 1.0;
    else if (kind == "random-sign") x = (rng.next() >> 63) ? 1.0 : -1.0;
    else x = unit_phase(rng.uniform());
  }
  return g;
}

int run_moments(const RunConfig& c, std::ostream& out) {
  CsvWriter csv(out, c.seed, config_text("moments", c), "N,p,seed,moment,moment_over_N^{p-3},grid_c1,grid_c2,self_err");
  for (std::int64_t N : n_values(c)) {
    const std::vector<Complex> g = make_weights(c.weights, N, c.seed);
    const LpMoment m = lp_moment(g, c.p, MomentGridSpec{c.c1, c.c2});
    csv.row({std::to_string(N), dstr(c.p), std::to_string(c.seed), dstr(m.moment),
             dstr(m.moment / std::pow(static_cast<double>(N), c.p - 3)), std::to_string(c.c1), std::to_string(c.c2),
             dstr(m.self_err)});
  }
  return 0;
}

int run_decompose(const RunConfig& c, std::ostream& out) {
  const std::int64_t N = single_n(c);
  const std::int64_t Q = c.q > 0 ? c.q : default_cutoff(N);
  CsvWriter csv(out, c.seed, config_text("decompose", c), "Y,l2_over_N3,sup_times_Y32_over_N3,moment2k_over_N3");
  const Decomposition d = decompose_representation(N, Q);
  const double n3 = std::pow(static_cast<double>(N), 3);
  auto emit = [&](const DecompositionPiece& piece) {
    const PieceNorms norms = w_piece_sup_and_l2(piece, MomentGridSpec{c.c1, c.c2});
    const double y = piece.remainder ? 1.0 : static_cast<double>(piece.Y);
    csv.row({std::to_string(piece.Y), dstr(norms.l2sq / n3), dstr(norms.sup * std::pow(y, 1.5) / n3),
             dstr(piece_moment(piece, c.k) / n3)});
  };
  for (const auto& piece : d.pieces) emit(piece);
  emit(d.remainder);
  return 0;
}

int run_increment(const RunConfig& c, const DiagonalSystem& sys, std::ostream& out) {
  const std::int64_t N = single_n(c);
  const SubsetWindow a0 = parse_window(c.window, N);
  RothOptions opt;
  opt.eta_min = c.eta_min;
  opt.length_min = c.length_min;
  opt.max_steps = c.max_steps;
  if (c.budget > 0) opt.witness_budget = c.budget;
  const RothOutcome r = roth_loop(sys, a0, opt);
  CsvWriter csv(out, c.seed, config_text("increment", c), "step,start,step_size,length,old_density,new_density,eta");
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const IncrementStep& s = r.trace[i];
    csv.row({std::to_string(i + 1), std::to_string(s.progression.start), std::to_string(s.progression.step),
             std::to_string(s.progression.length), dstr(s.old_density()), dstr(s.new_density()), dstr(s.eta_used)});
  }
  if (r.found) {
    std::cerr << "found solution:";
    for (std::int64_t v : r.solution) std::cerr << ' ' << v;
    std::cerr << '\n';
    return 0;
  }
  std::cerr << "stalled: " << stall_name(r.reason) << '\n';
  return kExitStalled;
}

int run_verify(const RunConfig& c, std::ostream& out) {
  CsvWriter csv(out, c.seed, config_text("verify", c), "check,status,detail");
  int failed = 0;
  for (const auto& r : tools::run_invariant_suite(c.quick, c.seed)) {
    std::string detail = r.detail;
    for (char& ch : detail)
      if (ch == ',' || ch == '\n') ch = ';';
    csv.row({r.name, r.pass ? "pass" : "FAIL", detail});
    failed += !r.pass;
  }
  std::cerr << (failed ? std::to_string(failed) + " check(s) failed" : std::string("all checks passed")) << '\n';
  return failed ? 1 : 0;
}

int run_arcs(const RunConfig& c, std::ostream& out) {
  CsvWriter csv(out, c.seed, config_text("arcs", c),
                "N,Q,samples,minor_samples,sup,sup_over_N,sup_times_Q13_over_N,alpha1,alpha2");
  const std::int64_t samples = c.budget > 0 ? c.budget : 100'000;
  for (std::int64_t N : n_values(c)) {
    const std::int64_t Q = c.q > 0 ? c.q : default_cutoff(N);
    const MinorArcSup m = minor_arc_sup(N, Q, samples, c.seed);
    const double n = static_cast<double>(N);
    csv.row({std::to_string(N), std::to_string(Q), std::to_string(samples), std::to_string(m.minor_samples), dstr(m.sup),
             dstr(m.sup / n), dstr(m.sup * std::cbrt(static_cast<double>(Q)) / n), dstr(m.argmax.alpha1),
             dstr(m.argmax.alpha2)});
  }
  return 0;
}

// Checks module preconditions that can be tested without computing.
void validate(const std::string& sub, const RunConfig& c) {
  if (sub == "verify") return;
  n_values(c);
  if (c.q < 0 || c.budget < 0) fail(ErrorCode::ConfigError, "--q and --budget must be nonnegative");
  if (sub == "moments") {
    if (!(c.p > 2) || c.p > 16) fail(ErrorCode::ConfigError, "--p must lie in (2, 16]");
    if (c.weights != "ones" && c.weights != "random-sign" && c.weights != "random-phase")
      fail(ErrorCode::ConfigError, "--weights must be ones, random-sign or random-phase");
    if (c.c1 < 2 || c.c2 < 2) fail(ErrorCode::ConfigError, "--c1 and --c2 must be at least 2");
  }
  if (sub == "predict" && c.integral != "montecarlo" && c.integral != "quadrature" && c.integral != "fejer")
    fail(ErrorCode::ConfigError, "--integral must be montecarlo, quadrature or fejer");
  if (sub == "predict" && c.budget > 0 && c.budget < 100'000 && c.integral == "montecarlo")
    fail(ErrorCode::ConfigError, "--budget below the 1e5 Monte Carlo minimum");
  if (sub == "decompose" && c.k < 1) fail(ErrorCode::ConfigError, "--k must be positive");
  if (sub == "increment") {
    if (!c.strict) fail(ErrorCode::ConfigError, "increment needs a strict system");
    if (c.eta_min <= 0 || c.length_min < 1) fail(ErrorCode::ConfigError, "--eta-min and --length-min must be positive");
    parse_window(c.window, single_n(c));
  }
  if (sub == "count" && c.window != "full") parse_window(c.window, n_values(c).front());
}

void print_plan(const std::string& sub, const RunConfig& c, std::ostream& out) {
  out << "plan: " << sub << '\n' << config_text(sub, c) << "workers=" << worker_count() << '\n'
      << "output=" << (c.out.empty() ? "stdout" : c.out) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact counts, circle-method predictions, representation decompositions and density increments "
               "for diagonal translation-invariant quadratic systems."};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  // Values such as system = 1,1,-2 stay one string instead of becoming an array.
  app.get_config_formatter_base()->arrayDelimiter(';');

  RunConfig c;
  app.add_option("--system", c.system, "coefficients, e.g. 1,1,1,1,-1,-1,-2")->capture_default_str();
  app.add_option("--n", c.n, "N");
  app.add_option("--n-list", c.n_list, "comma-separated list of N");
  app.add_option("--q", c.q, "cutoff or truncation Q");
  app.add_option("--p", c.p, "moment exponent")->capture_default_str();
  app.add_option("--seed", c.seed, "seed")->capture_default_str();
  app.add_option("--budget", c.budget, "sample or search budget");
  app.add_option("--out", c.out, "output CSV path (default stdout)");
  app.add_option("--workers", c.workers, "worker threads (default: QUADRI_WORKERS, else hardware)");
  app.add_flag("--strict,!--no-strict", c.strict, "require translation invariance and the sign conditions");
  app.add_option("--eta-min", c.eta_min, "smallest Fourier bias the loop acts on")->capture_default_str();
  app.add_option("--length-min", c.length_min, "smallest window the loop continues on")->capture_default_str();
  app.add_flag("--dry-run", c.dry_run, "validate the configuration and print the plan");

  auto* count = app.add_subcommand("count", "exact solution counts");
  count->add_option("--window", c.window, "subset A: full, mod:M:R, range:A:B or file:PATH");
  count->add_flag("--table", c.table, "emit the representation table R(m) instead");
  count->add_flag("--brute,!--no-brute", c.brute, "cross-check by enumeration when N^s <= 2e7");
  auto* predict = app.add_subcommand("predict", "circle-method prediction against the exact count");
  predict->add_flag("--exact,!--no-exact", c.exact, "also compute the exact count");
  predict->add_option("--integral", c.integral, "montecarlo, quadrature or fejer");
  auto* moments = app.add_subcommand("moments", "L^p moments of weighted quadratic exponential sums");
  moments->add_option("--weights", c.weights, "ones, random-sign or random-phase");
  moments->add_option("--c1", c.c1, "alpha1 oversampling");
  moments->add_option("--c2", c.c2, "alpha2 oversampling");
  auto* decompose = app.add_subcommand("decompose", "major-arc pieces of the representation function");
  decompose->add_option("--k", c.k, "moment exponent: sum |R_Y|^{2k}");
  decompose->add_option("--c1", c.c1, "alpha1 oversampling");
  decompose->add_option("--c2", c.c2, "alpha2 oversampling");
  auto* increment = app.add_subcommand("increment", "density increment loop");
  increment->add_option("--window", c.window, "initial set A0: full, mod:M:R, range:A:B or file:PATH");
  increment->add_option("--max-steps", c.max_steps, "increment steps before giving up");
  auto* verify = app.add_subcommand("verify", "invariant suite with pass/fail summary");
  verify->add_flag("--quick", c.quick, "sub-minute subset");
  app.add_subcommand("arcs", "minor-arc supremum measurement");
  (void)count, (void)predict, (void)moments, (void)decompose, (void)increment, (void)verify;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  std::optional<DiagonalSystem> sys;
  try {
    if (c.workers > 0) set_worker_count(c.workers);
    sys = parse_system(c.system, c.strict);
    validate(sub, c);
  } catch (const Error& e) {
    std::cerr << "quadri: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }

  if (c.dry_run) {
    print_plan(sub, c, std::cout);
    return 0;
  }
  std::unique_ptr<std::ofstream> file;
  if (!c.out.empty()) {
    file = std::make_unique<std::ofstream>(c.out, std::ios::binary);
    if (!*file) {
      std::cerr << "quadri: ConfigError: cannot open " << c.out << '\n';
      return kExitConfig;
    }
  }
  std::ostream& out = file ? *file : std::cout;
  try {
    if (sub == "count") return run_count(c, *sys, out);
    if (sub == "predict") return run_predict(c, *sys, out);
    if (sub == "moments") return run_moments(c, out);
    if (sub == "decompose") return run_decompose(c, out);
    if (sub == "increment") return run_increment(c, *sys, out);
    if (sub == "verify") return run_verify(c, out);
    return run_arcs(c, out);
  } catch (const Error& e) {
    std::cerr << "quadri: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? kExitConfig : 1;
  } catch (const std::exception& e) {
    std::cerr << "quadri: " << e.what() << '\n';
    return 1;
  }
}
