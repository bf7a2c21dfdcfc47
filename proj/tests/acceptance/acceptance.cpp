// Acceptance gate: one PASS/FAIL line per criterion.
//   csrecon_acceptance            all criteria
//   csrecon_acceptance 3 5        selected criteria

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "csrecon/harness.hpp"
#include "csrecon/instance_gen.hpp"
#include "csrecon/l1_oracle.hpp"
#include "csrecon/phase_theory.hpp"
#include "csrecon/selftest.hpp"
#include "csrecon/solvers.hpp"

using namespace csrecon;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

constexpr std::uint64_t kOracleSeed = 20240601;
constexpr std::uint64_t kPhaseSeed = 77;
constexpr double kAlpha = 0.5;

ProblemInstance oracle_instance(std::size_t i) {
  GenSpec g;
  g.n = 12;
  g.m = 6;
  g.k_nonzeros = 2;
  g.seed = keyed_hash(kOracleSeed, "oracle", i);
  return make_instance(g);
}

double feasibility(const ProblemInstance& inst, const Vector& x) {
  return max_abs(residual(inst, x));
}

PhaseCell cell(const SolverConfig& solver, double rho, double keep = 1.0) {
  PhaseGridSpec spec;
  spec.n = 500;
  spec.alpha_grid = {kAlpha};
  spec.rho_grid = {rho};
  spec.trials = 20;
  spec.solver = solver;
  spec.base_seed = kPhaseSeed;
  spec.jobs = jobs();
  if (keep < 1.0) {
    spec.matrix_kind = MatrixKind::SparsifiedGauss;
    spec.keep_fraction = keep;
  }
  return evaluate_cell(spec, kAlpha, rho);
}

Verdict threshold_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  double at = 0.0;
  for (double a : default_alpha_grid()) {
    const double d = std::abs(amp_threshold_rho(a).rho_c - replica_threshold_rho(a).rho_c);
    if (d > worst) {
      worst = d;
      at = a;
    }
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 5.0,
          fmt("max |drho| = %.3g at alpha = %.2f, %.2f s", worst, at, secs)};
}

Verdict oracle_agreement() {
  const auto t0 = Clock::now();
  double gap = 0.0;
  double infeas = 0.0;
  std::size_t missing = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const ProblemInstance inst = oracle_instance(i);
    const LpSolution lp = l1_min_lp(inst);
    const LpSolution en = l1_min_enum(inst);
    if (!lp.has_solution() || !en.has_solution()) {
      ++missing;
      continue;
    }
    gap = std::max(gap, std::abs(lp.objective - en.objective));
    infeas = std::max({infeas, feasibility(inst, lp.x_star), feasibility(inst, en.x_star)});
  }
  const double secs = seconds_since(t0);
  return {missing == 0 && gap <= 1e-9 && infeas <= 1e-8 && secs < 10.0,
          fmt("objective gap %.3g, infeasibility %.3g, %zu unsolved, %.2f s", gap, infeas,
              missing, secs)};
}

Verdict solver_matches_oracle() {
  const SolverConfig c = tail_solver_config(Variant::PartialConstant, 1.0, 2000, 0.999);
  std::size_t eligible = 0;
  std::size_t recovered = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const ProblemInstance inst = oracle_instance(i);
    const LpSolution en = l1_min_enum(inst);
    if (en.status != LpStatus::Optimal) continue;
    if (max_abs_diff(en.x_star, inst.truth.values) > 1e-9) continue;
    ++eligible;
    const RunResult r = run(inst, c);
    if (!r.aborted && mse_per_entry(r.x_final, en.x_star) < 1e-6) ++recovered;
  }
  const double rate = eligible ? static_cast<double>(recovered) / eligible : 0.0;
  return {eligible > 0 && rate >= 0.9,
          fmt("%zu/%zu unique-optimum instances recovered (%.0f%%, need >= 90%%)", recovered,
              eligible, 100.0 * rate)};
}

Verdict phase_bracketing() {
  const auto t0 = Clock::now();
  const double rc = amp_threshold_rho(kAlpha).rho_c;
  const SolverConfig c = tail_solver_config(Variant::PartialStepDependent, 1.0, 2000, 0.999);
  const PhaseCell lo = cell(c, 0.5 * rc);
  const PhaseCell hi = cell(c, 1.5 * rc);
  const double secs = seconds_since(t0);
  return {lo.rate >= 0.9 && hi.rate <= 0.1 && secs <= 600.0,
          fmt("rate %.2f at 0.5 rho_c (K=%zu), %.2f at 1.5 rho_c (K=%zu), %.1f s", lo.rate, lo.k,
              hi.rate, hi.k, secs)};
}

Verdict naive_below_partial() {
  const double rho = 0.9 * amp_threshold_rho(kAlpha).rho_c;
  const PhaseCell naive = cell(paper_solver_config(Variant::Naive), rho);
  const PhaseCell partial = cell(paper_solver_config(Variant::PartialConstant, 1.0), rho);
  return {naive.rate < partial.rate && naive.rate <= 0.5,
          fmt("naive %.2f, partial(gamma=1) %.2f at 0.9 rho_c (K=%zu)", naive.rate, partial.rate,
              naive.k)};
}

Verdict sparsified_universality() {
  const double rho = 0.5 * amp_threshold_rho(kAlpha).rho_c;
  SolverConfig c = paper_solver_config(Variant::PartialConstant, 1.0);
  c.max_steps = 10000;
  const PhaseCell p = cell(c, rho, 0.1);
  return {p.rate >= 0.8, fmt("rate %.2f with keep_fraction 0.1 at 0.5 rho_c (K=%zu)", p.rate, p.k)};
}

Verdict convergence_ordering() {
  const auto t0 = Clock::now();
  ConvergenceSpec spec;
  spec.base_seed = kPhaseSeed;
  spec.jobs = jobs();
  SolverConfig amp;
  amp.variant = Variant::Amp;
  SolverConfig map;
  map.variant = Variant::PartialStepDependent;
  spec.solvers = {amp, map};
  const ConvergenceReport r = convergence_compare(spec);
  const double amp_steps = median_steps_to(r.trial_mse[0], 1e-6);
  const double map_steps = median_steps_to(r.trial_mse[1], 1e-6);
  const double secs = seconds_since(t0);
  return {amp_steps < map_steps && amp_steps <= static_cast<double>(spec.max_steps) &&
              secs <= 600.0,
          fmt("median steps to MSE <= 1e-6: amp %.1f, map-gamma %.1f, %.1f s", amp_steps,
              map_steps, secs)};
}

Verdict invariant_suites() {
  const auto t0 = Clock::now();
  SelftestOptions o;
  o.shrinkage_cases = 10000;
  o.fixed_point_fixtures = 20;
  std::string failed;
  std::size_t count = 0;
  for (const CheckResult& c : run_selftest(o)) {
    ++count;
    if (!c.passed) failed += (failed.empty() ? "" : "; ") + c.name + " " + c.detail;
  }
  const double secs = seconds_since(t0);
  if (!failed.empty()) return {false, "failed: " + failed};
  return {secs < 30.0, fmt("%zu checks, %.2f s", count, secs)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "threshold equivalence", threshold_equivalence},
      {2, "oracle agreement", oracle_agreement},
      {3, "solver vs oracle l1 equivalence", solver_matches_oracle},
      {4, "phase-diagram bracketing", phase_bracketing},
      {5, "naive vs partial ordering", naive_below_partial},
      {6, "sparsified-F universality", sparsified_universality},
      {7, "convergence ordering", convergence_ordering},
      {8, "invariant suites", invariant_suites},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", v.passed ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str());
    std::fflush(stdout);
    failures += v.passed ? 0 : 1;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
