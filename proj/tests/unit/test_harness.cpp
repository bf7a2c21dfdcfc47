#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "csrecon/harness.hpp"
#include "csrecon/phase_theory.hpp"

using namespace csrecon;

namespace {

PhaseGridSpec small_grid() {
  PhaseGridSpec s;
  s.n = 60;
  s.alpha_grid = {0.5};
  s.rho_grid = {0.0, 0.1};
  s.trials = 3;
  s.solver = desk_solver_config(Variant::PartialStepDependent);
  s.solver.max_steps = 300;
  s.base_seed = 21;
  return s;
}

}  // namespace

TEST_CASE("grid parsing") {
  CHECK(parse_grid("0.1,0.2") == std::vector<double>{0.1, 0.2});
  const auto r = parse_grid("0.1:0.5:0.1");
  REQUIRE(r.size() == 5);
  CHECK(r.back() == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_grid("0.1:x:0.1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid(""), std::invalid_argument);
}

TEST_CASE("schedule presets") {
  CHECK(tail_auto_scale(0.999, 2000) == doctest::Approx(std::pow(0.999, 3000)));
  CHECK(tail_auto_scale(0.999, 6000) == 1.0);
  CHECK(std::pow(compressed_decay(2000), 2000) == doctest::Approx(std::pow(0.999, 5000)));
  CHECK(compressed_decay(5000) == 0.999);
  const SolverConfig d = desk_solver_config(Variant::Amp);
  CHECK(d.max_steps == 2000);
  CHECK_FALSE(d.anneal.k0.has_value());
  CHECK(paper_solver_config(Variant::Amp).max_steps == kReferenceSteps);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](const auto& h) { return h.load() == 1; }));
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("phase sweep") {
  PhaseGridSpec s = small_grid();
  const auto cells = phase_sweep(s);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].k == 0);
  CHECK(cells[0].rate == 1.0);
  for (const PhaseCell& c : cells) {
    CHECK(c.successes <= c.trials);
    CHECK(c.rate == doctest::Approx(static_cast<double>(c.successes) / c.trials));
  }

  const std::string csv = phase_csv(cells, s.solver.mse_success_threshold);
  CHECK(csv.rfind("# mse_success_threshold=0.001\n"
                  "alpha,rho,m,k,trials,successes,rate,mean_steps\n",
                  0) == 0);
  CHECK(csv == phase_csv(phase_sweep(s), s.solver.mse_success_threshold));
  s.jobs = 3;
  CHECK(csv == phase_csv(phase_sweep(s), s.solver.mse_success_threshold));

  PhaseGridSpec reversed = small_grid();
  reversed.rho_grid = {0.1, 0.0};
  const auto back = phase_sweep(reversed);
  CHECK(back[0].successes == cells[1].successes);
  CHECK(back[0].mean_steps == cells[1].mean_steps);
}

TEST_CASE("failure region") {
  PhaseGridSpec s = small_grid();
  s.n = 100;
  s.rho_grid = {0.45};
  s.solver.max_steps = 20;
  CHECK(phase_sweep(s)[0].rate <= 0.1);
}

TEST_CASE("phase grid validation") {
  PhaseGridSpec s = small_grid();
  s.trials = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_grid();
  s.alpha_grid = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_grid();
  s.alpha_grid = {1.2};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("convergence compare") {
  ConvergenceSpec s;
  s.n = 100;
  s.m = 50;
  s.k_nonzeros = 5;
  s.trials = 3;
  s.max_steps = 60;
  SolverConfig amp;
  amp.variant = Variant::Amp;
  s.solvers = {amp, amp};
  const ConvergenceReport r = convergence_compare(s);
  REQUIRE(r.mean_mse.size() == 2);
  CHECK(r.mean_mse[0] == r.mean_mse[1]);
  CHECK(r.mean_mse[0].size() == 60);

  const std::string csv = convergence_csv(r);
  CHECK(csv.rfind("step,mse_amp,mse_amp\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);

  SolverConfig slow;
  slow.variant = Variant::PartialStepDependent;
  slow.anneal.decay = 1.0;
  s.solvers = {slow};
  s.decay = 1.0;
  s.max_steps = 25;
  const ConvergenceReport flat = convergence_compare(s);
  CHECK(flat.mean_mse[0].size() == 25);
  CHECK(median_steps_to(flat.trial_mse[0], 1e-6) == 26.0);
}

TEST_CASE("median steps and formatting") {
  const std::vector<Vector> traces{{1, 1e-7, 1e-8}, {1, 1, 1e-7}, {1, 1, 1}};
  CHECK(median_steps_to(traces, 1e-6) == 3.0);
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(1.0 / 3.0) == "0.333333333333");

  const std::vector<ThresholdPoint> pts{{0.5, 0.2, 0.9}};
  CHECK(threshold_csv(pts) == "alpha,rho_c,z_star\n0.5,0.2,0.9\n");
}
