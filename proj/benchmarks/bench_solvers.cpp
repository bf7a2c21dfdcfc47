#include <benchmark/benchmark.h>

#include "csrecon/harness.hpp"
#include "csrecon/instance_gen.hpp"
#include "csrecon/l1_oracle.hpp"
#include "csrecon/phase_theory.hpp"
#include "csrecon/solvers.hpp"

using namespace csrecon;

namespace {

ProblemInstance instance(std::size_t n) {
  return make_instance(GenSpec::from_ratios(n, 0.5, 0.1, 42));
}

void BM_Multiply(benchmark::State& state) {
  const ProblemInstance p = instance(static_cast<std::size_t>(state.range(0)));
  Vector out(p.m());
  for (auto _ : state) {
    p.matrix.multiply(p.truth.values, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.m() * p.n()));
}
BENCHMARK(BM_Multiply)->Arg(500)->Arg(1000)->Arg(2000);

void BM_MultiplyTranspose(benchmark::State& state) {
  const ProblemInstance p = instance(static_cast<std::size_t>(state.range(0)));
  Vector out(p.n());
  for (auto _ : state) {
    p.matrix.multiply_transpose(p.y, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.m() * p.n()));
}
BENCHMARK(BM_MultiplyTranspose)->Arg(500)->Arg(1000)->Arg(2000);

template <Variant V>
void BM_Step(benchmark::State& state) {
  const ProblemInstance p = instance(static_cast<std::size_t>(state.range(0)));
  SolverConfig c;
  c.variant = V;
  IterateState s = IterateState::zeros(p.n(), p.m());
  const double k = 0.5 * c.anneal.initial_k(p);
  for (int t = 0; t < 5; ++t) advance(s, step(s, p, c, k));
  for (auto _ : state) {
    StepOutcome o = step(s, p, c, k);
    benchmark::DoNotOptimize(o.x_new.data());
  }
}
BENCHMARK(BM_Step<Variant::Naive>)->Arg(500)->Arg(1000);
BENCHMARK(BM_Step<Variant::PartialConstant>)->Arg(500)->Arg(1000);
BENCHMARK(BM_Step<Variant::PartialStepDependent>)->Arg(500)->Arg(1000);
BENCHMARK(BM_Step<Variant::Amp>)->Arg(500)->Arg(1000);

void BM_DeskRun(benchmark::State& state) {
  const ProblemInstance p = instance(500);
  const SolverConfig c = desk_solver_config(Variant::PartialStepDependent);
  for (auto _ : state) benchmark::DoNotOptimize(run(p, c).success);
}
BENCHMARK(BM_DeskRun)->Unit(benchmark::kMillisecond);

void BM_ThresholdCurve(benchmark::State& state) {
  const std::vector<double> grid = default_alpha_grid();
  for (auto _ : state) benchmark::DoNotOptimize(threshold_curve(grid).size());
}
BENCHMARK(BM_ThresholdCurve)->Unit(benchmark::kMillisecond);

void BM_OracleLp(benchmark::State& state) {
  GenSpec g;
  g.n = static_cast<std::size_t>(state.range(0));
  g.m = g.n / 2;
  g.k_nonzeros = g.n / 10;
  g.seed = 3;
  const ProblemInstance p = make_instance(g);
  for (auto _ : state) benchmark::DoNotOptimize(l1_min_lp(p).objective);
}
BENCHMARK(BM_OracleLp)->Arg(12)->Arg(40)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
