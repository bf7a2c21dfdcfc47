#pragma once

// Experiment orchestration: success-rate phase diagrams over (alpha, rho)
// and averaged convergence traces, with keyed per-trial seeding so results
// are independent of evaluation order and worker count.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "csrecon/core_model.hpp"
#include "csrecon/instance_gen.hpp"
#include "csrecon/phase_theory.hpp"

namespace csrecon {

/// Step budget of the full-scale reconstruction-threshold protocol.
inline constexpr std::size_t kReferenceSteps = 5000;

/// Auto-k0 multiplier that makes a `steps`-long run follow the last `steps`
/// of a `reference_steps`-long schedule with the same decay.
double tail_auto_scale(double decay, std::size_t steps,
                       std::size_t reference_steps = kReferenceSteps);

/// Decay that takes the reference schedule's start to its end in `steps`.
double compressed_decay(std::size_t steps, double reference_decay = 0.999,
                        std::size_t reference_steps = kReferenceSteps);

/// Desk-scale defaults: 2000 steps, Auto k0, compressed decay.
SolverConfig desk_solver_config(Variant variant, double gamma = 1.0);
/// Fixed decay over a short budget: runs the last `steps` of the reference
/// schedule. Only stable for variants that tolerate a small starting
/// threshold (the step-dependent MAP update).
SolverConfig tail_solver_config(Variant variant, double gamma = 1.0, std::size_t steps = 2000,
                                double decay = 0.999);
/// Full-scale defaults: 5000 steps, decay 0.999, Auto k0.
SolverConfig paper_solver_config(Variant variant, double gamma = 1.0);

/// "a,b,c" or "min:max:step" (inclusive of max within half a step).
std::vector<double> parse_grid(std::string_view text);

/// Runs fn(0..count-1) on up to `jobs` threads. The first exception thrown
/// by any task is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

struct PhaseGridSpec {
  std::size_t n = 500;
  std::vector<double> alpha_grid;
  std::vector<double> rho_grid;
  std::size_t trials = 20;
  SolverConfig solver;
  std::uint64_t base_seed = 0;
  MatrixKind matrix_kind = MatrixKind::DenseGauss;
  double keep_fraction = 1.0;
  std::size_t jobs = 1;

  void validate() const;
};

struct PhaseCell {
  double alpha = 0.0;
  double rho = 0.0;
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0.0;
  double mean_steps = 0.0;
};

/// hash(base_seed, m, k, trial).
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t m, std::size_t k,
                        std::size_t trial) noexcept;

/// One cell: `trials` seeded instances at (m, k) through solvers::run.
PhaseCell evaluate_cell(const PhaseGridSpec& spec, double alpha, double rho);

/// All cells, rho varying fastest within each alpha.
std::vector<PhaseCell> phase_sweep(const PhaseGridSpec& spec);

inline constexpr std::string_view kPhaseCsvHeader =
    "alpha,rho,m,k,trials,successes,rate,mean_steps";
inline constexpr std::string_view kThresholdCsvHeader = "alpha,rho_c,z_star";

/// Leading "# mse_success_threshold=..." line, header, one row per cell.
std::string phase_csv(const std::vector<PhaseCell>& cells, double mse_success_threshold);

struct ConvergenceSpec {
  std::size_t n = 1000;
  std::size_t m = 500;
  std::size_t k_nonzeros = 50;
  std::size_t trials = 20;
  double decay = 0.95;
  std::size_t max_steps = 400;
  std::vector<SolverConfig> solvers;
  std::uint64_t base_seed = 0;
  MatrixKind matrix_kind = MatrixKind::DenseGauss;
  double keep_fraction = 1.0;
  std::size_t jobs = 1;

  void validate() const;
};

struct ConvergenceReport {
  std::vector<std::string> labels;
  /// Per solver, pointwise mean over trials; length max_steps.
  std::vector<Vector> mean_mse;
  /// Per solver, per trial MSE trace padded with its last value to max_steps.
  std::vector<std::vector<Vector>> trial_mse;
  std::vector<std::vector<bool>> trial_success;
};

std::uint64_t convergence_seed(std::uint64_t base_seed, std::size_t trial) noexcept;

/// Every solver runs on the same seeded instances; decay and max_steps from
/// the spec override each solver's own schedule.
ConvergenceReport convergence_compare(const ConvergenceSpec& spec);

/// "step,mse_<label>..." then one row per step.
std::string convergence_csv(const ConvergenceReport& report);

/// "alpha,rho_c,z_star" then one row per point.
std::string threshold_csv(const std::vector<ThresholdPoint>& points);

/// Median over trials of the first step with MSE <= target. Trials that never
/// reach it count as max_steps + 1.
double median_steps_to(const std::vector<Vector>& trial_traces, double target);

/// 12 significant digits, as used by every CSV emitter.
std::string format_real(double v);

}  // namespace csrecon
