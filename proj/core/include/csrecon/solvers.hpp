#pragma once

// Iterative reconstruction steps derived from the stationary condition of
// the l1-regularised posterior, plus the shared annealing driver.
//
// Every step reads x^(t-1) from the state, computes the residual
// z = y - F x^(t-1) first, then the partition ratio (where the variant has
// one), and finally the new iterate. For general F the argument of the
// threshold is normalised per column:
//
//   q_i = (F^T r)_i / |F_i|^2 + x_i^(t-1)
//
// which reduces to F^T r + x when columns have unit norm. Columns with
// squared norm below kDegenerateColumnTol are held at zero and counted.

#include <optional>
#include <stdexcept>

#include "csrecon/core_model.hpp"

namespace csrecon {

/// Raised when a rescaling denominator (1 + gamma or 1 - gamma) collapses.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDenominatorGuard = 1e-9;

struct StepOutcome {
  Vector x_new;      // length N
  Vector z_new;      // residual y - F x^(t-1), length M
  Vector z_hat_new;  // rescaled residual, length M
  std::optional<double> gamma_used;
  /// Threshold argument used for x_new; the next AMP step reuses it for the
  /// Onsager sum.
  Vector eta_argument;
  std::size_t degenerate_hits = 0;
};

/// Full update: x_i = eta((F^T z)_i + |F_i|^2 x_i; k) / |F_i|^2.
StepOutcome step_naive(const IterateState& state, const ProblemInstance& instance, double k);

/// Jacobi-style partial update with a constant partition ratio:
/// x_new = gamma/(1+gamma) x + 1/(1+gamma) naive(x). gamma = 0 is step_naive.
StepOutcome step_partial_constant(const IterateState& state, const ProblemInstance& instance,
                                  double k, double gamma);

/// gamma(t) = (1/M) sum_i eta'(q_i; k) with q built from the fresh residual.
/// Uses state.z when state.z_fresh is set, otherwise recomputes it.
double gamma_step_dependent(const IterateState& state, const ProblemInstance& instance,
                            double k);

/// MAP with step-dependent partition ratio: z_hat = z / (1 + gamma(t)),
/// x_new = eta(F^T z_hat / |F|^2 + x; k).
StepOutcome step_map_gamma(const IterateState& state, const ProblemInstance& instance,
                           double k);

/// Same as step_map_gamma with the external division z_hat = z / (1 - gamma(t)).
/// Throws DivergenceError when |1 - gamma(t)| < kDenominatorGuard.
StepOutcome step_amp_external(const IterateState& state, const ProblemInstance& instance,
                              double k);

/// AMP: z_hat = z + z_hat^(t-1) * (1/M) sum_j eta'(F^T z_hat^(t-1)/|F_j|^2 +
/// x_j^(t-2); k), then x_new = eta(F^T z_hat / |F|^2 + x; k). The Onsager
/// scalar is reported as gamma_used.
StepOutcome step_amp(const IterateState& state, const ProblemInstance& instance, double k);

/// Dispatches on config.variant.
StepOutcome step(const IterateState& state, const ProblemInstance& instance,
                 const SolverConfig& config, double k);

/// Moves the outcome into the state and shifts the one-step history.
void advance(IterateState& state, StepOutcome&& outcome);

/// Annealed run from x = 0. Step errors and divergence end the run with
/// success = false and a diagnostic; invalid configs throw
/// std::invalid_argument.
RunResult run(const ProblemInstance& instance, const SolverConfig& config);

/// First 1-based step whose trace value is <= target, if any.
std::optional<std::size_t> steps_to_reach(std::span<const double> trace, double target);

}  // namespace csrecon
