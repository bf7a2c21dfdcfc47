#include "csrecon/solvers.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "csrecon/shrinkage.hpp"

namespace csrecon {

namespace {

void check_shapes(const IterateState& state, const ProblemInstance& instance) {
  if (state.x.size() != instance.n()) {
    throw std::invalid_argument("solver step: state.x has length " +
                                std::to_string(state.x.size()) + ", expected " +
                                std::to_string(instance.n()));
  }
}

Vector fresh_residual(const IterateState& state, const ProblemInstance& instance) {
  if (state.z_fresh && state.z.size() == instance.m()) return state.z;
  return residual(instance, state.x);
}

// q_i = (F^T r)_i / |F_i|^2, zero on degenerate columns.
Vector normalized_correlation(const ProblemInstance& instance, std::span<const double> r) {
  const SensingMatrix& F = instance.matrix;
  Vector q = F.multiply_transpose(r);
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = F.is_degenerate(i) ? 0.0 : q[i] / F.col_sq_norm(i);
  }
  return q;
}

double active_fraction(const ProblemInstance& instance, std::span<const double> argument,
                       double k) {
  const SensingMatrix& F = instance.matrix;
  double count = 0.0;
  for (std::size_t i = 0; i < argument.size(); ++i) {
    if (!F.is_degenerate(i)) count += soft_threshold_deriv(argument[i], k);
  }
  return count / static_cast<double>(instance.m());
}

// x_new = eta(q / scale + x; k), shared by the rescaled-residual variants.
void threshold_update(const IterateState& state, const ProblemInstance& instance,
                      std::span<const double> q, double scale, double k, StepOutcome& out) {
  const std::size_t n = instance.n();
  out.x_new.assign(n, 0.0);
  out.eta_argument.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (instance.matrix.is_degenerate(i)) {
      ++out.degenerate_hits;
      continue;
    }
    const double arg = q[i] / scale + state.x[i];
    out.eta_argument[i] = arg;
    out.x_new[i] = soft_threshold(arg, k);
  }
}

StepOutcome rescaled_step(const IterateState& state, const ProblemInstance& instance, double k,
                          double sign) {
  check_shapes(state, instance);
  StepOutcome out;
  out.z_new = fresh_residual(state, instance);
  const Vector q = normalized_correlation(instance, out.z_new);

  Vector argument(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) argument[i] = q[i] + state.x[i];
  const double gamma = active_fraction(instance, argument, k);

  const double denom = 1.0 + sign * gamma;
  if (std::abs(denom) < kDenominatorGuard) {
    std::ostringstream msg;
    msg << "residual rescaling denominator collapsed: 1 " << (sign > 0 ? "+" : "-")
        << " gamma = " << denom << " (gamma = " << gamma << ")";
    throw DivergenceError(msg.str());
  }
  out.gamma_used = gamma;
  out.z_hat_new = out.z_new;
  for (double& v : out.z_hat_new) v /= denom;
  threshold_update(state, instance, q, denom, k, out);
  return out;
}

}  // namespace

StepOutcome step_naive(const IterateState& state, const ProblemInstance& instance, double k) {
  check_shapes(state, instance);
  const SensingMatrix& F = instance.matrix;
  StepOutcome out;
  out.z_new = fresh_residual(state, instance);
  out.z_hat_new = out.z_new;
  const Vector corr = F.multiply_transpose(out.z_new);

  const std::size_t n = instance.n();
  out.x_new.assign(n, 0.0);
  out.eta_argument.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (F.is_degenerate(i)) {
      ++out.degenerate_hits;
      continue;
    }
    const double norm = F.col_sq_norm(i);
    const double arg = corr[i] + norm * state.x[i];
    out.eta_argument[i] = arg;
    out.x_new[i] = soft_threshold(arg, k) / norm;
  }
  return out;
}

StepOutcome step_partial_constant(const IterateState& state, const ProblemInstance& instance,
                                  double k, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("partition ratio gamma must be >= 0");
  StepOutcome out = step_naive(state, instance, k);
  const double keep = gamma / (1.0 + gamma);
  const double take = 1.0 / (1.0 + gamma);
  for (std::size_t i = 0; i < out.x_new.size(); ++i) {
    if (instance.matrix.is_degenerate(i)) continue;
    out.x_new[i] = keep * state.x[i] + take * out.x_new[i];
  }
  out.gamma_used = gamma;
  return out;
}

double gamma_step_dependent(const IterateState& state, const ProblemInstance& instance,
                            double k) {
  check_shapes(state, instance);
  const Vector z = fresh_residual(state, instance);
  Vector argument = normalized_correlation(instance, z);
  for (std::size_t i = 0; i < argument.size(); ++i) argument[i] += state.x[i];
  return active_fraction(instance, argument, k);
}

StepOutcome step_map_gamma(const IterateState& state, const ProblemInstance& instance,
                           double k) {
  return rescaled_step(state, instance, k, +1.0);
}

StepOutcome step_amp_external(const IterateState& state, const ProblemInstance& instance,
                              double k) {
  return rescaled_step(state, instance, k, -1.0);
}

StepOutcome step_amp(const IterateState& state, const ProblemInstance& instance, double k) {
  check_shapes(state, instance);
  const std::size_t n = instance.n();
  const std::size_t m = instance.m();

  Vector z_hat_prev = state.z_hat.size() == m ? state.z_hat : Vector(m, 0.0);

  double onsager = 0.0;
  if (state.amp_argument.size() == n) {
    onsager = active_fraction(instance, state.amp_argument, k);
  } else {
    Vector previous = normalized_correlation(instance, z_hat_prev);
    for (std::size_t j = 0; j < n; ++j) {
      previous[j] += state.x_prev.size() == n ? state.x_prev[j] : 0.0;
    }
    onsager = active_fraction(instance, previous, k);
  }

  StepOutcome out;
  out.z_new = fresh_residual(state, instance);
  out.z_hat_new.resize(m);
  for (std::size_t mu = 0; mu < m; ++mu) {
    out.z_hat_new[mu] = out.z_new[mu] + onsager * z_hat_prev[mu];
  }
  out.gamma_used = onsager;
  const Vector q = normalized_correlation(instance, out.z_hat_new);
  threshold_update(state, instance, q, 1.0, k, out);
  return out;
}

StepOutcome step(const IterateState& state, const ProblemInstance& instance,
                 const SolverConfig& config, double k) {
  switch (config.variant) {
    case Variant::Naive: return step_naive(state, instance, k);
    case Variant::PartialConstant: return step_partial_constant(state, instance, k, config.gamma);
    case Variant::PartialStepDependent: return step_map_gamma(state, instance, k);
    case Variant::AmpExternal: return step_amp_external(state, instance, k);
    case Variant::Amp: return step_amp(state, instance, k);
  }
  throw std::invalid_argument("unknown solver variant");
}

void advance(IterateState& state, StepOutcome&& outcome) {
  state.x_prev = std::move(state.x);
  state.x = std::move(outcome.x_new);
  state.z = std::move(outcome.z_new);
  state.z_fresh = false;
  state.z_hat_prev = std::move(state.z_hat);
  state.z_hat = std::move(outcome.z_hat_new);
  state.amp_argument = std::move(outcome.eta_argument);
  ++state.step;
}

RunResult run(const ProblemInstance& instance, const SolverConfig& config) {
  config.validate();
  RunResult result;
  result.variant = config.variant;
  result.seed = instance.seed;

  const bool has_step_gamma = config.variant == Variant::PartialStepDependent ||
                              config.variant == Variant::AmpExternal ||
                              config.variant == Variant::Amp;
  const double floor_stop = config.anneal.k_floor * (1.0 + 1e-12);

  IterateState state = IterateState::zeros(instance.n(), instance.m());
  double k = config.anneal.initial_k(instance);
  state.k_current = k;

  result.mse_trace.reserve(config.max_steps);
  result.k_trace.reserve(config.max_steps);

  for (std::size_t t = 1; t <= config.max_steps; ++t) {
    StepOutcome outcome;
    try {
      outcome = step(state, instance, config, k);
    } catch (const std::exception& e) {
      result.aborted = true;
      result.diagnostic = "step " + std::to_string(t) + ": " + e.what();
      break;
    }
    const double dx = max_abs_diff(outcome.x_new, state.x);
    const std::optional<double> gamma = outcome.gamma_used;
    result.degenerate_hits += outcome.degenerate_hits;
    advance(state, std::move(outcome));

    k = config.anneal.next(k);
    state.k_current = k;

    const double mse = mse_per_entry(state.x, instance.truth.values);
    result.mse_trace.push_back(mse);
    result.k_trace.push_back(k);
    if (has_step_gamma && gamma) result.gamma_trace.push_back(*gamma);
    result.steps_taken = t;

    if (!std::isfinite(mse) || mse > config.divergence_mse) {
      result.aborted = true;
      result.diagnostic = "step " + std::to_string(t) + ": diverged (mse " +
                          std::to_string(mse) + ")";
      break;
    }
    if (k <= floor_stop && dx < config.fixed_point_tol) break;
  }

  result.x_final = std::move(state.x);
  const double final_mse = mse_per_entry(result.x_final, instance.truth.values);
  result.success = final_mse < config.mse_success_threshold;
  result.residual_norm_final = norm2(residual(instance, result.x_final));
  if (result.degenerate_hits > 0 && result.diagnostic.empty()) {
    result.diagnostic = std::to_string(instance.matrix.degenerate_count()) +
                        " degenerate column(s) held at zero";
  }
  return result;
}

std::optional<std::size_t> steps_to_reach(std::span<const double> trace, double target) {
  for (std::size_t t = 0; t < trace.size(); ++t) {
    if (trace[t] <= target) return t + 1;
  }
  return std::nullopt;
}

}  // namespace csrecon
