#pragma once

// Reconstruction-threshold curves rho_c(alpha) for l1 recovery with i.i.d.
// Gaussian F, from two closed-form characterisations: a maximisation over
// an auxiliary z, and a root-finding pair in (rho, z).

#include <span>
#include <vector>

namespace csrecon {

struct ThresholdPoint {
  double alpha = 0.0;
  double rho_c = 0.0;
  double z_star = 0.0;
};

/// erfc(x), relative accuracy ~1e-13 on |x| <= 6. Power series below
/// |x| = 2, Lentz continued fraction above; reflection for negative x.
double erfc_accurate(double x);

/// Standard normal density.
double gauss_density(double z);

/// H(z) = P(N(0,1) > z) = erfc(z / sqrt 2) / 2.
double gauss_upper_tail(double z);

/// Objective maximised over z >= 0; rho_c = alpha * max g. Returns NaN where
/// the expression is undefined (z = 0).
double amp_threshold_objective(double alpha, double z);

/// Left-hand side of the replica root equation
/// 2 (1 - rho) (H(z) - phi(z) / z) + rho.
double replica_root_function(double rho, double z);

/// rho_c at the given alpha in (0.01, 0.99): dense grid over z in [0, 10]
/// then golden-section refinement. Throws std::invalid_argument out of range
/// and std::runtime_error if the maximiser sits on the grid boundary.
ThresholdPoint amp_threshold_rho(double alpha);

/// Solves the replica root equation for z > 0 at rho in [0.001, 0.999] by
/// bisection and returns alpha = 2 (1 - rho) H(z) + rho.
ThresholdPoint replica_threshold_alpha(double rho);

/// Inverse of replica_threshold_alpha in rho, by bisection on
/// (0.001, 0.999).
ThresholdPoint replica_threshold_rho(double alpha);

/// amp_threshold_rho over each alpha, sorted by alpha.
std::vector<ThresholdPoint> threshold_curve(std::span<const double> alphas);

/// 0.05, 0.10, ..., 0.95.
std::vector<double> default_alpha_grid();

}  // namespace csrecon
