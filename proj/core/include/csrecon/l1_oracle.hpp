#pragma once

// Exact basis-pursuit solutions (min |x|_1 s.t. F x = y) for small
// instances, used as ground truth for the iterative solvers.

#include <cstddef>
#include <string>
#include <string_view>

#include "csrecon/core_model.hpp"

namespace csrecon {

enum class LpStatus { Optimal, Infeasible, Unbounded, DegenerateTie };

std::string_view lp_status_name(LpStatus s) noexcept;

struct LpSolution {
  Vector x_star;
  double objective = 0.0;
  LpStatus status = LpStatus::Infeasible;
  std::size_t iterations = 0;
  std::string diagnostic;

  bool has_solution() const noexcept {
    return status == LpStatus::Optimal || status == LpStatus::DegenerateTie;
  }
};

/// Largest instance size accepted by l1_min_lp.
inline constexpr std::size_t kLpMaxN = 200;

/// Two-phase primal simplex on min sum(u + v) s.t. F (u - v) = y, u, v >= 0,
/// with Bland's rule. Rank-deficient F yields Infeasible with a diagnostic;
/// exceeding 50 (N + M) pivots throws std::runtime_error. An optimal
/// neighbouring basis with a different x is reported as DegenerateTie.
LpSolution l1_min_lp(const ProblemInstance& instance);

/// Brute force over all M-column subsets with nonsingular F_S (pivot
/// tolerance 1e-10). Requires N <= 20 and M <= 12.
LpSolution l1_min_enum(const ProblemInstance& instance);

/// Row rank of F by Gaussian elimination with partial pivoting.
std::size_t matrix_rank(const SensingMatrix& matrix, double pivot_tol = 1e-10);

}  // namespace csrecon
