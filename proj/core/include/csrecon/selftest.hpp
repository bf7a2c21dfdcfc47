#pragma once

// Fast invariant checks shared by the `selftest` CLI subcommand and the
// acceptance suite.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "csrecon/core_model.hpp"

namespace csrecon {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestOptions {
  std::size_t shrinkage_cases = 1000;
  std::size_t fixed_point_fixtures = 5;
  std::uint64_t seed = 20240601;
};

/// Lasso stationary point x* of the naive step at threshold `k_naive` on a
/// unit-column-norm Gaussian instance.
struct FixedPointFixture {
  ProblemInstance instance;
  double k_naive = 0.0;
  Vector x_star;
};

/// Builds a fixture by running the constant-ratio step with gamma = 4 at a
/// fixed threshold until the iterate stops moving. n = 40, m = 20, K = 4,
/// nonzeros at least 0.5 in magnitude; draws are repeated until the lasso
/// support equals the true support.
FixedPointFixture make_fixed_point_fixture(std::uint64_t seed, double k_naive = 0.01);

/// Threshold k at which the rescaled-residual step with the given sign
/// (+1 MAP, -1 external division) shares the fixture's fixed point, found as
/// the least self-consistent k = k_naive / (1 + sign * gamma(k)).
double rescaled_threshold(const FixedPointFixture& fixture, double sign);

std::vector<CheckResult> run_selftest(const SelftestOptions& options = {});

}  // namespace csrecon
