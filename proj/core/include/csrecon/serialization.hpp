#pragma once

// JSON documents for instances, run results, LP solutions and generator
// specs. Doubles are written with round-trip precision, so parsing an emitted
// document reproduces every finite value bit for bit.

#include <string>
#include <string_view>

#include "csrecon/core_model.hpp"
#include "csrecon/instance_gen.hpp"
#include "csrecon/l1_oracle.hpp"

namespace csrecon {

/// {m, n, seed, matrix (row-major), x0 ([index, value] pairs), y, tags}
std::string instance_to_json(const ProblemInstance& instance);
/// Throws std::invalid_argument on malformed documents.
ProblemInstance instance_from_json(std::string_view text);

/// {variant, seed, steps, success, mse_trace, k_trace, gamma_trace,
///  residual_norm_final} plus diagnostic when non-empty.
std::string run_result_to_json(const RunResult& result);

/// {x_star, objective, status}
std::string lp_solution_to_json(const LpSolution& solution);

std::string gen_spec_to_json(const GenSpec& spec);
/// Accepts {n, m, k_nonzeros, matrix_kind: "dense"|"sparse", keep_fraction,
/// seed}; absent fields keep their defaults.
GenSpec gen_spec_from_json(std::string_view text);

}  // namespace csrecon
