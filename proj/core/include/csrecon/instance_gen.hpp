#pragma once

// Deterministic instance generation. Every random quantity is a pure function
// of (seed, stream tag, indices), so any entry can be regenerated in
// isolation and trials can be produced concurrently in any order.

#include <cstdint>
#include <string_view>

#include "csrecon/core_model.hpp"

namespace csrecon {

enum class MatrixKind { DenseGauss, SparsifiedGauss };

struct GenSpec {
  std::size_t n = 500;
  std::size_t m = 250;
  std::size_t k_nonzeros = 25;
  MatrixKind matrix_kind = MatrixKind::DenseGauss;
  /// Probability that an entry survives sparsification (SparsifiedGauss).
  double keep_fraction = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  /// n, round(alpha n), round(rho n).
  static GenSpec from_ratios(std::size_t n, double alpha, double rho, std::uint64_t seed,
                             MatrixKind kind = MatrixKind::DenseGauss,
                             double keep_fraction = 1.0);
};

/// splitmix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Hash of a seed, a stream tag and up to three counters.
std::uint64_t keyed_hash(std::uint64_t seed, std::string_view tag, std::uint64_t a = 0,
                         std::uint64_t b = 0, std::uint64_t c = 0) noexcept;

/// Uniform on (0, 1) from a 64-bit key.
double keyed_uniform(std::uint64_t key) noexcept;

/// Standard normal from (seed, tag, a, b) via Box-Muller on two keyed
/// uniforms.
double keyed_normal(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                    std::uint64_t b = 0) noexcept;

/// Entries i.i.d. N(0, 1/m); SparsifiedGauss then zeroes each entry
/// independently with probability 1 - keep_fraction. Retained entries are not
/// rescaled.
SensingMatrix gen_matrix(const GenSpec& spec);

/// Exactly k_nonzeros support indices drawn uniformly without replacement,
/// values i.i.d. N(0, 1).
SparseSignal gen_signal(const GenSpec& spec);

/// gen_matrix + gen_signal + y = F x0.
ProblemInstance make_instance(const GenSpec& spec);

/// max_i |sum_mu F_mu_i^2 - 1|.
double max_column_norm_deviation(const SensingMatrix& matrix);

}  // namespace csrecon
