#include "csrecon/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace csrecon {

void GenSpec::validate() const {
  if (n < 1) throw std::invalid_argument("GenSpec: n must be >= 1");
  if (m < 1) throw std::invalid_argument("GenSpec: m must be >= 1");
  if (k_nonzeros > n) {
    throw std::invalid_argument("GenSpec: k_nonzeros " + std::to_string(k_nonzeros) +
                                " exceeds n " + std::to_string(n));
  }
  if (matrix_kind == MatrixKind::SparsifiedGauss &&
      !(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw std::invalid_argument("GenSpec: keep_fraction must lie in (0, 1]");
  }
}

GenSpec GenSpec::from_ratios(std::size_t n, double alpha, double rho, std::uint64_t seed,
                             MatrixKind kind, double keep_fraction) {
  GenSpec s;
  s.n = n;
  s.m = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)));
  s.k_nonzeros = static_cast<std::size_t>(std::llround(rho * static_cast<double>(n)));
  s.matrix_kind = kind;
  s.keep_fraction = keep_fraction;
  s.seed = seed;
  s.validate();
  return s;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t keyed_hash(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                         std::uint64_t b, std::uint64_t c) noexcept {
  std::uint64_t tag_hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : tag) {
    tag_hash ^= ch;
    tag_hash *= 0x100000001b3ULL;
  }
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ tag_hash);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

double keyed_uniform(std::uint64_t key) noexcept {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(key >> 11) + 0.5) * 0x1.0p-53;
}

double keyed_normal(std::uint64_t seed, std::string_view tag, std::uint64_t a,
                    std::uint64_t b) noexcept {
  const double u1 = keyed_uniform(keyed_hash(seed, tag, a, b, 0));
  const double u2 = keyed_uniform(keyed_hash(seed, tag, a, b, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SensingMatrix gen_matrix(const GenSpec& spec) {
  spec.validate();
  const double sigma = 1.0 / std::sqrt(static_cast<double>(spec.m));
  const bool sparsify = spec.matrix_kind == MatrixKind::SparsifiedGauss;
  Vector entries(spec.m * spec.n);
  for (std::size_t mu = 0; mu < spec.m; ++mu) {
    for (std::size_t i = 0; i < spec.n; ++i) {
      double v = sigma * keyed_normal(spec.seed, "matrix", mu, i);
      if (sparsify &&
          keyed_uniform(keyed_hash(spec.seed, "mask", mu, i)) >= spec.keep_fraction) {
        v = 0.0;
      }
      entries[mu * spec.n + i] = v;
    }
  }
  return SensingMatrix(spec.m, spec.n, std::move(entries));
}

SparseSignal gen_signal(const GenSpec& spec) {
  spec.validate();
  std::vector<std::size_t> order(spec.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: slot j takes a uniform pick from the unused tail.
  for (std::size_t j = 0; j < spec.k_nonzeros; ++j) {
    const std::size_t remaining = spec.n - j;
    auto pick = static_cast<std::size_t>(
        keyed_uniform(keyed_hash(spec.seed, "support", j)) * static_cast<double>(remaining));
    pick = std::min(pick, remaining - 1);
    std::swap(order[j], order[j + pick]);
  }
  Vector values(spec.n, 0.0);
  for (std::size_t j = 0; j < spec.k_nonzeros; ++j) {
    values[order[j]] = keyed_normal(spec.seed, "value", j);
  }
  return SparseSignal::from_values(std::move(values));
}

ProblemInstance make_instance(const GenSpec& spec) {
  SensingMatrix matrix = gen_matrix(spec);
  std::vector<std::string> tags;
  if (spec.matrix_kind == MatrixKind::DenseGauss && spec.m >= 200 &&
      max_column_norm_deviation(matrix) >= 0.5) {
    tags.emplace_back("warning:column-norm-deviation");
  }
  return ProblemInstance::from_truth(std::move(matrix), gen_signal(spec), spec.seed,
                                     std::move(tags));
}

double max_column_norm_deviation(const SensingMatrix& matrix) {
  double worst = 0.0;
  for (double s : matrix.col_sq_norms()) worst = std::max(worst, std::abs(s - 1.0));
  return worst;
}

}  // namespace csrecon
