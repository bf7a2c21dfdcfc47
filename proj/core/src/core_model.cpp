#include "csrecon/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csrecon {

SensingMatrix::SensingMatrix(std::size_t rows, std::size_t cols, Vector entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)), col_sq_norms_(cols, 0.0) {
  if (rows_ == 0 || cols_ == 0) {
    throw std::invalid_argument("SensingMatrix: rows and cols must be positive");
  }
  if (entries_.size() != rows_ * cols_) {
    throw std::invalid_argument("SensingMatrix: expected " + std::to_string(rows_ * cols_) +
                                " entries, got " + std::to_string(entries_.size()));
  }
  for (std::size_t mu = 0; mu < rows_; ++mu) {
    const double* r = entries_.data() + mu * cols_;
    for (std::size_t i = 0; i < cols_; ++i) col_sq_norms_[i] += r[i] * r[i];
  }
  degenerate_count_ = static_cast<std::size_t>(std::count_if(
      col_sq_norms_.begin(), col_sq_norms_.end(),
      [](double s) { return s < kDegenerateColumnTol; }));
}

SensingMatrix SensingMatrix::identity(std::size_t n) {
  Vector e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return SensingMatrix(n, n, std::move(e));
}

void SensingMatrix::multiply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != cols_ || out.size() != rows_) {
    throw std::invalid_argument("SensingMatrix::multiply: shape mismatch");
  }
  for (std::size_t mu = 0; mu < rows_; ++mu) {
    const double* r = entries_.data() + mu * cols_;
    double acc = 0.0;
    for (std::size_t i = 0; i < cols_; ++i) acc += r[i] * x[i];
    out[mu] = acc;
  }
}

void SensingMatrix::multiply_transpose(std::span<const double> z,
                                       std::span<double> out) const {
  if (z.size() != rows_ || out.size() != cols_) {
    throw std::invalid_argument("SensingMatrix::multiply_transpose: shape mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  double* o = out.data();
  for (std::size_t mu = 0; mu < rows_; ++mu) {
    const double* r = entries_.data() + mu * cols_;
    const double zm = z[mu];
    if (zm == 0.0) continue;
    for (std::size_t i = 0; i < cols_; ++i) o[i] += r[i] * zm;
  }
}

Vector SensingMatrix::multiply(std::span<const double> x) const {
  Vector out(rows_);
  multiply(x, out);
  return out;
}

Vector SensingMatrix::multiply_transpose(std::span<const double> z) const {
  Vector out(cols_);
  multiply_transpose(z, out);
  return out;
}

SparseSignal SparseSignal::from_values(Vector values) {
  SparseSignal s;
  s.values = std::move(values);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (s.values[i] != 0.0) s.support.push_back(i);
  }
  return s;
}

SparseSignal SparseSignal::zeros(std::size_t n) { return from_values(Vector(n, 0.0)); }

ProblemInstance ProblemInstance::from_truth(SensingMatrix matrix, SparseSignal truth,
                                            std::uint64_t seed,
                                            std::vector<std::string> tags) {
  if (truth.size() != matrix.cols()) {
    throw std::invalid_argument("ProblemInstance: signal length " +
                                std::to_string(truth.size()) + " != matrix cols " +
                                std::to_string(matrix.cols()));
  }
  ProblemInstance p;
  p.y = matrix.multiply(truth.values);
  p.matrix = std::move(matrix);
  p.truth = std::move(truth);
  p.seed = seed;
  p.tags = std::move(tags);
  return p;
}

double ProblemInstance::observation_error() const {
  return max_abs_diff(y, matrix.multiply(truth.values));
}

std::string_view variant_name(Variant v) noexcept {
  switch (v) {
    case Variant::Naive: return "naive";
    case Variant::PartialConstant: return "partial";
    case Variant::PartialStepDependent: return "map-gamma";
    case Variant::AmpExternal: return "amp-external";
    case Variant::Amp: return "amp";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
  for (Variant v : {Variant::Naive, Variant::PartialConstant, Variant::PartialStepDependent,
                    Variant::AmpExternal, Variant::Amp}) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

void AnnealSchedule::validate() const {
  if (k0 && !(*k0 > 0.0 && std::isfinite(*k0))) {
    throw std::invalid_argument("AnnealSchedule: k0 must be positive and finite");
  }
  if (!(auto_scale > 0.0 && std::isfinite(auto_scale))) {
    throw std::invalid_argument("AnnealSchedule: auto_scale must be positive");
  }
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw std::invalid_argument("AnnealSchedule: decay must lie in (0, 1]");
  }
  if (!(k_floor >= 0.0 && std::isfinite(k_floor))) {
    throw std::invalid_argument("AnnealSchedule: k_floor must be non-negative");
  }
}

double AnnealSchedule::initial_k(const ProblemInstance& instance) const {
  if (k0) return *k0;
  return auto_scale * max_abs(instance.matrix.multiply_transpose(instance.y));
}

double AnnealSchedule::at(double start, std::size_t steps) const {
  return std::max(start * std::pow(decay, static_cast<double>(steps)), k_floor);
}

double AnnealSchedule::next(double k) const { return std::max(k * decay, k_floor); }

void SolverConfig::validate() const {
  anneal.validate();
  if (max_steps < 1) throw std::invalid_argument("SolverConfig: max_steps must be >= 1");
  if (!(mse_success_threshold > 0.0)) {
    throw std::invalid_argument("SolverConfig: mse_success_threshold must be > 0");
  }
  if (!(fixed_point_tol >= 0.0)) {
    throw std::invalid_argument("SolverConfig: fixed_point_tol must be >= 0");
  }
  if (variant == Variant::PartialConstant && !(gamma >= 0.0 && std::isfinite(gamma))) {
    throw std::invalid_argument("SolverConfig: partition ratio gamma must be >= 0");
  }
}

IterateState IterateState::zeros(std::size_t n, std::size_t m) {
  IterateState s;
  s.x.assign(n, 0.0);
  s.z.assign(m, 0.0);
  s.z_hat.assign(m, 0.0);
  s.x_prev.assign(n, 0.0);
  s.z_hat_prev.assign(m, 0.0);
  return s;
}

double mse_per_entry(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("mse_per_entry: length mismatch (" + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw std::invalid_argument("mse_per_entry: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

Vector residual(const ProblemInstance& instance, std::span<const double> x) {
  if (x.size() != instance.n()) {
    throw std::invalid_argument("residual: x has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(instance.n()));
  }
  Vector z = instance.matrix.multiply(x);
  for (std::size_t mu = 0; mu < z.size(); ++mu) z[mu] = instance.y[mu] - z[mu];
  return z;
}

double norm2(std::span<const double> v) noexcept {
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return std::sqrt(acc);
}

double max_abs(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace csrecon
