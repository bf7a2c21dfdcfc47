#pragma once

// Domain types shared by the solvers, the generators and the harness.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace csrecon {

using Vector = std::vector<double>;

/// Columns whose squared norm falls below this are treated as degenerate.
inline constexpr double kDegenerateColumnTol = 1e-12;

/// Dense M x N observation matrix, stored row-major, with cached column
/// squared norms. Immutable after construction.
class SensingMatrix {
 public:
  SensingMatrix() = default;
  /// `entries` is row-major and must hold rows * cols values.
  SensingMatrix(std::size_t rows, std::size_t cols, Vector entries);

  static SensingMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  /// Compression rate M / N.
  double alpha() const noexcept {
    return static_cast<double>(rows_) / static_cast<double>(cols_);
  }

  double operator()(std::size_t mu, std::size_t i) const noexcept {
    return entries_[mu * cols_ + i];
  }
  std::span<const double> row(std::size_t mu) const noexcept {
    return {entries_.data() + mu * cols_, cols_};
  }
  std::span<const double> entries() const noexcept { return entries_; }

  double col_sq_norm(std::size_t i) const noexcept { return col_sq_norms_[i]; }
  std::span<const double> col_sq_norms() const noexcept { return col_sq_norms_; }
  bool is_degenerate(std::size_t i) const noexcept {
    return col_sq_norms_[i] < kDegenerateColumnTol;
  }
  std::size_t degenerate_count() const noexcept { return degenerate_count_; }

  /// out = F x, each row summed in ascending column order.
  void multiply(std::span<const double> x, std::span<double> out) const;
  /// out = F^T z.
  void multiply_transpose(std::span<const double> z, std::span<double> out) const;

  Vector multiply(std::span<const double> x) const;
  Vector multiply_transpose(std::span<const double> z) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector entries_;
  Vector col_sq_norms_;
  std::size_t degenerate_count_ = 0;
};

/// Sparse ground-truth signal. `support` is exactly {i : values[i] != 0},
/// in ascending order.
struct SparseSignal {
  Vector values;
  std::vector<std::size_t> support;

  static SparseSignal from_values(Vector values);
  static SparseSignal zeros(std::size_t n);

  std::size_t size() const noexcept { return values.size(); }
  std::size_t nnz() const noexcept { return support.size(); }
  /// rho = K / N.
  double density() const noexcept {
    return values.empty() ? 0.0
                          : static_cast<double>(support.size()) /
                                static_cast<double>(values.size());
  }
};

/// One reconstruction task: y = F x0 with the ground truth kept alongside.
struct ProblemInstance {
  SensingMatrix matrix;
  SparseSignal truth;
  Vector y;
  std::uint64_t seed = 0;
  std::vector<std::string> tags;

  /// Computes y = F x0 with ascending-i summation.
  static ProblemInstance from_truth(SensingMatrix matrix, SparseSignal truth,
                                    std::uint64_t seed = 0,
                                    std::vector<std::string> tags = {});

  std::size_t m() const noexcept { return matrix.rows(); }
  std::size_t n() const noexcept { return matrix.cols(); }

  /// max_mu |y_mu - (F x0)_mu|.
  double observation_error() const;
};

enum class Variant {
  Naive,                 // full update, general-F normalisation
  PartialConstant,       // fixed partition ratio gamma
  PartialStepDependent,  // MAP with gamma(t) from the active fraction
  AmpExternal,           // negative gamma(t): residual divided by 1 - gamma
  Amp,                   // Onsager-corrected residual
};

std::string_view variant_name(Variant v) noexcept;
/// Accepts the CLI spellings: naive, partial, map-gamma, amp-external, amp.
std::optional<Variant> parse_variant(std::string_view name) noexcept;

/// k(t) = max(k0 * decay^t, k_floor).
struct AnnealSchedule {
  /// Unset means Auto: max_i |(F^T y)_i| times `auto_scale`.
  std::optional<double> k0;
  double auto_scale = 1.0;
  double decay = 0.999;
  double k_floor = 1e-9;

  void validate() const;
  double initial_k(const ProblemInstance& instance) const;
  /// Threshold after `steps` decays starting from `start`.
  double at(double start, std::size_t steps) const;
  double next(double k) const;
};

struct SolverConfig {
  Variant variant = Variant::PartialStepDependent;
  /// Partition ratio for Variant::PartialConstant.
  double gamma = 1.0;
  AnnealSchedule anneal;
  std::size_t max_steps = 2000;
  double mse_success_threshold = 1e-3;
  double fixed_point_tol = 1e-9;
  /// Runs abort as failed once the per-entry MSE exceeds this.
  double divergence_mse = 1e6;

  void validate() const;
};

/// Mutable per-run iterate. Single owner.
struct IterateState {
  Vector x;           // x^(t-1) when entering step t
  Vector z;           // residual y - F x
  Vector z_hat;       // rescaled residual from the last step
  double k_current = 0.0;
  std::size_t step = 0;
  Vector x_prev;      // x^(t-2)
  Vector z_hat_prev;  // z_hat from two steps back
  bool z_fresh = false;
  /// Cached F^T z_hat / |F_i|^2 + x^(t-2) from the last AMP step; empty when
  /// unknown, in which case the Onsager sum is recomputed from z_hat/x_prev.
  Vector amp_argument;

  static IterateState zeros(std::size_t n, std::size_t m);
};

struct RunResult {
  Variant variant = Variant::Naive;
  std::uint64_t seed = 0;
  Vector x_final;
  Vector mse_trace;
  Vector k_trace;
  Vector gamma_trace;
  std::size_t steps_taken = 0;
  bool success = false;
  double residual_norm_final = 0.0;
  std::size_t degenerate_hits = 0;
  bool aborted = false;
  std::string diagnostic;
};

/// (1/N) sum (a_i - b_i)^2. Throws std::invalid_argument on length mismatch
/// or empty input.
double mse_per_entry(std::span<const double> a, std::span<const double> b);

/// z = y - F x.
Vector residual(const ProblemInstance& instance, std::span<const double> x);

double norm2(std::span<const double> v) noexcept;
double max_abs(std::span<const double> v) noexcept;
double max_abs_diff(std::span<const double> a, std::span<const double> b);

}  // namespace csrecon
