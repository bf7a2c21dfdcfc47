#include "csrecon/l1_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace csrecon {

std::string_view lp_status_name(LpStatus s) noexcept {
  switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::DegenerateTie: return "Degenerate-tie";
  }
  return "unknown";
}

std::size_t matrix_rank(const SensingMatrix& matrix, double pivot_tol) {
  const std::size_t rows = matrix.rows();
  const std::size_t cols = matrix.cols();
  Vector a(matrix.entries().begin(), matrix.entries().end());
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (std::abs(a[r * cols + c]) > std::abs(a[pivot * cols + c])) pivot = r;
    }
    if (std::abs(a[pivot * cols + c]) <= pivot_tol) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(a[pivot * cols + j], a[rank * cols + j]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const double f = a[r * cols + c] / a[rank * cols + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < cols; ++j) a[r * cols + j] -= f * a[rank * cols + j];
    }
    ++rank;
  }
  return rank;
}

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kReducedCostTol = 1e-10;
constexpr double kTieTol = 1e-9;
constexpr double kRatioTol = 1e-11;

// Dense simplex tableau. Rows 0..m-1 are constraints, row m holds reduced
// costs; the last column is the right-hand side (minus the objective in the
// cost row).
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t vars) : m_(m), vars_(vars), width_(vars + 1),
                                             t_((m + 1) * (vars + 1), 0.0), basis_(m) {}

  double& at(std::size_t r, std::size_t c) { return t_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return t_[r * width_ + c]; }
  double& rhs(std::size_t r) { return t_[r * width_ + vars_]; }
  double rhs(std::size_t r) const { return t_[r * width_ + vars_]; }
  double& cost(std::size_t c) { return at(m_, c); }
  double cost(std::size_t c) const { return at(m_, c); }
  std::size_t rows() const { return m_; }
  std::size_t vars() const { return vars_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c < width_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  // Bland: lowest-index basic variable among the minimum-ratio rows.
  std::optional<std::size_t> ratio_row(std::size_t pc) const {
    std::optional<std::size_t> best;
    double best_ratio = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = at(r, pc);
      if (a <= kPivotTol) continue;
      // Drift can leave degenerate rows slightly negative; read them as zero
      // so the tie-break sees every degenerate row and Bland cannot cycle.
      const double ratio = std::max(0.0, rhs(r) / a);
      if (!best || ratio < best_ratio - kRatioTol * (1.0 + best_ratio) ||
          (std::abs(ratio - best_ratio) <= kRatioTol * (1.0 + best_ratio) &&
           basis_[r] < basis_[*best])) {
        best = r;
        best_ratio = ratio;
      }
    }
    return best;
  }

 private:
  std::size_t m_;
  std::size_t vars_;
  std::size_t width_;
  Vector t_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { Optimal, Unbounded };

PhaseResult run_phase(Tableau& tab, std::size_t allowed_vars, std::size_t& iterations,
                      std::size_t cap) {
  while (true) {
    std::optional<std::size_t> enter;
    for (std::size_t j = 0; j < allowed_vars; ++j) {
      if (tab.cost(j) < -kReducedCostTol) {
        enter = j;
        break;
      }
    }
    if (!enter) return PhaseResult::Optimal;
    const auto leave = tab.ratio_row(*enter);
    if (!leave) return PhaseResult::Unbounded;
    if (++iterations > cap) {
      throw std::runtime_error("l1_min_lp: iteration cap of " + std::to_string(cap) +
                               " pivots exceeded");
    }
    tab.pivot(*leave, *enter);
  }
}

Vector extract_x(const Tableau& tab, std::size_t n) {
  Vector w(2 * n, 0.0);
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    if (tab.basis()[r] < 2 * n) w[tab.basis()[r]] = tab.rhs(r);
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = w[i] - w[n + i];
  return x;
}

double l1_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

void require_finite_feasibility(const ProblemInstance& instance, LpSolution& sol) {
  const double err = max_abs_diff(instance.matrix.multiply(sol.x_star), instance.y);
  if (err >= 1e-8) {
    sol.diagnostic += (sol.diagnostic.empty() ? "" : "; ") +
                      std::string("constraint violation ") + std::to_string(err);
  }
}

// Solves the square system a x = b in place; false if a pivot falls below tol.
bool solve_square(Vector& a, Vector& b, std::size_t m, double tol) {
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::abs(a[r * m + c]) > std::abs(a[pivot * m + c])) pivot = r;
    }
    if (std::abs(a[pivot * m + c]) <= tol) return false;
    if (pivot != c) {
      for (std::size_t j = 0; j < m; ++j) std::swap(a[pivot * m + j], a[c * m + j]);
      std::swap(b[pivot], b[c]);
    }
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = a[r * m + c] / a[c * m + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < m; ++j) a[r * m + j] -= f * a[c * m + j];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = m; c-- > 0;) {
    double s = b[c];
    for (std::size_t j = c + 1; j < m; ++j) s -= a[c * m + j] * b[j];
    b[c] = s / a[c * m + c];
  }
  return true;
}

// Feasible starting basis without artificials: eliminate on the u columns
// with row-wise partial pivoting, then swap u_i for v_i wherever the basic
// value came out negative. False if some row has no usable pivot.
bool crash_basis(Tableau& tab, std::size_t n) {
  std::vector<bool> used(n, false);
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (!best || std::abs(tab.at(r, j)) > std::abs(tab.at(r, *best))) best = j;
    }
    if (!best || std::abs(tab.at(r, *best)) <= kPivotTol) return false;
    tab.pivot(r, *best);
    used[*best] = true;
  }
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    if (tab.rhs(r) < 0.0) tab.pivot(r, n + tab.basis()[r]);
  }
  return true;
}

}  // namespace

LpSolution l1_min_lp(const ProblemInstance& instance) {
  const std::size_t m = instance.m();
  const std::size_t n = instance.n();
  if (n > kLpMaxN) {
    throw std::invalid_argument("l1_min_lp: N = " + std::to_string(n) + " exceeds oracle limit " +
                                std::to_string(kLpMaxN));
  }
  LpSolution sol;
  const std::size_t rank = matrix_rank(instance.matrix);
  if (rank < m) {
    sol.status = LpStatus::Infeasible;
    sol.diagnostic = "F is rank deficient (rank " + std::to_string(rank) + " < M = " +
                     std::to_string(m) + ")";
    return sol;
  }

  const std::size_t real_vars = 2 * n;
  Tableau tab(m, real_vars + m);
  for (std::size_t r = 0; r < m; ++r) {
    const double sign = instance.y[r] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      tab.at(r, i) = sign * instance.matrix(r, i);
      tab.at(r, n + i) = -sign * instance.matrix(r, i);
    }
    tab.at(r, real_vars + r) = 1.0;
    tab.rhs(r) = sign * instance.y[r];
    tab.basis()[r] = real_vars + r;
  }

  const std::size_t cap = 50 * (n + m);
  std::size_t iterations = 0;

  const Tableau start = tab;
  if (!crash_basis(tab, n)) {
    tab = start;
    // Phase I: minimise the artificial sum.
    for (std::size_t j = 0; j < real_vars; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < m; ++r) s += tab.at(r, j);
      tab.cost(j) = -s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) s += tab.rhs(r);
    tab.rhs(m) = -s;

    run_phase(tab, real_vars + m, iterations, cap);
    double scale = 1.0;
    for (double v : instance.y) scale = std::max(scale, std::abs(v));
    if (-tab.rhs(m) > 1e-9 * scale) {
      sol.status = LpStatus::Infeasible;
      sol.iterations = iterations;
      sol.diagnostic = "phase I ended with artificial sum " + std::to_string(-tab.rhs(m));
      return sol;
    }
  }

  // Drive zero-level artificials out of the basis.
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basis()[r] < real_vars) continue;
    for (std::size_t j = 0; j < real_vars; ++j) {
      if (std::abs(tab.at(r, j)) > kPivotTol) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  // Phase II: unit costs on u and v; artificials may not re-enter.
  for (std::size_t j = 0; j < real_vars + m; ++j) {
    double s = j < real_vars ? 1.0 : 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double cb = tab.basis()[r] < real_vars ? 1.0 : 0.0;
      s -= cb * tab.at(r, j);
    }
    tab.cost(j) = s;
  }
  {
    double s = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (tab.basis()[r] < real_vars) s += tab.rhs(r);
    }
    tab.rhs(m) = -s;
  }
  if (run_phase(tab, real_vars, iterations, cap) == PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    sol.iterations = iterations;
    sol.diagnostic = "phase II found an unbounded direction";
    return sol;
  }

  sol.x_star = extract_x(tab, n);
  sol.objective = l1_norm(sol.x_star);
  sol.iterations = iterations;
  sol.status = LpStatus::Optimal;

  // Alternative optimum detection over one-pivot neighbours.
  for (std::size_t j = 0; j < real_vars && sol.status == LpStatus::Optimal; ++j) {
    if (std::find(tab.basis().begin(), tab.basis().end(), j) != tab.basis().end()) continue;
    if (std::abs(tab.cost(j)) > kTieTol) continue;
    const auto leave = tab.ratio_row(j);
    if (!leave) {
      sol.status = LpStatus::DegenerateTie;
      sol.diagnostic = "zero-cost unbounded edge at optimum";
      break;
    }
    Tableau alt = tab;
    alt.pivot(*leave, j);
    const Vector x_alt = extract_x(alt, n);
    if (max_abs_diff(x_alt, sol.x_star) > kTieTol &&
        std::abs(l1_norm(x_alt) - sol.objective) <= kTieTol) {
      sol.status = LpStatus::DegenerateTie;
      sol.diagnostic = "alternative optimal basis with equal objective";
    }
  }
  require_finite_feasibility(instance, sol);
  return sol;
}

LpSolution l1_min_enum(const ProblemInstance& instance) {
  const std::size_t m = instance.m();
  const std::size_t n = instance.n();
  if (n > 20 || m > 12) {
    throw std::invalid_argument("l1_min_enum: requires N <= 20 and M <= 12");
  }
  LpSolution sol;
  sol.status = LpStatus::Infeasible;
  if (m > n) {
    sol.diagnostic = "no square column subset (M > N)";
    return sol;
  }

  struct Candidate {
    double objective;
    Vector x;
  };
  std::vector<Candidate> near_best;
  double best = std::numeric_limits<double>::infinity();

  std::vector<std::size_t> subset(m);
  for (std::size_t j = 0; j < m; ++j) subset[j] = j;
  Vector a(m * m);
  Vector b(m);
  std::size_t examined = 0;
  while (true) {
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) a[r * m + c] = instance.matrix(r, subset[c]);
      b[r] = instance.y[r];
    }
    ++examined;
    if (solve_square(a, b, m, kPivotTol)) {
      Vector x(n, 0.0);
      for (std::size_t c = 0; c < m; ++c) x[subset[c]] = b[c];
      const double obj = l1_norm(x);
      if (obj < best - kTieTol) {
        best = obj;
        near_best.erase(std::remove_if(near_best.begin(), near_best.end(),
                                       [&](const Candidate& c) {
                                         return c.objective > best + kTieTol;
                                       }),
                        near_best.end());
      }
      if (obj <= best + kTieTol) {
        best = std::min(best, obj);
        near_best.push_back({obj, std::move(x)});
      }
    }
    // Next combination in lexicographic order.
    std::size_t pos = m;
    while (pos > 0 && subset[pos - 1] == n - m + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t j = pos; j < m; ++j) subset[j] = subset[j - 1] + 1;
  }
  sol.iterations = examined;
  if (near_best.empty()) {
    sol.diagnostic = "no nonsingular column subset";
    return sol;
  }

  const auto best_it = std::min_element(
      near_best.begin(), near_best.end(),
      [](const Candidate& l, const Candidate& r) { return l.objective < r.objective; });
  sol.x_star = best_it->x;
  sol.objective = best_it->objective;
  sol.status = LpStatus::Optimal;
  for (const Candidate& c : near_best) {
    if (c.objective <= sol.objective + kTieTol && max_abs_diff(c.x, sol.x_star) > kTieTol) {
      sol.status = LpStatus::DegenerateTie;
      sol.diagnostic = "distinct basic solutions share the optimal objective";
      break;
    }
  }
  require_finite_feasibility(instance, sol);
  return sol;
}

}  // namespace csrecon
