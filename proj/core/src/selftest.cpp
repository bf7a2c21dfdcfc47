#include "csrecon/selftest.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "csrecon/harness.hpp"
#include "csrecon/instance_gen.hpp"
#include "csrecon/phase_theory.hpp"
#include "csrecon/serialization.hpp"
#include "csrecon/shrinkage.hpp"
#include "csrecon/solvers.hpp"

namespace csrecon {

namespace {

CheckResult check(std::string name, bool passed, std::string detail = {}) {
  return {std::move(name), passed, std::move(detail)};
}

std::string worst(double value) {
  std::ostringstream s;
  s << "worst deviation " << value;
  return s.str();
}

double keyed_symmetric(std::uint64_t seed, std::string_view tag, std::size_t i,
                       double scale) {
  return scale * (2.0 * keyed_uniform(keyed_hash(seed, tag, i)) - 1.0);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

std::vector<CheckResult> shrinkage_checks(const SelftestOptions& o) {
  double odd = 0.0;
  double expansive = 0.0;
  double bound = 0.0;
  double scaling = 0.0;
  double fd = 0.0;
  for (std::size_t c = 0; c < o.shrinkage_cases; ++c) {
    const double u = keyed_symmetric(o.seed, "u", c, 10.0);
    const double v = keyed_symmetric(o.seed, "v", c, 10.0);
    const double k = 5.0 * keyed_uniform(keyed_hash(o.seed, "k", c));
    const double g = 4.0 * keyed_uniform(keyed_hash(o.seed, "g", c));

    odd = std::max(odd, std::abs(soft_threshold(-u, k) + soft_threshold(u, k)));
    expansive = std::max(expansive, std::abs(soft_threshold(u, k) - soft_threshold(v, k)) -
                                        std::abs(u - v));
    bound = std::max(bound,
                     std::abs(std::abs(soft_threshold(u, k)) - std::max(std::abs(u) - k, 0.0)));
    const double lhs = soft_threshold(u, k * (1.0 + g)) / (1.0 + g);
    const double rhs = soft_threshold(u / (1.0 + g), k);
    scaling = std::max(scaling, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    if (std::abs(std::abs(u) - k) > 1e-6) {
      const double h = 1e-7;
      const double slope = (soft_threshold(u + h, k) - soft_threshold(u - h, k)) / (2.0 * h);
      fd = std::max(fd, std::abs(slope - soft_threshold_deriv(u, k)));
    }
  }
  return {
      check("shrinkage oddness", odd == 0.0, worst(odd)),
      check("shrinkage non-expansive", expansive <= 1e-12, worst(expansive)),
      check("shrinkage magnitude bound", bound <= 1e-12, worst(bound)),
      check("shrinkage scaling identity", scaling <= 1e-12, worst(scaling)),
      check("shrinkage derivative vs finite difference", fd <= 1e-6, worst(fd)),
  };
}

std::vector<CheckResult> gauss_tail_checks() {
  std::vector<CheckResult> out;
  out.push_back(check("H(0) = 1/2", gauss_upper_tail(0.0) == 0.5));

  double sym = 0.0;
  double ref = 0.0;
  for (int j = -800; j <= 800; ++j) {
    const double z = 0.01 * j + 0.003;
    sym = std::max(sym, std::abs(gauss_upper_tail(z) + gauss_upper_tail(-z) - 1.0));
    const double x = z / std::sqrt(2.0);
    ref = std::max(ref, std::abs(erfc_accurate(x) - std::erfc(x)) / std::erfc(x));
  }
  out.push_back(check("H(z) + H(-z) = 1", sym <= 1e-15, worst(sym)));
  out.push_back(check("erfc relative accuracy on |z| <= 8", ref <= 1e-12, worst(ref)));

  const std::function<double(double)> phi = gauss_density;
  const double a = 1.0;
  const double b = 40.0;
  const double fa = phi(a);
  const double fb = phi(b);
  const double fm = phi(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double quad = adaptive_simpson(phi, a, b, fa, fm, fb, whole, 1e-15, 60);
  const double diff = std::abs(quad - gauss_upper_tail(1.0));
  out.push_back(check("H(1) vs adaptive quadrature", diff <= 1e-10, worst(diff)));

  double mono = -1.0;
  double neg = -1.0;
  for (int j = 1; j <= 1000; ++j) {
    const double z = 0.01 * j;
    mono = std::max(mono, gauss_upper_tail(z) - gauss_upper_tail(z - 0.01));
    neg = std::max(neg, gauss_upper_tail(z) - gauss_density(z) / z);
  }
  out.push_back(check("H strictly decreasing", mono < 0.0));
  out.push_back(check("H(z) - phi(z)/z < 0 for z > 0", neg < 0.0));
  return out;
}

CheckResult fixed_point_check(const SelftestOptions& o) {
  double worst_dev = 0.0;
  std::string failure;
  for (std::size_t f = 0; f < o.fixed_point_fixtures; ++f) {
    const FixedPointFixture fx = make_fixed_point_fixture(keyed_hash(o.seed, "fixture", f));
    const ProblemInstance& inst = fx.instance;
    IterateState st = IterateState::zeros(inst.n(), inst.m());
    st.x = fx.x_star;

    auto note = [&](const char* what, double dev) {
      worst_dev = std::max(worst_dev, dev);
      if (dev > 1e-10 && failure.empty()) {
        failure = std::string(what) + " moved by " + std::to_string(dev);
      }
    };

    note("naive", max_abs_diff(step_naive(st, inst, fx.k_naive).x_new, fx.x_star));
    for (double g : {0.5, 1.0, 3.0}) {
      note("partial", max_abs_diff(step_partial_constant(st, inst, fx.k_naive, g).x_new,
                                   fx.x_star));
    }
    const double k_map = rescaled_threshold(fx, +1.0);
    note("map-gamma", max_abs_diff(step_map_gamma(st, inst, k_map).x_new, fx.x_star));

    const double k_ext = rescaled_threshold(fx, -1.0);
    const StepOutcome ext = step_amp_external(st, inst, k_ext);
    note("amp-external", max_abs_diff(ext.x_new, fx.x_star));

    std::size_t support = 0;
    for (double v : fx.x_star) support += v != 0.0 ? 1 : 0;
    const double onsager = static_cast<double>(support) / static_cast<double>(inst.m());
    const double k_amp = fx.k_naive / (1.0 - onsager);
    IterateState amp = st;
    amp.x_prev = fx.x_star;
    amp.z_hat = residual(inst, fx.x_star);
    for (double& v : amp.z_hat) v /= 1.0 - onsager;
    const StepOutcome a = step_amp(amp, inst, k_amp);
    note("amp", max_abs_diff(a.x_new, fx.x_star));
    note("amp z_hat", max_abs_diff(a.z_hat_new, amp.z_hat));
  }
  return check("fixed-point coincidence across variants", failure.empty(),
               failure.empty() ? worst(worst_dev) : failure);
}

std::vector<CheckResult> determinism_checks(const SelftestOptions& o) {
  std::vector<CheckResult> out;
  const GenSpec g = GenSpec::from_ratios(60, 0.5, 0.1, o.seed);
  out.push_back(check("instance generation is byte-stable",
                      instance_to_json(make_instance(g)) == instance_to_json(make_instance(g))));

  const ProblemInstance p = make_instance(g);
  const ProblemInstance back = instance_from_json(instance_to_json(p));
  const bool same = back.y == p.y && back.truth.values == p.truth.values &&
                    Vector(back.matrix.entries().begin(), back.matrix.entries().end()) ==
                        Vector(p.matrix.entries().begin(), p.matrix.entries().end());
  out.push_back(check("instance JSON round trip is bit-identical", same));

  PhaseGridSpec spec;
  spec.n = 40;
  spec.alpha_grid = {0.5};
  spec.rho_grid = {0.0, 0.1};
  spec.trials = 2;
  spec.solver = desk_solver_config(Variant::PartialStepDependent);
  spec.solver.max_steps = 200;
  spec.base_seed = o.seed;
  const std::string first = phase_csv(phase_sweep(spec), spec.solver.mse_success_threshold);
  spec.jobs = 2;
  const std::string second = phase_csv(phase_sweep(spec), spec.solver.mse_success_threshold);
  out.push_back(check("phase sweep CSV is byte-stable across job counts", first == second));
  return out;
}

}  // namespace

namespace {

FixedPointFixture lasso_fixture(std::uint64_t seed, double k_naive) {
  GenSpec g;
  g.n = 40;
  g.m = 20;
  g.k_nonzeros = 4;
  g.seed = seed;
  const SensingMatrix raw = gen_matrix(g);
  Vector entries(raw.entries().begin(), raw.entries().end());
  for (std::size_t mu = 0; mu < g.m; ++mu) {
    for (std::size_t i = 0; i < g.n; ++i) entries[mu * g.n + i] /= std::sqrt(raw.col_sq_norm(i));
  }
  SparseSignal truth = gen_signal(g);
  for (std::size_t i : truth.support) truth.values[i] += std::copysign(0.5, truth.values[i]);
  FixedPointFixture fx;
  fx.instance = ProblemInstance::from_truth(SensingMatrix(g.m, g.n, std::move(entries)),
                                            std::move(truth), seed, {"fixed-point-fixture"});
  fx.k_naive = k_naive;

  // The damped step only shrinks off-support entries geometrically; one
  // undamped step snaps them to exact zeros, which the damped step then keeps.
  IterateState st = IterateState::zeros(g.n, g.m);
  auto settle = [&] {
    for (int it = 0; it < 200000; ++it) {
      StepOutcome out = step_partial_constant(st, fx.instance, k_naive, 4.0);
      const double dx = max_abs_diff(out.x_new, st.x);
      advance(st, std::move(out));
      if (dx < 1e-15) break;
    }
  };
  settle();
  advance(st, step_naive(st, fx.instance, k_naive));
  settle();
  fx.x_star = st.x;
  return fx;
}

bool same_support(const Vector& a, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0.0) != (b[i] != 0.0)) return false;
  }
  return true;
}

}  // namespace

FixedPointFixture make_fixed_point_fixture(std::uint64_t seed, double k_naive) {
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    FixedPointFixture fx = lasso_fixture(keyed_hash(seed, "attempt", attempt), k_naive);
    if (same_support(fx.x_star, fx.instance.truth.values)) return fx;
  }
  throw std::runtime_error("make_fixed_point_fixture: no draw with exact lasso support");
}

double rescaled_threshold(const FixedPointFixture& fixture, double sign) {
  IterateState st = IterateState::zeros(fixture.instance.n(), fixture.instance.m());
  st.x = fixture.x_star;
  const std::size_t m = fixture.instance.m();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= m; ++j) {
    const double gamma = static_cast<double>(j) / static_cast<double>(m);
    const double denom = 1.0 + sign * gamma;
    if (denom <= 0.0) continue;
    const double k = fixture.k_naive / denom;
    if (gamma_step_dependent(st, fixture.instance, k) == gamma) best = std::min(best, k);
  }
  if (!std::isfinite(best)) {
    throw std::runtime_error("rescaled_threshold: no self-consistent partition ratio");
  }
  return best;
}

std::vector<CheckResult> run_selftest(const SelftestOptions& options) {
  std::vector<CheckResult> out = shrinkage_checks(options);
  for (auto& c : gauss_tail_checks()) out.push_back(std::move(c));
  out.push_back(fixed_point_check(options));
  for (auto& c : determinism_checks(options)) out.push_back(std::move(c));
  return out;
}

}  // namespace csrecon
