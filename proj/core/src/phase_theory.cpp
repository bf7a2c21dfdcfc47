#include "csrecon/phase_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace csrecon {

namespace {

constexpr double kInvSqrtPi = std::numbers::inv_sqrtpi;

// erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (1*3*...*(2n+1)).
// All terms positive, so no cancellation for the |x| < 2 branch.
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return 2.0 * kInvSqrtPi * std::exp(-x2) * sum;
}

// erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// modified Lentz evaluation, x >= 2.
double erfc_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 500; ++j) {
    const double a = 0.5 * j;
    d = x + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = x + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return kInvSqrtPi * std::exp(-x * x) / f;
}

double golden_section_max(double (*fn)(double, double), double param, double lo, double hi,
                          double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(param, c);
  double fd = fn(param, d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(param, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(param, d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double erfc_accurate(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc_accurate(-x);
  if (x < 2.0) return 1.0 - erf_series(x);
  return erfc_continued_fraction(x);
}

double gauss_density(double z) {
  return std::exp(-0.5 * z * z) * kInvSqrtPi / std::numbers::sqrt2;
}

double gauss_upper_tail(double z) { return 0.5 * erfc_accurate(z / std::numbers::sqrt2); }

double amp_threshold_objective(double alpha, double z) {
  const double z2 = z * z;
  const double b = (1.0 + z2) * gauss_upper_tail(z) - z * gauss_density(z);
  const double num = 1.0 - (2.0 / alpha) * b;
  const double den = 1.0 + z2 - 2.0 * b;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

double replica_root_function(double rho, double z) {
  return 2.0 * (1.0 - rho) * (gauss_upper_tail(z) - gauss_density(z) / z) + rho;
}

ThresholdPoint amp_threshold_rho(double alpha) {
  if (!(alpha > 0.01 && alpha < 0.99)) {
    throw std::invalid_argument("amp_threshold_rho: alpha must lie in (0.01, 0.99), got " +
                                std::to_string(alpha));
  }
  constexpr double z_max = 10.0;
  constexpr double dz = 1e-3;
  constexpr std::size_t points = 10001;

  std::size_t best = points;
  std::size_t first_valid = points;
  std::size_t last_valid = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < points; ++j) {
    const double g = amp_threshold_objective(alpha, dz * static_cast<double>(j));
    if (!std::isfinite(g)) continue;
    first_valid = std::min(first_valid, j);
    last_valid = j;
    if (g > best_value) {
      best_value = g;
      best = j;
    }
  }
  if (best == points || best == first_valid || best == last_valid) {
    std::ostringstream msg;
    msg << "amp_threshold_rho: maximiser on the boundary of [0, " << z_max
        << "] at alpha = " << alpha;
    throw std::runtime_error(msg.str());
  }
  const double lo = dz * static_cast<double>(best - 1);
  const double hi = dz * static_cast<double>(best + 1);
  double z_star = golden_section_max(&amp_threshold_objective, alpha, lo, hi, 1e-10);
  double g_star = amp_threshold_objective(alpha, z_star);
  if (!(g_star >= best_value)) {
    z_star = dz * static_cast<double>(best);
    g_star = best_value;
  }
  return {alpha, alpha * g_star, z_star};
}

ThresholdPoint replica_threshold_alpha(double rho) {
  if (!(rho >= 0.001 && rho <= 0.999)) {
    throw std::invalid_argument("replica_threshold_alpha: rho must lie in [0.001, 0.999], got " +
                                std::to_string(rho));
  }
  constexpr double scan_lo = 1e-6;
  constexpr double scan_hi = 50.0;
  constexpr double ratio = 1.05;

  double lo = scan_lo;
  double f_lo = replica_root_function(rho, lo);
  double hi = lo;
  bool bracketed = false;
  while (hi < scan_hi) {
    const double next = std::min(hi * ratio, scan_hi);
    const double f_next = replica_root_function(rho, next);
    if ((f_lo < 0.0) != (f_next < 0.0)) {
      lo = hi;
      hi = next;
      bracketed = true;
      break;
    }
    hi = next;
    f_lo = f_next;
    lo = hi;
  }
  if (!bracketed) {
    std::ostringstream msg;
    msg << "replica_threshold_alpha: no sign change in [" << scan_lo << ", " << scan_hi
        << "] at rho = " << rho;
    throw std::runtime_error(msg.str());
  }

  f_lo = replica_root_function(rho, lo);
  double z = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    z = 0.5 * (lo + hi);
    const double f = replica_root_function(rho, z);
    if (f == 0.0) break;
    if ((f < 0.0) == (f_lo < 0.0)) {
      lo = z;
      f_lo = f;
    } else {
      hi = z;
    }
    if (hi - lo <= std::numeric_limits<double>::epsilon() * z) break;
  }
  const double alpha = 2.0 * (1.0 - rho) * gauss_upper_tail(z) + rho;
  return {alpha, rho, z};
}

ThresholdPoint replica_threshold_rho(double alpha) {
  double lo = 0.001 + 1e-12;
  double hi = 0.999 - 1e-12;
  const double a_lo = replica_threshold_alpha(lo).alpha;
  const double a_hi = replica_threshold_alpha(hi).alpha;
  if (!(alpha >= a_lo && alpha <= a_hi)) {
    std::ostringstream msg;
    msg << "replica_threshold_rho: alpha = " << alpha << " outside [" << a_lo << ", " << a_hi
        << "]";
    throw std::invalid_argument(msg.str());
  }
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (replica_threshold_alpha(mid).alpha < alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return replica_threshold_alpha(0.5 * (lo + hi));
}

std::vector<ThresholdPoint> threshold_curve(std::span<const double> alphas) {
  std::vector<ThresholdPoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    try {
      out.push_back(amp_threshold_rho(a));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("threshold_curve at alpha = ") +
                                  std::to_string(a) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("threshold_curve at alpha = ") +
                               std::to_string(a) + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ThresholdPoint& a, const ThresholdPoint& b) { return a.alpha < b.alpha; });
  return out;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int j = 1; j <= 19; ++j) grid.push_back(j / 20.0);
  return grid;
}

}  // namespace csrecon
