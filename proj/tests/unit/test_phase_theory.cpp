#include <doctest.h>

#include <stdexcept>

#include <chrono>
#include <cmath>

#include "csrecon/phase_theory.hpp"

using namespace csrecon;

TEST_CASE("Gaussian upper tail") {
  CHECK(gauss_upper_tail(0.0) == 0.5);
  for (double z : {0.1, 0.77, 1.5, 3.2, 6.0}) {
    CHECK(std::abs(gauss_upper_tail(z) + gauss_upper_tail(-z) - 1.0) < 1e-15);
  }
  // composite Simpson over [1, 12], 2e5 panels
  const int n = 200000;
  const double h = 11.0 / n;
  double s = gauss_density(1.0) + gauss_density(12.0);
  for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * gauss_density(1.0 + j * h);
  CHECK(std::abs(s * h / 3.0 - gauss_upper_tail(1.0)) < 1e-10);

  for (double x : {-1.5, 0.0, 0.4, 1.99, 2.0, 3.5, 7.0}) {
    CHECK(std::abs(erfc_accurate(x) - std::erfc(x)) <= 1e-13 * std::erfc(x));
  }
}

TEST_CASE("AMP threshold at alpha = 0.5") {
  const ThresholdPoint p = amp_threshold_rho(0.5);
  // independent bounded scalar maximisation
  CHECK(p.rho_c == doctest::Approx(0.19284483309074).epsilon(1e-10));
  CHECK(p.z_star == doctest::Approx(0.87690099886).epsilon(1e-6));
  CHECK(amp_threshold_objective(0.5, p.z_star + 1e-4) <= p.rho_c / 0.5);
  CHECK(amp_threshold_objective(0.5, p.z_star - 1e-4) <= p.rho_c / 0.5);

  double best = -1.0;
  for (int j = 1; j <= 1000000; ++j) best = std::max(best, amp_threshold_objective(0.5, j * 1e-5));
  CHECK(std::abs(0.5 * best - p.rho_c) < 1e-6);
}

TEST_CASE("replica threshold") {
  const ThresholdPoint a3 = replica_threshold_alpha(1e-3);
  const ThresholdPoint a2 = replica_threshold_alpha(1e-2);
  const ThresholdPoint a1 = replica_threshold_alpha(1e-1);
  CHECK(a3.alpha < a2.alpha);
  CHECK(a2.alpha < a1.alpha);
  CHECK(a3.z_star > a2.z_star);
  CHECK(a2.z_star > a1.z_star);
  for (const ThresholdPoint& p : {a3, a2, a1}) {
    CHECK(std::abs(replica_root_function(p.rho_c, p.z_star)) < 1e-12);
  }
  for (double rho : {0.05, 0.1, 0.2, 0.4}) {
    const double alpha = replica_threshold_alpha(rho).alpha;
    CHECK(std::abs(amp_threshold_rho(alpha).rho_c - rho) < 1e-6);
  }
  CHECK_THROWS_AS(replica_threshold_alpha(0.0), std::invalid_argument);
  CHECK_THROWS_AS(replica_threshold_alpha(1.0), std::invalid_argument);
}

TEST_CASE("threshold curve") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = threshold_curve(default_alpha_grid());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  REQUIRE(curve.size() == 19);
  for (std::size_t j = 1; j < curve.size(); ++j) CHECK(curve[j].rho_c >= curve[j - 1].rho_c);
  for (const ThresholdPoint& p : curve) CHECK(p.rho_c > 0.0);

  const std::vector<double> one{0.3};
  const auto single = threshold_curve(one);
  REQUIRE(single.size() == 1);
  CHECK(single[0].rho_c == amp_threshold_rho(0.3).rho_c);

  const std::vector<double> bad{0.5, 1.2};
  CHECK_THROWS_WITH_AS(threshold_curve(bad), doctest::Contains("1.2"), std::invalid_argument);
  CHECK_THROWS_AS(amp_threshold_rho(0.0), std::invalid_argument);
}
