#include <doctest.h>

#include <stdexcept>

#include "csrecon/shrinkage.hpp"

using namespace csrecon;

TEST_CASE("soft threshold values") {
  CHECK(soft_threshold(2.0, 1.0) == 1.0);
  CHECK(soft_threshold(-2.0, 1.0) == -1.0);
  CHECK(soft_threshold(0.3, 0.5) == 0.0);
  CHECK(soft_threshold(-0.5, 0.5) == 0.0);
  for (double u : {-3.7, -1e-300, 0.0, 2.5, 1e10}) CHECK(soft_threshold(u, 0.0) == u);
  CHECK_THROWS_AS(soft_threshold(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("soft threshold derivative") {
  CHECK(soft_threshold_deriv(2.0, 1.0) == 1.0);
  CHECK(soft_threshold_deriv(0.3, 0.5) == 0.0);
  CHECK(soft_threshold_deriv(1.0, 1.0) == 0.0);
  CHECK(soft_threshold_deriv(-1.0, 1.0) == 0.0);
  CHECK(soft_threshold_deriv(1.0 + 1e-9, 1.0) == 1.0);
  CHECK(soft_threshold_deriv(1.0 - 1e-9, 1.0) == 0.0);
  CHECK_THROWS_AS(soft_threshold_deriv(1.0, -1.0), std::invalid_argument);
}
