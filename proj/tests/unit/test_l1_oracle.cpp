#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "csrecon/instance_gen.hpp"
#include "csrecon/l1_oracle.hpp"

using namespace csrecon;

namespace {

ProblemInstance with_y(SensingMatrix f, Vector y) {
  ProblemInstance p;
  p.truth = SparseSignal::zeros(f.cols());
  p.matrix = std::move(f);
  p.y = std::move(y);
  return p;
}

}  // namespace

TEST_CASE("small hand problems") {
  const ProblemInstance p = with_y(SensingMatrix(1, 2, {2, 1}), {2});
  for (const LpSolution& s : {l1_min_lp(p), l1_min_enum(p)}) {
    CHECK(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.x_star[0] == doctest::Approx(1.0));
    CHECK(s.x_star[1] == doctest::Approx(0.0));
  }

  const ProblemInstance tie = with_y(SensingMatrix(1, 2, {1, 1}), {1});
  const LpSolution e = l1_min_enum(tie);
  CHECK(e.status == LpStatus::DegenerateTie);
  CHECK(e.objective == doctest::Approx(1.0));
  CHECK(l1_min_lp(tie).status == LpStatus::DegenerateTie);
  CHECK(lp_status_name(LpStatus::DegenerateTie) == "Degenerate-tie");

  const ProblemInstance id = with_y(SensingMatrix::identity(3), {0.5, -2.0, 0.0});
  const LpSolution s = l1_min_lp(id);
  CHECK(s.status == LpStatus::Optimal);
  for (std::size_t i = 0; i < 3; ++i) CHECK(s.x_star[i] == doctest::Approx(id.y[i]));
  CHECK(s.objective == doctest::Approx(2.5));
}

TEST_CASE("rank deficiency and size limits") {
  const ProblemInstance dup = with_y(SensingMatrix(2, 3, {1, 2, 3, 2, 4, 6}), {1, 5});
  CHECK(matrix_rank(dup.matrix) == 1);
  const LpSolution s = l1_min_lp(dup);
  CHECK(s.status == LpStatus::Infeasible);
  CHECK_FALSE(s.diagnostic.empty());

  GenSpec g;
  g.n = 21;
  g.m = 6;
  g.k_nonzeros = 2;
  CHECK_THROWS_AS(l1_min_enum(make_instance(g)), std::invalid_argument);
}

TEST_CASE("simplex and enumeration agree on random instances") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GenSpec g;
    g.n = 12;
    g.m = 6;
    g.k_nonzeros = 2;
    g.seed = seed;
    const ProblemInstance p = make_instance(g);
    const LpSolution lp = l1_min_lp(p);
    const LpSolution en = l1_min_enum(p);
    REQUIRE(lp.has_solution());
    REQUIRE(en.has_solution());
    CHECK(std::abs(lp.objective - en.objective) <= 1e-9);
    CHECK(max_abs(residual(p, lp.x_star)) <= 1e-8);
    CHECK(max_abs(residual(p, en.x_star)) <= 1e-8);
  }
}
