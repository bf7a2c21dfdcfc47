#include <doctest.h>

#include <stdexcept>

#include "csrecon/instance_gen.hpp"
#include "csrecon/l1_oracle.hpp"
#include "csrecon/serialization.hpp"
#include "csrecon/solvers.hpp"

using namespace csrecon;

TEST_CASE("instance round trip is bit-identical") {
  GenSpec g = GenSpec::from_ratios(40, 0.5, 0.1, 17);
  const ProblemInstance p = make_instance(g);
  const std::string text = instance_to_json(p);
  const ProblemInstance q = instance_from_json(text);
  CHECK(q.y == p.y);
  CHECK(q.truth.values == p.truth.values);
  CHECK(q.seed == p.seed);
  CHECK(std::equal(p.matrix.entries().begin(), p.matrix.entries().end(),
                   q.matrix.entries().begin()));
  CHECK(instance_to_json(q) == text);
}

TEST_CASE("malformed instance documents") {
  CHECK_THROWS_AS(instance_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(instance_from_json(R"({"m":1,"n":2,"matrix":[1]})"), std::invalid_argument);
}

TEST_CASE("gen spec documents") {
  GenSpec g;
  g.n = 30;
  g.m = 12;
  g.k_nonzeros = 3;
  g.matrix_kind = MatrixKind::SparsifiedGauss;
  g.keep_fraction = 0.25;
  g.seed = 4;
  const GenSpec back = gen_spec_from_json(gen_spec_to_json(g));
  CHECK(back.n == 30);
  CHECK(back.m == 12);
  CHECK(back.k_nonzeros == 3);
  CHECK(back.matrix_kind == MatrixKind::SparsifiedGauss);
  CHECK(back.keep_fraction == 0.25);
  CHECK(back.seed == 4);
  CHECK(gen_spec_from_json(R"({"n": 70})").m == GenSpec{}.m);
  CHECK_THROWS_AS(gen_spec_from_json(R"({"matrix_kind": "fourier"})"), std::invalid_argument);
}

TEST_CASE("result documents") {
  const ProblemInstance p = make_instance(GenSpec::from_ratios(40, 0.5, 0.1, 2));
  SolverConfig c;
  c.max_steps = 5;
  const std::string r = run_result_to_json(run(p, c));
  CHECK(r.find("\"success\":") != std::string::npos);
  CHECK(r.find("\"mse_trace\":") != std::string::npos);

  GenSpec small;
  small.n = 6;
  small.m = 3;
  small.k_nonzeros = 1;
  const std::string s = lp_solution_to_json(l1_min_lp(make_instance(small)));
  CHECK(s.find("\"status\":\"Optimal\"") != std::string::npos);
}
