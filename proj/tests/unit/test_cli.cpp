#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using csrecon::cli::cli_main;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("threshold-curve to standard output") {
  const Outcome r = invoke({"threshold-curve", "--out", "-"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("alpha,rho_c,z_star\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 20);
  CHECK(r.err.empty());

  const Outcome j = invoke({"threshold-curve", "--alpha", "0.5", "--format", "json"});
  CHECK(j.code == 0);
  CHECK(j.out.find("\"rho_c\"") != std::string::npos);
}

TEST_CASE("reconstruct deep inside the success region") {
  const Outcome r = invoke(
      {"reconstruct", "--n", "200", "--alpha", "0.5", "--rho", "0.1", "--solver", "amp", "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"success\":true") != std::string::npos);
}

TEST_CASE("usage errors name the offending token") {
  Outcome r = invoke({"reconstruct", "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--bogus") != std::string::npos);
  CHECK(r.out.empty());

  r = invoke({"reconstruct", "--solver", "lasso"});
  CHECK(r.code == 1);
  CHECK(r.err.find("lasso") != std::string::npos);

  r = invoke({"phase-diagram", "--matrix", "fourier"});
  CHECK(r.code == 1);
  CHECK(r.err.find("fourier") != std::string::npos);

  r = invoke({"threshold-curve", "--alpha", "1.5"});
  CHECK(r.code == 1);
  CHECK(r.err.find("1.5") != std::string::npos);

  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"reconstruct", "--decay", "0"}).code == 1);
}

TEST_CASE("runtime failures exit 2") {
  const Outcome r = invoke({"oracle", "--instance", "/nonexistent/instance.json"});
  CHECK(r.code == 2);
  CHECK(r.err.find("/nonexistent/instance.json") != std::string::npos);
}

TEST_CASE("phase-diagram is byte-stable") {
  const std::vector<std::string> args{"phase-diagram", "--n", "60", "--alpha", "0.5", "--rho",
                                      "0,0.1", "--trials", "2", "--max-steps", "100"};
  const Outcome a = invoke(args);
  const Outcome b = invoke(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("alpha,rho,m,k,trials,successes,rate,mean_steps\n") != std::string::npos);
}

TEST_CASE("convergence and oracle") {
  const Outcome c = invoke({"convergence", "--n", "100", "--trials", "2", "--max-steps", "30"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("step,mse_amp,mse_map-gamma\n", 0) == 0);

  const Outcome o = invoke({"oracle", "--seed", "3", "--method", "enum"});
  CHECK(o.code == 0);
  CHECK(o.out.find("\"objective\"") != std::string::npos);
}

TEST_CASE("config file with a gen block and --out path") {
  const std::string cfg = "cli_test_config.json";
  const std::string dest = "cli_test_result.json";
  {
    std::ofstream f(cfg);
    f << R"({"gen": {"n": 12, "m": 6, "k_nonzeros": 2, "seed": 5}})";
  }
  const Outcome r = invoke({"oracle", "--config", cfg, "--out", dest});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(dest);
  std::stringstream s;
  s << in.rdbuf();
  CHECK(s.str().find("\"status\"") != std::string::npos);
  std::remove(cfg.c_str());
  std::remove(dest.c_str());
}

TEST_CASE("selftest subcommand") {
  const Outcome r = invoke({"selftest"});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
}
