#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "csrecon/harness.hpp"
#include "csrecon/instance_gen.hpp"
#include "csrecon/l1_oracle.hpp"
#include "csrecon/phase_theory.hpp"
#include "csrecon/selftest.hpp"
#include "csrecon/serialization.hpp"
#include "csrecon/solvers.hpp"

namespace csrecon::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::size_t n = 500;
  std::string alpha = "0.5";
  std::string rho = "0.1";
  std::size_t trials = 20;
  std::string solver = "map-gamma";
  double gamma = 1.0;
  double decay = 0.999;
  double k_floor = 1e-9;
  double k0 = 0.0;
  double k0_scale = 1.0;
  std::size_t max_steps = 2000;
  double mse_threshold = 1e-3;
  std::uint64_t seed = 0;
  std::string matrix = "dense";
  std::string out = "-";
  std::string format;
  std::size_t jobs = 1;
  bool paper_scale = false;
  std::string instance_path;
  std::string config_path;
  std::string method = "lp";
  bool trace = false;

  CLI::App* sub = nullptr;
  bool given(const std::string& name) const { return sub->count("--" + name) > 0; }
};

double parse_single(const std::string& text, const char* flag) {
  const std::vector<double> v = parse_grid(text);
  if (v.size() != 1) throw UsageError(std::string("--") + flag + " expects one value, got '" +
                                      text + "'");
  return v.front();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void emit(const Options& o, const std::string& data, std::ostream& out) {
  if (o.out == "-") {
    out << data;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + o.out + "'");
  f << data;
}

std::pair<MatrixKind, double> matrix_kind(const Options& o) {
  if (o.matrix == "sparse10") return {MatrixKind::SparsifiedGauss, 0.1};
  return {MatrixKind::DenseGauss, 1.0};
}

Variant variant_of(const std::string& name) {
  const auto v = parse_variant(name);
  if (!v) throw UsageError("unknown solver '" + name + "'");
  return *v;
}

SolverConfig solver_config(const Options& o, Variant v) {
  SolverConfig c = o.paper_scale ? paper_solver_config(v, o.gamma) : desk_solver_config(v, o.gamma);
  if (o.given("max-steps")) c.max_steps = o.max_steps;
  if (!o.paper_scale) c.anneal.decay = compressed_decay(c.max_steps);
  if (o.given("decay")) c.anneal.decay = o.decay;
  c.anneal.auto_scale = o.k0_scale;
  c.anneal.k_floor = o.k_floor;
  if (o.given("k0")) c.anneal.k0 = o.k0;
  c.mse_success_threshold = o.mse_threshold;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

GenSpec gen_spec(const Options& o) {
  GenSpec g;
  if (!o.config_path.empty()) {
    const json doc = json::parse(read_file(o.config_path));
    if (!doc.contains("gen")) throw UsageError("config '" + o.config_path + "' has no \"gen\" block");
    g = gen_spec_from_json(doc.at("gen").dump());
  } else {
    const auto [kind, keep] = matrix_kind(o);
    g = GenSpec::from_ratios(o.n, parse_single(o.alpha, "alpha"), parse_single(o.rho, "rho"),
                             o.seed, kind, keep);
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return g;
}

ProblemInstance load_instance(const Options& o) {
  if (!o.instance_path.empty()) return instance_from_json(read_file(o.instance_path));
  return make_instance(gen_spec(o));
}

void add_out(CLI::App* sub, Options& o, bool with_format) {
  sub->add_option("--out", o.out, "Output path, '-' for standard output");
  if (with_format) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  }
}

void add_solver(CLI::App* sub, Options& o) {
  sub->add_option("--gamma", o.gamma, "Partition ratio for the 'partial' solver");
  sub->add_option("--decay", o.decay, "Threshold decay per step");
  sub->add_option("--k-floor", o.k_floor, "Lower bound on the threshold");
  sub->add_option("--k0", o.k0, "Initial threshold (default: scaled max |F^T y|)");
  sub->add_option("--k0-scale", o.k0_scale, "Multiplier on the automatic initial threshold");
  sub->add_option("--max-steps", o.max_steps, "Step budget");
  sub->add_option("--mse-threshold", o.mse_threshold, "Per-entry MSE below which a run succeeds");
  sub->add_flag("--paper-scale", o.paper_scale, "Full-scale protocol defaults");
}

void add_gen(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "Signal length N");
  sub->add_option("--alpha", o.alpha, "M / N");
  sub->add_option("--rho", o.rho, "K / N");
  sub->add_option("--seed", o.seed, "Base seed");
  sub->add_option("--matrix", o.matrix, "Sensing matrix ensemble")
      ->check(CLI::IsMember({"dense", "sparse10"}));
}

std::string phase_json(const std::vector<PhaseCell>& cells, double threshold) {
  json rows = json::array();
  for (const PhaseCell& c : cells) {
    rows.push_back({{"alpha", c.alpha}, {"rho", c.rho}, {"m", c.m}, {"k", c.k},
                    {"trials", c.trials}, {"successes", c.successes}, {"rate", c.rate},
                    {"mean_steps", c.mean_steps}});
  }
  return json{{"mse_success_threshold", threshold}, {"cells", rows}}.dump(2) + "\n";
}

std::string threshold_json(const std::vector<ThresholdPoint>& pts) {
  json rows = json::array();
  for (const ThresholdPoint& p : pts) {
    rows.push_back({{"alpha", p.alpha}, {"rho_c", p.rho_c}, {"z_star", p.z_star}});
  }
  return rows.dump(2) + "\n";
}

std::string convergence_json(const ConvergenceReport& r) {
  json doc = json::object();
  for (std::size_t s = 0; s < r.labels.size(); ++s) doc["mse_" + r.labels[s]] = r.mean_mse[s];
  return doc.dump(2) + "\n";
}

int cmd_reconstruct(const Options& o, std::ostream& out) {
  const SolverConfig c = solver_config(o, variant_of(o.solver));
  const ProblemInstance inst = load_instance(o);
  RunResult r = run(inst, c);
  if (!o.trace) {
    r.mse_trace.clear();
    r.k_trace.clear();
    r.gamma_trace.clear();
  }
  emit(o, run_result_to_json(r) + "\n", out);
  return kExitOk;
}

int cmd_phase(const Options& o, std::ostream& out, std::ostream& err) {
  PhaseGridSpec spec;
  spec.n = o.n;
  spec.alpha_grid = parse_grid(o.alpha);
  spec.rho_grid = parse_grid(o.rho);
  spec.trials = o.trials;
  spec.solver = solver_config(o, variant_of(o.solver));
  spec.base_seed = o.seed;
  std::tie(spec.matrix_kind, spec.keep_fraction) = matrix_kind(o);
  spec.jobs = o.jobs;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto cells = phase_sweep(spec);
  err << "phase-diagram: " << cells.size() << " cells\n";
  const double thr = spec.solver.mse_success_threshold;
  emit(o, o.format == "json" ? phase_json(cells, thr) : phase_csv(cells, thr), out);
  return kExitOk;
}

int cmd_threshold(const Options& o, std::ostream& out) {
  const std::vector<double> grid = o.given("alpha") ? parse_grid(o.alpha) : default_alpha_grid();
  for (double a : grid) {
    if (!(a > 0.01 && a < 0.99)) {
      throw UsageError("--alpha value " + format_real(a) + " outside (0.01, 0.99)");
    }
  }
  const auto pts = threshold_curve(grid);
  emit(o, o.format == "json" ? threshold_json(pts) : threshold_csv(pts), out);
  return kExitOk;
}

int cmd_convergence(const Options& o, std::ostream& out) {
  ConvergenceSpec spec;
  spec.n = o.n;
  const GenSpec g = GenSpec::from_ratios(o.n, parse_single(o.alpha, "alpha"),
                                         parse_single(o.rho, "rho"), o.seed);
  spec.m = g.m;
  spec.k_nonzeros = g.k_nonzeros;
  spec.trials = o.trials;
  spec.decay = o.decay;
  spec.max_steps = o.max_steps;
  spec.base_seed = o.seed;
  std::tie(spec.matrix_kind, spec.keep_fraction) = matrix_kind(o);
  spec.jobs = o.jobs;
  std::stringstream list(o.solver);
  for (std::string name; std::getline(list, name, ',');) {
    SolverConfig c;
    c.variant = variant_of(name);
    c.gamma = o.gamma;
    c.anneal.k_floor = o.k_floor;
    if (o.given("k0")) c.anneal.k0 = o.k0;
    c.mse_success_threshold = o.mse_threshold;
    spec.solvers.push_back(c);
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const ConvergenceReport r = convergence_compare(spec);
  emit(o, o.format == "json" ? convergence_json(r) : convergence_csv(r), out);
  return kExitOk;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const ProblemInstance inst = load_instance(o);
  const LpSolution s = o.method == "enum" ? l1_min_enum(inst) : l1_min_lp(inst);
  emit(o, lp_solution_to_json(s) + "\n", out);
  return kExitOk;
}

int cmd_selftest(const Options& o, std::ostream& out) {
  SelftestOptions so;
  so.seed = o.given("seed") ? o.seed : so.seed;
  std::ostringstream s;
  bool ok = true;
  for (const CheckResult& c : run_selftest(so)) {
    ok = ok && c.passed;
    s << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) s << " (" << c.detail << ")";
    s << "\n";
  }
  emit(o, s.str(), out);
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse signal reconstruction by annealed soft thresholding"};
  app.name("csrecon");
  app.require_subcommand(1);

  Options o;

  auto* rec = app.add_subcommand("reconstruct", "Solve one instance, print the run as JSON");
  add_gen(rec, o);
  add_solver(rec, o);
  add_out(rec, o, false);
  rec->add_option("--solver", o.solver, "naive | partial | map-gamma | amp-external | amp");
  rec->add_option("--instance", o.instance_path, "Instance JSON instead of generating one");
  rec->add_option("--config", o.config_path, "JSON document with a \"gen\" block");
  rec->add_flag("--trace", o.trace, "Include mse/k/gamma traces");

  auto* phase = app.add_subcommand("phase-diagram", "Success rates over an (alpha, rho) grid");
  add_gen(phase, o);
  add_solver(phase, o);
  add_out(phase, o, true);
  phase->add_option("--solver", o.solver, "Solver variant");
  phase->add_option("--trials", o.trials, "Trials per cell");
  phase->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* thr = app.add_subcommand("threshold-curve", "Reconstruction threshold rho_c(alpha)");
  thr->add_option("--alpha", o.alpha, "Alpha grid (default 0.05:0.95:0.05)");
  add_out(thr, o, true);

  auto* conv = app.add_subcommand("convergence", "Mean MSE traces of several solvers");
  add_gen(conv, o);
  add_out(conv, o, true);
  conv->add_option("--solver", o.solver, "Comma-separated solver list");
  conv->add_option("--trials", o.trials, "Trials");
  conv->add_option("--gamma", o.gamma, "Partition ratio for 'partial'");
  conv->add_option("--decay", o.decay, "Threshold decay per step");
  conv->add_option("--k-floor", o.k_floor, "Lower bound on the threshold");
  conv->add_option("--k0", o.k0, "Initial threshold");
  conv->add_option("--max-steps", o.max_steps, "Steps per trace");
  conv->add_option("--mse-threshold", o.mse_threshold, "Success threshold");
  conv->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* orc = app.add_subcommand("oracle", "Exact l1 minimiser of a small instance");
  add_gen(orc, o);
  add_out(orc, o, false);
  orc->add_option("--method", o.method, "lp | enum")->check(CLI::IsMember({"lp", "enum"}));
  orc->add_option("--instance", o.instance_path, "Instance JSON");
  orc->add_option("--config", o.config_path, "JSON document with a \"gen\" block");

  auto* self = app.add_subcommand("selftest", "Fast invariant checks");
  self->add_option("--seed", o.seed, "Seed for random cases");
  add_out(self, o, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  const bool full_scale_n = [&] {
    for (CLI::App* s : {rec, phase, conv}) {
      if (s->parsed() && o.paper_scale && s->count("--n") == 0) return true;
    }
    return false;
  }();
  if (full_scale_n) o.n = 1000;
  if (conv->parsed()) {
    if (conv->count("--n") == 0) o.n = 1000;
    if (conv->count("--decay") == 0) o.decay = 0.95;
    if (conv->count("--max-steps") == 0) o.max_steps = 400;
    if (conv->count("--solver") == 0) o.solver = "amp,map-gamma";
  }
  if (phase->parsed()) {
    if (o.paper_scale && phase->count("--trials") == 0) o.trials = 50;
    if (phase->count("--alpha") == 0) o.alpha = "0.1:0.9:0.1";
    if (phase->count("--rho") == 0) o.rho = "0.05:0.5:0.05";
  }
  if (orc->parsed()) {
    if (orc->count("--n") == 0) o.n = 12;
    if (orc->count("--rho") == 0) o.rho = "0.1666666667";
  }

  try {
    for (CLI::App* s : app.get_subcommands()) o.sub = s;
    if (rec->parsed()) return cmd_reconstruct(o, out);
    if (phase->parsed()) return cmd_phase(o, out, err);
    if (thr->parsed()) return cmd_threshold(o, out);
    if (conv->parsed()) return cmd_convergence(o, out);
    if (orc->parsed()) return cmd_oracle(o, out);
    if (self->parsed()) return cmd_selftest(o, out);
  } catch (const UsageError& e) {
    err << "csrecon: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "csrecon: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace csrecon::cli
