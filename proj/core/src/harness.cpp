#include "csrecon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "csrecon/solvers.hpp"

namespace csrecon {

double tail_auto_scale(double decay, std::size_t steps, std::size_t reference_steps) {
  if (steps >= reference_steps) return 1.0;
  return std::pow(decay, static_cast<double>(reference_steps - steps));
}

double compressed_decay(std::size_t steps, double reference_decay,
                        std::size_t reference_steps) {
  if (steps == 0 || steps >= reference_steps) return reference_decay;
  return std::pow(reference_decay,
                  static_cast<double>(reference_steps) / static_cast<double>(steps));
}

SolverConfig desk_solver_config(Variant variant, double gamma) {
  SolverConfig c;
  c.variant = variant;
  c.gamma = gamma;
  c.max_steps = 2000;
  c.anneal.decay = compressed_decay(c.max_steps);
  return c;
}

SolverConfig tail_solver_config(Variant variant, double gamma, std::size_t steps, double decay) {
  SolverConfig c;
  c.variant = variant;
  c.gamma = gamma;
  c.max_steps = steps;
  c.anneal.decay = decay;
  c.anneal.auto_scale = tail_auto_scale(decay, steps);
  return c;
}

SolverConfig paper_solver_config(Variant variant, double gamma) {
  SolverConfig c;
  c.variant = variant;
  c.gamma = gamma;
  c.max_steps = kReferenceSteps;
  c.anneal.decay = 0.999;
  return c;
}

std::vector<double> parse_grid(std::string_view text) {
  auto to_double = [&](std::string_view piece) {
    const std::string s(piece);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid: cannot parse '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("grid: cannot parse '" + s + "'");
    return v;
  };

  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw std::invalid_argument("grid range must be min:max:step, got '" + std::string(text) +
                                  "'");
    }
    const double lo = to_double(text.substr(0, c1));
    const double hi = to_double(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = to_double(text.substr(c2 + 1));
    if (!(step > 0.0) || hi < lo) {
      throw std::invalid_argument("grid range needs step > 0 and max >= min");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5)) + 1;
    for (std::size_t j = 0; j < count; ++j) out.push_back(lo + step * static_cast<double>(j));
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                                          : comma - start);
    out.push_back(to_double(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

void PhaseGridSpec::validate() const {
  if (trials < 1) throw std::invalid_argument("phase grid: trials must be >= 1");
  if (alpha_grid.empty() || rho_grid.empty()) {
    throw std::invalid_argument("phase grid: alpha and rho grids must be nonempty");
  }
  for (double a : alpha_grid) {
    if (!(a > 0.0 && a < 1.0)) {
      throw std::invalid_argument("phase grid: alpha " + std::to_string(a) +
                                  " outside (0, 1)");
    }
  }
  for (double r : rho_grid) {
    if (!(r >= 0.0 && r < 1.0)) {
      throw std::invalid_argument("phase grid: rho " + std::to_string(r) + " outside [0, 1)");
    }
  }
  solver.validate();
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t m, std::size_t k,
                        std::size_t trial) noexcept {
  return keyed_hash(base_seed, "cell", m, k, trial);
}

namespace {

struct TrialOutcome {
  bool success = false;
  std::size_t steps = 0;
};

GenSpec cell_shape(const PhaseGridSpec& spec, double alpha, double rho) {
  return GenSpec::from_ratios(spec.n, alpha, rho, 0, spec.matrix_kind, spec.keep_fraction);
}

TrialOutcome run_trial(const PhaseGridSpec& spec, GenSpec g, std::size_t trial) {
  g.seed = cell_seed(spec.base_seed, g.m, g.k_nonzeros, trial);
  try {
    const RunResult r = run(make_instance(g), spec.solver);
    return {r.success, r.steps_taken};
  } catch (const std::exception&) {
    return {false, spec.solver.max_steps};
  }
}

PhaseCell assemble_cell(double alpha, double rho, const GenSpec& shape,
                        std::span<const TrialOutcome> outcomes) {
  PhaseCell cell;
  cell.alpha = alpha;
  cell.rho = rho;
  cell.m = shape.m;
  cell.k = shape.k_nonzeros;
  cell.trials = outcomes.size();
  double steps = 0.0;
  for (const TrialOutcome& o : outcomes) {
    cell.successes += o.success ? 1 : 0;
    steps += static_cast<double>(o.steps);
  }
  cell.rate = static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
  cell.mean_steps = steps / static_cast<double>(cell.trials);
  return cell;
}

}  // namespace

PhaseCell evaluate_cell(const PhaseGridSpec& spec, double alpha, double rho) {
  spec.solver.validate();
  const GenSpec shape = cell_shape(spec, alpha, rho);
  std::vector<TrialOutcome> outcomes(spec.trials);
  parallel_for(spec.trials, spec.jobs,
               [&](std::size_t t) { outcomes[t] = run_trial(spec, shape, t); });
  return assemble_cell(alpha, rho, shape, outcomes);
}

std::vector<PhaseCell> phase_sweep(const PhaseGridSpec& spec) {
  spec.validate();
  const std::size_t cols = spec.rho_grid.size();
  const std::size_t n_cells = spec.alpha_grid.size() * cols;
  std::vector<GenSpec> shapes;
  shapes.reserve(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    shapes.push_back(cell_shape(spec, spec.alpha_grid[c / cols], spec.rho_grid[c % cols]));
  }
  std::vector<TrialOutcome> outcomes(n_cells * spec.trials);
  parallel_for(outcomes.size(), spec.jobs, [&](std::size_t idx) {
    outcomes[idx] = run_trial(spec, shapes[idx / spec.trials], idx % spec.trials);
  });
  std::vector<PhaseCell> cells;
  cells.reserve(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    cells.push_back(assemble_cell(spec.alpha_grid[c / cols], spec.rho_grid[c % cols], shapes[c],
                                  std::span(outcomes).subspan(c * spec.trials, spec.trials)));
  }
  return cells;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string phase_csv(const std::vector<PhaseCell>& cells, double mse_success_threshold) {
  std::string out = "# mse_success_threshold=" + format_real(mse_success_threshold) + "\n";
  out += kPhaseCsvHeader;
  out += '\n';
  for (const PhaseCell& c : cells) {
    out += format_real(c.alpha) + ',' + format_real(c.rho) + ',' + std::to_string(c.m) + ',' +
           std::to_string(c.k) + ',' + std::to_string(c.trials) + ',' +
           std::to_string(c.successes) + ',' + format_real(c.rate) + ',' +
           format_real(c.mean_steps) + '\n';
  }
  return out;
}

void ConvergenceSpec::validate() const {
  GenSpec g;
  g.n = n;
  g.m = m;
  g.k_nonzeros = k_nonzeros;
  g.matrix_kind = matrix_kind;
  g.keep_fraction = keep_fraction;
  g.validate();
  if (trials < 1) throw std::invalid_argument("convergence: trials must be >= 1");
  if (max_steps < 1) throw std::invalid_argument("convergence: max_steps must be >= 1");
  if (!(decay > 0.0 && decay <= 1.0)) {
    throw std::invalid_argument("convergence: decay must lie in (0, 1]");
  }
  if (solvers.empty()) throw std::invalid_argument("convergence: solver list is empty");
  for (const SolverConfig& s : solvers) s.validate();
}

std::uint64_t convergence_seed(std::uint64_t base_seed, std::size_t trial) noexcept {
  return keyed_hash(base_seed, "convergence", trial);
}

ConvergenceReport convergence_compare(const ConvergenceSpec& spec) {
  spec.validate();
  const std::size_t solvers = spec.solvers.size();
  ConvergenceReport report;
  report.mean_mse.assign(solvers, Vector(spec.max_steps, 0.0));
  report.trial_mse.assign(solvers, std::vector<Vector>(spec.trials));
  report.trial_success.assign(solvers, std::vector<bool>(spec.trials, false));
  for (const SolverConfig& s : spec.solvers) report.labels.emplace_back(variant_name(s.variant));

  std::vector<std::vector<char>> success(solvers, std::vector<char>(spec.trials, 0));
  parallel_for(spec.trials, spec.jobs, [&](std::size_t t) {
    GenSpec g;
    g.n = spec.n;
    g.m = spec.m;
    g.k_nonzeros = spec.k_nonzeros;
    g.matrix_kind = spec.matrix_kind;
    g.keep_fraction = spec.keep_fraction;
    g.seed = convergence_seed(spec.base_seed, t);
    const ProblemInstance instance = make_instance(g);
    for (std::size_t s = 0; s < solvers; ++s) {
      SolverConfig cfg = spec.solvers[s];
      cfg.anneal.decay = spec.decay;
      cfg.max_steps = spec.max_steps;
      const RunResult r = run(instance, cfg);
      Vector trace = r.mse_trace;
      const double last =
          trace.empty() ? mse_per_entry(Vector(spec.n, 0.0), instance.truth.values) : trace.back();
      trace.resize(spec.max_steps, last);
      report.trial_mse[s][t] = std::move(trace);
      success[s][t] = r.success ? 1 : 0;
    }
  });

  for (std::size_t s = 0; s < solvers; ++s) {
    for (std::size_t t = 0; t < spec.trials; ++t) {
      report.trial_success[s][t] = success[s][t] != 0;
      for (std::size_t j = 0; j < spec.max_steps; ++j) {
        report.mean_mse[s][j] += report.trial_mse[s][t][j];
      }
    }
    for (double& v : report.mean_mse[s]) v /= static_cast<double>(spec.trials);
  }
  return report;
}

std::string convergence_csv(const ConvergenceReport& report) {
  std::string out = "step";
  for (const std::string& label : report.labels) out += ",mse_" + label;
  out += '\n';
  const std::size_t steps = report.mean_mse.empty() ? 0 : report.mean_mse.front().size();
  for (std::size_t j = 0; j < steps; ++j) {
    out += std::to_string(j + 1);
    for (const Vector& trace : report.mean_mse) out += ',' + format_real(trace[j]);
    out += '\n';
  }
  return out;
}

std::string threshold_csv(const std::vector<ThresholdPoint>& points) {
  std::string out(kThresholdCsvHeader);
  out += '\n';
  for (const ThresholdPoint& p : points) {
    out += format_real(p.alpha) + ',' + format_real(p.rho_c) + ',' + format_real(p.z_star) + '\n';
  }
  return out;
}

double median_steps_to(const std::vector<Vector>& trial_traces, double target) {
  if (trial_traces.empty()) throw std::invalid_argument("median_steps_to: no traces");
  Vector steps;
  steps.reserve(trial_traces.size());
  for (const Vector& trace : trial_traces) {
    const auto reached = steps_to_reach(trace, target);
    steps.push_back(reached ? static_cast<double>(*reached)
                            : static_cast<double>(trace.size() + 1));
  }
  std::sort(steps.begin(), steps.end());
  const std::size_t mid = steps.size() / 2;
  return steps.size() % 2 == 1 ? steps[mid] : 0.5 * (steps[mid - 1] + steps[mid]);
}

}  // namespace csrecon
