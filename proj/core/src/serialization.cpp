#include "csrecon/serialization.hpp"

#include <json.hpp>
#include <stdexcept>

namespace csrecon {

using nlohmann::json;

namespace {

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

template <typename T>
T field(const json& doc, const char* name) {
  if (!doc.contains(name)) {
    throw std::invalid_argument(std::string("JSON document lacks field '") + name + "'");
  }
  try {
    return doc.at(name).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("JSON field '") + name + "': " + e.what());
  }
}

}  // namespace

std::string instance_to_json(const ProblemInstance& instance) {
  json doc;
  doc["m"] = instance.m();
  doc["n"] = instance.n();
  doc["seed"] = instance.seed;
  doc["matrix"] = Vector(instance.matrix.entries().begin(), instance.matrix.entries().end());
  json x0 = json::array();
  for (std::size_t i : instance.truth.support) {
    x0.push_back(json::array({i, instance.truth.values[i]}));
  }
  doc["x0"] = std::move(x0);
  doc["y"] = instance.y;
  doc["tags"] = instance.tags;
  return doc.dump();
}

ProblemInstance instance_from_json(std::string_view text) {
  const json doc = parse_document(text);
  const auto m = field<std::size_t>(doc, "m");
  const auto n = field<std::size_t>(doc, "n");
  auto entries = field<Vector>(doc, "matrix");
  auto pairs = field<std::vector<std::pair<std::size_t, double>>>(doc, "x0");
  auto y = field<Vector>(doc, "y");
  if (y.size() != m) throw std::invalid_argument("instance JSON: y has wrong length");

  Vector values(n, 0.0);
  for (const auto& [i, v] : pairs) {
    if (i >= n) throw std::invalid_argument("instance JSON: x0 index out of range");
    values[i] = v;
  }
  ProblemInstance p;
  p.matrix = SensingMatrix(m, n, std::move(entries));
  p.truth = SparseSignal::from_values(std::move(values));
  p.y = std::move(y);
  p.seed = doc.contains("seed") ? field<std::uint64_t>(doc, "seed") : 0;
  if (doc.contains("tags")) p.tags = field<std::vector<std::string>>(doc, "tags");
  return p;
}

std::string run_result_to_json(const RunResult& r) {
  json doc;
  doc["variant"] = std::string(variant_name(r.variant));
  doc["seed"] = r.seed;
  doc["steps"] = r.steps_taken;
  doc["success"] = r.success;
  doc["mse_trace"] = r.mse_trace;
  doc["k_trace"] = r.k_trace;
  doc["gamma_trace"] = r.gamma_trace;
  doc["residual_norm_final"] = r.residual_norm_final;
  if (!r.diagnostic.empty()) doc["diagnostic"] = r.diagnostic;
  return doc.dump();
}

std::string lp_solution_to_json(const LpSolution& s) {
  json doc;
  doc["x_star"] = s.x_star;
  doc["objective"] = s.objective;
  doc["status"] = std::string(lp_status_name(s.status));
  if (!s.diagnostic.empty()) doc["diagnostic"] = s.diagnostic;
  return doc.dump();
}

std::string gen_spec_to_json(const GenSpec& spec) {
  json doc;
  doc["n"] = spec.n;
  doc["m"] = spec.m;
  doc["k_nonzeros"] = spec.k_nonzeros;
  doc["matrix_kind"] = spec.matrix_kind == MatrixKind::DenseGauss ? "dense" : "sparse";
  doc["keep_fraction"] = spec.keep_fraction;
  doc["seed"] = spec.seed;
  return doc.dump();
}

GenSpec gen_spec_from_json(std::string_view text) {
  const json doc = parse_document(text);
  GenSpec g;
  if (doc.contains("n")) g.n = field<std::size_t>(doc, "n");
  if (doc.contains("m")) g.m = field<std::size_t>(doc, "m");
  if (doc.contains("k_nonzeros")) g.k_nonzeros = field<std::size_t>(doc, "k_nonzeros");
  if (doc.contains("matrix_kind")) {
    const auto kind = field<std::string>(doc, "matrix_kind");
    if (kind == "dense") {
      g.matrix_kind = MatrixKind::DenseGauss;
    } else if (kind == "sparse") {
      g.matrix_kind = MatrixKind::SparsifiedGauss;
    } else {
      throw std::invalid_argument("GenSpec JSON: unknown matrix_kind '" + kind + "'");
    }
  }
  if (doc.contains("keep_fraction")) g.keep_fraction = field<double>(doc, "keep_fraction");
  if (doc.contains("seed")) g.seed = field<std::uint64_t>(doc, "seed");
  g.validate();
  return g;
}

}  // namespace csrecon
