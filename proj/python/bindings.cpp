#include "ssrkit/io.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using nlohmann::json;

namespace {

json with_warnings(json doc, const ssr::io::ParsedInstance& inst) {
  if (!inst.warnings.empty()) doc["warnings"] = inst.warnings;
  return doc;
}

std::string analyze_text(const std::string& text, int s, std::uint64_t budget, int threads) {
  const auto inst = ssr::io::parse_instance_text(text);
  const auto& sys = inst.sys;
  const auto es = ssr::eigenstructure(sys.A, inst.tol);
  const auto eig = ssr::eigenvalue_observability(sys, es, inst.tol);
  const auto sparse = ssr::sparse_observability(sys, inst.tol, budget, threads);
  std::optional<ssr::EigenClassification> cls;
  const int s_eff = s >= 0 ? s : inst.s.value_or(-1);
  if (s_eff >= 0) {
    const auto ds = ssr::canonical_projectors(es, inst.tol);
    const auto bundle = ssr::decompose_system(sys, es, ds, inst.tol);
    cls = ssr::classify_eigenvalues(sys, bundle, s_eff, inst.tol, budget, threads);
  }
  return with_warnings(ssr::io::analysis_json(es, eig, sparse, cls ? &*cls : nullptr), inst).dump();
}

std::string decompose_text(const std::string& text) {
  const auto inst = ssr::io::parse_instance_text(text);
  const auto es = ssr::eigenstructure(inst.sys.A, inst.tol);
  const auto ds = ssr::canonical_projectors(es, inst.tol);
  const auto bundle = ssr::decompose_system(inst.sys, es, ds, inst.tol);
  return with_warnings(ssr::io::bundle_json(bundle), inst).dump();
}

std::string solve_text(const std::string& text, const std::string& method, int s,
                       bool exhaustive_unique, bool prune, bool trimmed, std::uint64_t budget,
                       int threads) {
  const auto inst = ssr::io::parse_instance_text(text);
  const auto& sys = inst.sys;
  const auto obs = ssr::all_observability_matrices(sys, inst.tol);
  const auto yb = ssr::io::bind_measurements(inst, obs);

  const int s_eff = s >= 0 ? s : inst.s.value_or(-1);
  if (s_eff < 0)
    throw ssr::ValidationError("solve needs an attack budget: pass s or put \"s\" in the instance");
  if (method != "decompose" && method != "brute" && method != "vote")
    throw ssr::ValidationError("method must be decompose, brute or vote");

  ssr::SolveOptions opt;
  opt.s_max = s_eff;
  opt.exhaustive_unique = exhaustive_unique;
  opt.budget = budget;
  opt.threads = threads;
  opt.prune_identified = prune;

  ssr::SsrSolution sol;
  std::optional<ssr::EigenStructure> es;
  if (method == "brute") {
    sol = ssr::brute_force_ssr(sys, obs, yb, opt, inst.tol);
  } else {
    es = ssr::eigenstructure(sys.A, inst.tol);
    const auto ds = ssr::canonical_projectors(*es, inst.tol);
    const auto bundle = ssr::decompose_system(sys, *es, ds, inst.tol);
    const auto cls = ssr::classify_eigenvalues(sys, bundle, s_eff, inst.tol, budget, threads);
    sol = method == "vote" ? ssr::vote_ssr(sys, bundle, cls, yb, opt, inst.tol, trimmed)
                           : ssr::decomposition_ssr(sys, bundle, cls, yb, opt, inst.tol);
  }
  return with_warnings(ssr::io::solution_json(sol, es ? &*es : nullptr), inst).dump();
}

std::string simulate_text(const std::string& text, const std::vector<double>& x0_list,
                          const std::string& attack, int s, double noise, double magnitude,
                          std::uint64_t seed, std::uint64_t budget, int threads) {
  const auto inst = ssr::io::parse_instance_text(text);
  const auto& sys = inst.sys;
  const auto obs = ssr::all_observability_matrices(sys, inst.tol);
  if (static_cast<int>(x0_list.size()) != sys.n())
    throw ssr::ValidationError("x0 has " + std::to_string(x0_list.size()) +
                               " entries, the system needs " + std::to_string(sys.n()));
  ssr::Vec x0(sys.n());
  for (int k = 0; k < sys.n(); ++k) x0(k) = x0_list[static_cast<std::size_t>(k)];

  ssr::AttackScenario sc;
  if (attack == "random")
    sc = ssr::random_attack(sys, obs, s, magnitude, seed);
  else if (attack == "stealth")
    sc = ssr::stealth_attack(sys, obs, x0, s, inst.tol, budget, threads);
  else if (attack != "none")
    throw ssr::ValidationError("attack must be none, random or stealth");

  const auto yb = ssr::measure(sys, obs, x0, sc, noise, seed + 1);
  json doc = ssr::io::scenario_json(sc, x0);
  doc["instance"] =
      ssr::io::instance_json(sys, s > 0 ? std::optional<int>(s) : inst.s, &yb, &inst.tol);
  return with_warnings(std::move(doc), inst).dump();
}

std::string reduce_cs_text(const std::string& text, double rank_rtol) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ssr::ValidationError(std::string("JSON parse error: ") + e.what());
  }
  const auto inst = ssr::io::parse_cs_instance(doc);
  const auto red = ssr::cs_to_ssr(inst, rank_rtol);
  return ssr::io::cs_reduction_json(red, inst).dump();
}

std::string reduce_degeneracy_text(const std::string& text, double rank_rtol) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ssr::ValidationError(std::string("JSON parse error: ") + e.what());
  }
  const auto inst = ssr::io::parse_degeneracy_instance(doc);
  const auto red = ssr::degeneracy_to_unobservability(inst, rank_rtol);
  return ssr::io::degeneracy_reduction_json(red, inst).dump();
}

}  // namespace

PYBIND11_MODULE(_ssrkit, m) {
  m.doc() = "state reconstruction for linear systems under sensor attacks";

  py::register_exception<ssr::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ssr::NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ssr::InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<ssr::BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  m.def("analyze", &analyze_text, py::arg("instance"), py::arg("s") = -1,
        py::arg("budget") = ssr::kDefaultBudget, py::arg("threads") = 1,
        "Spectral and observability report as a JSON string.");
  m.def("decompose", &decompose_text, py::arg("instance"),
        "Per-eigenvalue subsystem report as a JSON string.");
  m.def("solve", &solve_text, py::arg("instance"), py::arg("method") = "decompose",
        py::arg("s") = -1, py::arg("exhaustive_unique") = false, py::arg("prune") = false,
        py::arg("trimmed") = false, py::arg("budget") = ssr::kDefaultBudget,
        py::arg("threads") = 1, "Reconstruct the state and attacked sensors; JSON string.");
  m.def("simulate", &simulate_text, py::arg("instance"), py::arg("x0"),
        py::arg("attack") = "none", py::arg("s") = 0, py::arg("noise") = 0.0,
        py::arg("magnitude") = 1.0, py::arg("seed") = 0,
        py::arg("budget") = ssr::kDefaultBudget, py::arg("threads") = 1,
        "Measure under an attack scenario; returns scenario + instance JSON.");
  m.def("reduce_cs", &reduce_cs_text, py::arg("problem"),
        py::arg("rank_rtol") = ssr::Tolerances{}.rank_rtol,
        "Rewrite a sparsest-solution problem as a reconstruction instance.");
  m.def("reduce_degeneracy", &reduce_degeneracy_text, py::arg("problem"),
        py::arg("rank_rtol") = ssr::Tolerances{}.rank_rtol,
        "Rewrite a square-submatrix singularity question as removal robustness.");
}
