#pragma once

#include "ssrkit/decompose.hpp"
#include "ssrkit/model.hpp"
#include "ssrkit/observability.hpp"
#include "ssrkit/reductions.hpp"
#include "ssrkit/simulate.hpp"
#include "ssrkit/solvers.hpp"

#include <json.hpp>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace ssr::io {

/// Instance document: {"A": [[row-major]], "sensors": [{"id": i, "C": [[..]]}],
/// "s": int?, "measurements": [{"sensor": i, "Y": [..]}]?, "tolerances": {..}?}.
/// Unknown keys are collected as warnings, never errors.
struct ParsedInstance {
  LtiSystem sys;
  std::optional<int> s;
  std::optional<std::vector<Vec>> measurements;  // index-aligned with sensors
  Tolerances tol;
  std::vector<std::string> warnings;
};

ParsedInstance parse_instance(const nlohmann::json& doc);
ParsedInstance parse_instance_text(const std::string& text);
ParsedInstance load_instance(const std::string& path);

/// Wraps the parsed per-sensor vectors into a bundle and validates the
/// lengths against the observation horizons.  Throws ValidationError when the
/// instance carries no measurements.
MeasurementBundle bind_measurements(const ParsedInstance& inst,
                                    const std::vector<ObservabilityMatrix>& obs);

/// Short display label for an eigenvalue, e.g. "2", "-0.5", "1+2i".
std::string lambda_label(std::complex<double> lambda);

nlohmann::json matrix_json(const Mat& m);                 // {"rows","cols","colmajor":[..]}
nlohmann::json matrix_or_zero_json(const Mat& m, bool zero);
nlohmann::json vector_json(const Vec& v);
nlohmann::json nested_rows_json(const Mat& m);            // [[row-major]], instance format

Mat parse_matrix(const nlohmann::json& node, const std::string& what);
Vec parse_vector(const nlohmann::json& node, const std::string& what);

nlohmann::json instance_json(const LtiSystem& sys, std::optional<int> s = std::nullopt,
                             const MeasurementBundle* yb = nullptr,
                             const Tolerances* tol = nullptr);

nlohmann::json spectrum_json(const EigenStructure& es);
nlohmann::json analysis_json(const EigenStructure& es, const EigObsReport& eig,
                             const SparseObsReport& sparse, const EigenClassification* cls);
nlohmann::json bundle_json(const SubsystemBundle& b);
nlohmann::json solution_json(const SsrSolution& sol, const EigenStructure* es = nullptr);
nlohmann::json scenario_json(const AttackScenario& sc, const Vec& x0);

/// Reduced instance in the shared format plus a "mapping" block documenting
/// the back-translation.  The parser accepts (and ignores) "mapping".
nlohmann::json cs_reduction_json(const CsReduction& red, const CsInstance& inst);
nlohmann::json degeneracy_reduction_json(const DegeneracyReduction& red,
                                         const DegeneracyInstance& inst);

CsInstance parse_cs_instance(const nlohmann::json& doc);
DegeneracyInstance parse_degeneracy_instance(const nlohmann::json& doc);

}  // namespace ssr::io
