#include "ssrkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ssr::io {

using nlohmann::json;

namespace {

double require_number(const json& node, const std::string& what) {
  if (!node.is_number()) throw ValidationError(what + ": expected a number");
  return node.get<double>();
}

int require_int(const json& node, const std::string& what) {
  if (!node.is_number_integer()) throw ValidationError(what + ": expected an integer");
  return node.get<int>();
}

void warn_unknown_keys(const json& obj, const std::set<std::string>& known,
                       const std::string& where, std::vector<std::string>& warnings) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key)) warnings.push_back("ignoring unknown key \"" + key + "\" in " + where);
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

Mat parse_matrix(const json& node, const std::string& what) {
  if (!node.is_array() || node.empty()) throw ValidationError(what + ": expected a nonempty array of rows");
  const std::size_t rows = node.size();
  if (!node[0].is_array()) throw ValidationError(what + ": rows must be arrays");
  const std::size_t cols = node[0].size();
  if (cols == 0) throw ValidationError(what + ": rows must not be empty");
  Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = node[i];
    if (!row.is_array() || row.size() != cols)
      throw ValidationError(what + ": row " + std::to_string(i + 1) + " has " +
                            std::to_string(row.size()) + " entries, expected " +
                            std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          require_number(row[j], what + "[" + std::to_string(i + 1) + "]");
  }
  return m;
}

Vec parse_vector(const json& node, const std::string& what) {
  if (!node.is_array()) throw ValidationError(what + ": expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t k = 0; k < node.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = require_number(node[k], what);
  return v;
}

ParsedInstance parse_instance(const json& doc) {
  if (!doc.is_object()) throw ValidationError("instance: top level must be a JSON object");

  ParsedInstance out;
  warn_unknown_keys(doc, {"A", "sensors", "s", "measurements", "tolerances", "mapping"},
                    "the instance", out.warnings);

  if (!doc.contains("A")) throw ValidationError("instance: missing \"A\"");
  const Mat A = parse_matrix(doc["A"], "\"A\"");

  if (!doc.contains("sensors") || !doc["sensors"].is_array() || doc["sensors"].empty())
    throw ValidationError("instance: missing or empty \"sensors\" array");
  std::vector<SensorDef> sensors;
  for (const auto& snode : doc["sensors"]) {
    if (!snode.is_object()) throw ValidationError("instance: sensor entries must be objects");
    warn_unknown_keys(snode, {"id", "C"}, "a sensor entry", out.warnings);
    if (!snode.contains("id") || !snode.contains("C"))
      throw ValidationError("instance: sensor entries need \"id\" and \"C\"");
    SensorDef def;
    def.id = require_int(snode["id"], "sensor id");
    def.C = parse_matrix(snode["C"], "sensor " + std::to_string(def.id) + " \"C\"");
    sensors.push_back(std::move(def));
  }
  out.sys = validate_system(A, std::move(sensors));

  if (doc.contains("s")) {
    const int s = require_int(doc["s"], "\"s\"");
    if (s < 0) throw ValidationError("instance: \"s\" must be nonnegative");
    out.s = s;
  }

  if (doc.contains("measurements")) {
    if (!doc["measurements"].is_array())
      throw ValidationError("instance: \"measurements\" must be an array");
    std::vector<Vec> ys(static_cast<std::size_t>(out.sys.N()));
    std::vector<bool> seen(static_cast<std::size_t>(out.sys.N()), false);
    for (const auto& mnode : doc["measurements"]) {
      if (!mnode.is_object()) throw ValidationError("instance: measurement entries must be objects");
      warn_unknown_keys(mnode, {"sensor", "Y"}, "a measurement entry", out.warnings);
      if (!mnode.contains("sensor") || !mnode.contains("Y"))
        throw ValidationError("instance: measurement entries need \"sensor\" and \"Y\"");
      const int id = require_int(mnode["sensor"], "measurement sensor id");
      if (id < 1 || id > out.sys.N())
        throw ValidationError("instance: measurement for unknown sensor " + std::to_string(id));
      if (seen[static_cast<std::size_t>(id - 1)])
        throw ValidationError("instance: duplicate measurement for sensor " + std::to_string(id));
      seen[static_cast<std::size_t>(id - 1)] = true;
      ys[static_cast<std::size_t>(id - 1)] =
          parse_vector(mnode["Y"], "sensor " + std::to_string(id) + " \"Y\"");
      if (!ys[static_cast<std::size_t>(id - 1)].allFinite())
        throw ValidationError("instance: non-finite measurement for sensor " + std::to_string(id));
    }
    for (int i = 0; i < out.sys.N(); ++i)
      if (!seen[static_cast<std::size_t>(i)])
        throw ValidationError("instance: measurements must cover every sensor; sensor " +
                              std::to_string(i + 1) + " is missing");
    out.measurements = std::move(ys);
  }

  if (doc.contains("tolerances")) {
    const auto& tnode = doc["tolerances"];
    if (!tnode.is_object()) throw ValidationError("instance: \"tolerances\" must be an object");
    warn_unknown_keys(tnode, {"rank_rtol", "eig_cluster", "residual", "vote"}, "\"tolerances\"",
                      out.warnings);
    if (tnode.contains("rank_rtol")) out.tol.rank_rtol = require_number(tnode["rank_rtol"], "rank_rtol");
    if (tnode.contains("eig_cluster"))
      out.tol.eig_cluster = require_number(tnode["eig_cluster"], "eig_cluster");
    if (tnode.contains("residual")) out.tol.residual = require_number(tnode["residual"], "residual");
    if (tnode.contains("vote")) out.tol.vote = require_number(tnode["vote"], "vote");
    out.tol.validate();
  }
  return out;
}

ParsedInstance parse_instance_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("JSON parse error: ") + e.what());
  }
  return parse_instance(doc);
}

ParsedInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open instance file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_instance_text(buffer.str());
}

MeasurementBundle bind_measurements(const ParsedInstance& inst,
                                    const std::vector<ObservabilityMatrix>& obs) {
  if (!inst.measurements)
    throw ValidationError("instance carries no measurements; add a \"measurements\" array or "
                          "generate one with the simulator");
  MeasurementBundle yb;
  yb.Y = *inst.measurements;
  validate_measurements(inst.sys, obs, yb);
  return yb;
}

std::string lambda_label(std::complex<double> lambda) {
  if (lambda.imag() == 0.0) return format_real(lambda.real());
  return format_real(lambda.real()) + (lambda.imag() < 0 ? "-" : "+") +
         format_real(std::abs(lambda.imag())) + "i";
}

json matrix_json(const Mat& m) {
  json data = json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) data.push_back(m(i, j));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"colmajor", std::move(data)}};
}

json matrix_or_zero_json(const Mat& m, bool zero) {
  if (zero) return json{{"zero", true}, {"rows", m.rows()}, {"cols", m.cols()}};
  return matrix_json(m);
}

json vector_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json nested_rows_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json instance_json(const LtiSystem& sys, std::optional<int> s, const MeasurementBundle* yb,
                   const Tolerances* tol) {
  json doc;
  doc["A"] = nested_rows_json(sys.A);
  json sensors = json::array();
  for (const auto& def : sys.sensors)
    sensors.push_back(json{{"id", def.id}, {"C", nested_rows_json(def.C)}});
  doc["sensors"] = std::move(sensors);
  if (s) doc["s"] = *s;
  if (yb) {
    json ms = json::array();
    for (std::size_t i = 0; i < yb->Y.size(); ++i)
      ms.push_back(json{{"sensor", static_cast<int>(i) + 1}, {"Y", vector_json(yb->Y[i])}});
    doc["measurements"] = std::move(ms);
  }
  if (tol)
    doc["tolerances"] = json{{"rank_rtol", tol->rank_rtol},
                             {"eig_cluster", tol->eig_cluster},
                             {"residual", tol->residual},
                             {"vote", tol->vote}};
  return doc;
}

json spectrum_json(const EigenStructure& es) {
  json blocks = json::array();
  for (const auto& blk : es.blocks) {
    blocks.push_back(json{{"lambda", {blk.lambda.real(), blk.lambda.imag()}},
                          {"label", lambda_label(blk.lambda)},
                          {"alpha", blk.alpha},
                          {"gamma", blk.gamma},
                          {"dim", blk.dim},
                          {"basis", matrix_json(blk.basis)}});
  }
  return blocks;
}

json analysis_json(const EigenStructure& es, const EigObsReport& eig,
                   const SparseObsReport& sparse, const EigenClassification* cls) {
  json doc;
  doc["spectrum"] = spectrum_json(es);

  json sets = json::object();
  for (const auto& entry : eig.entries) sets[lambda_label(entry.lambda)] = entry.sensors;
  doc["eig"] = json{{"index", eig.index}, {"S", std::move(sets)}};

  doc["sparse"] = json{{"index", sparse.index},
                       {"witness", sparse.witness},
                       {"exhaustive", sparse.exhaustive},
                       {"tests", sparse.tests}};

  if (cls) {
    auto labels = [&](const std::vector<int>& blocks) {
      json out = json::array();
      for (int j : blocks) out.push_back(lambda_label(es.blocks[static_cast<std::size_t>(j)].lambda));
      return out;
    };
    bool exhaustive = true;
    for (bool e : cls->exhaustive) exhaustive = exhaustive && e;
    doc["classification"] = json{{"s", cls->s},
                                 {"J1", labels(cls->J1)},
                                 {"J2", labels(cls->J2)},
                                 {"J3", labels(cls->J3)},
                                 {"exhaustive", exhaustive}};
  }
  return doc;
}

json bundle_json(const SubsystemBundle& b) {
  json doc;
  json blocks = json::array();
  for (int j = 0; j < b.block_count(); ++j) {
    const auto& blk = b.structure.blocks[static_cast<std::size_t>(j)];
    blocks.push_back(json{{"label", lambda_label(blk.lambda)},
                          {"lambda", {blk.lambda.real(), blk.lambda.imag()}},
                          {"dim", blk.dim},
                          {"basis", matrix_json(blk.basis)},
                          {"A", matrix_json(b.A_block[static_cast<std::size_t>(j)])}});
  }
  doc["blocks"] = std::move(blocks);

  json sensors = json::array();
  for (std::size_t i = 0; i < b.sensor_block.size(); ++i) {
    json per_block = json::array();
    for (int j = 0; j < b.block_count(); ++j) {
      const auto& sb = b.sensor_block[i][static_cast<std::size_t>(j)];
      per_block.push_back(
          json{{"label", lambda_label(b.structure.blocks[static_cast<std::size_t>(j)].lambda)},
               {"O", matrix_or_zero_json(sb.O, sb.zero)},
               {"image", matrix_or_zero_json(sb.image, sb.zero)},
               {"P", matrix_or_zero_json(sb.P, sb.zero)},
               {"rank", sb.rank}});
    }
    sensors.push_back(json{{"id", b.obs[i].sensor_id},
                           {"tau", b.obs[i].tau},
                           {"O", matrix_json(b.obs[i].O)},
                           {"per_block", std::move(per_block)}});
  }
  doc["sensors"] = std::move(sensors);
  return doc;
}

json solution_json(const SsrSolution& sol, const EigenStructure* es) {
  json doc;
  doc["x"] = vector_json(sol.x);
  doc["attack_set"] = sol.attack_set;
  doc["residual"] = sol.residual;
  switch (sol.unique) {
    case Uniqueness::unique: doc["unique"] = "unique"; break;
    case Uniqueness::ambiguous: doc["unique"] = "ambiguous"; break;
    case Uniqueness::unknown: doc["unique"] = "unknown"; break;
  }
  doc["sets_examined"] = sol.sets_examined;
  if (!sol.block_status.empty()) {
    json status = json::object();
    for (std::size_t j = 0; j < sol.block_status.size(); ++j) {
      const char* text = sol.block_status[j] == BlockStatus::voted          ? "voted"
                         : sol.block_status[j] == BlockStatus::brute_forced ? "brute_forced"
                                                                            : "unreconstructable";
      const std::string key =
          es && j < es->blocks.size() ? lambda_label(es->blocks[j].lambda) : std::to_string(j);
      status[key] = text;
    }
    doc["per_eigenvalue_status"] = std::move(status);
  }
  return doc;
}

json scenario_json(const AttackScenario& sc, const Vec& x0) {
  json doc;
  doc["strategy"] = sc.strategy;
  doc["x0"] = vector_json(x0);
  doc["attacked"] = sc.attacked;
  json signals = json::array();
  for (const auto& e : sc.signals) signals.push_back(vector_json(e));
  doc["signals"] = std::move(signals);
  if (sc.alt_state) doc["alt_state"] = vector_json(*sc.alt_state);
  if (sc.alt_attacked) doc["alt_attacked"] = *sc.alt_attacked;
  return doc;
}

json cs_reduction_json(const CsReduction& red, const CsInstance& inst) {
  json doc = instance_json(red.sys, std::nullopt, &red.yb);
  doc["mapping"] = json{
      {"type", "sparsest-solution"},
      {"F", nested_rows_json(inst.F)},
      {"b", vector_json(inst.b)},
      {"kernel", matrix_json(red.kernel)},
      {"particular", vector_json(red.particular)},
      {"back_translation",
       "e = particular - kernel * x; the support of e is the attacked-sensor set, so the minimal "
       "attack count equals the minimal nonzero count of e"},
  };
  return doc;
}

json degeneracy_reduction_json(const DegeneracyReduction& red, const DegeneracyInstance& inst) {
  json doc = instance_json(red.sys);
  doc["mapping"] = json{
      {"type", "row-degeneracy"},
      {"F", nested_rows_json(inst.F)},
      {"r", red.r},
      {"back_translation",
       "removing a set of r sensors leaves an unobservable system exactly when the kept rows of F "
       "contain a singular square submatrix"},
  };
  return doc;
}

CsInstance parse_cs_instance(const json& doc) {
  if (!doc.is_object()) throw ValidationError("cs instance: top level must be a JSON object");
  if (!doc.contains("F") || !doc.contains("b"))
    throw ValidationError("cs instance: need \"F\" (matrix) and \"b\" (vector)");
  CsInstance inst;
  inst.F = parse_matrix(doc["F"], "\"F\"");
  inst.b = parse_vector(doc["b"], "\"b\"");
  return inst;
}

DegeneracyInstance parse_degeneracy_instance(const json& doc) {
  if (!doc.is_object()) throw ValidationError("degeneracy instance: top level must be a JSON object");
  if (!doc.contains("F")) throw ValidationError("degeneracy instance: need \"F\" (matrix)");
  DegeneracyInstance inst;
  inst.F = parse_matrix(doc["F"], "\"F\"");
  return inst;
}

}  // namespace ssr::io
