#include "ssrkit/bench.hpp"
#include "ssrkit/io.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

struct GlobalFlags {
  double tol_rank = -1.0;      // < 0 keeps the instance/default value
  double tol_residual = -1.0;
  bool json_out = false;
  int threads = 1;
  std::uint64_t seed = 0;
  std::uint64_t budget = ssr::kDefaultBudget;

  ssr::Tolerances merged(const ssr::Tolerances& base) const {
    ssr::Tolerances tol = base;
    if (tol_rank >= 0.0) tol.rank_rtol = tol_rank;
    if (tol_residual >= 0.0) tol.residual = tol_residual;
    tol.validate();
    return tol;
  }
};

std::uint64_t budget_from_env() {
  const char* text = std::getenv("SSRKIT_BUDGET");
  if (!text || !*text) return ssr::kDefaultBudget;
  errno = 0;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text, &end, 10);
  if (errno != 0 || end == text || *end != '\0' || std::string(text).find('-') != std::string::npos)
    throw ssr::ValidationError("SSRKIT_BUDGET must be a nonnegative integer");
  return value;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string fmt_ids(const std::vector<int>& ids) {
  std::ostringstream out;
  out << '{';
  for (std::size_t i = 0; i < ids.size(); ++i) out << (i ? ", " : "") << ids[i];
  out << '}';
  return out.str();
}

std::string fmt_vec(const ssr::Vec& v) {
  std::ostringstream out;
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v(i);
  out << ']';
  return out.str();
}

void emit_json(const json& doc) { std::cout << doc.dump(2) << "\n"; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ssr::ValidationError("cannot open output file: " + path);
  out << text;
  if (!out) throw ssr::ValidationError("failed writing output file: " + path);
}

ssr::Vec parse_x0(const std::string& text, int n) {
  json arr;
  const auto first = text.find_first_not_of(" \t");
  if (first != std::string::npos && text[first] == '[') {
    try {
      arr = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ssr::ValidationError(std::string("--x0: ") + e.what());
    }
  } else {
    arr = json::array();
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos)
          throw ssr::ValidationError("--x0: trailing characters in \"" + item + "\"");
        arr.push_back(v);
      } catch (const std::logic_error&) {
        throw ssr::ValidationError("--x0: cannot parse \"" + item + "\" as a number");
      }
    }
  }
  const ssr::Vec x0 = ssr::io::parse_vector(arr, "--x0");
  if (x0.size() != n)
    throw ssr::ValidationError("--x0 has " + std::to_string(x0.size()) +
                               " entries, the system needs " + std::to_string(n));
  return x0;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ssr::ValidationError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ssr::ValidationError(std::string("JSON parse error: ") + e.what());
  }
}

int cmd_analyze(const GlobalFlags& g, const std::string& path, int s_flag) {
  const auto inst = ssr::io::load_instance(path);
  print_warnings(inst.warnings);
  const auto tol = g.merged(inst.tol);
  const auto& sys = inst.sys;

  const auto es = ssr::eigenstructure(sys.A, tol);
  const auto eig = ssr::eigenvalue_observability(sys, es, tol);
  const auto sparse = ssr::sparse_observability(sys, tol, g.budget, g.threads);

  std::optional<ssr::EigenClassification> cls;
  const int s = s_flag >= 0 ? s_flag : inst.s.value_or(-1);
  if (s >= 0) {
    const auto ds = ssr::canonical_projectors(es, tol);
    const auto bundle = ssr::decompose_system(sys, es, ds, tol);
    cls = ssr::classify_eigenvalues(sys, bundle, s, tol, g.budget, g.threads);
  }

  bool exhausted = !sparse.exhaustive;
  if (cls)
    for (bool done : cls->exhaustive) exhausted = exhausted || !done;

  if (g.json_out) {
    json doc = ssr::io::analysis_json(es, eig, sparse, cls ? &*cls : nullptr);
    if (!inst.warnings.empty()) doc["warnings"] = inst.warnings;
    emit_json(doc);
  } else {
    std::cout << "system: n=" << sys.n() << ", N=" << sys.N() << " sensors\n";
    std::cout << "eigenvalues:\n";
    for (const auto& blk : es.blocks)
      std::cout << "  " << ssr::io::lambda_label(blk.lambda) << "  alpha " << blk.alpha
                << "  gamma " << blk.gamma << "  dim " << blk.dim << "\n";
    std::cout << "eigenvalue observability index: " << eig.index << "\n";
    for (const auto& entry : eig.entries)
      std::cout << "  S(" << ssr::io::lambda_label(entry.lambda) << ") = " << fmt_ids(entry.sensors)
                << "\n";
    std::cout << "sparse observability index: " << sparse.index;
    if (!sparse.witness.empty()) std::cout << "  witness " << fmt_ids(sparse.witness);
    std::cout << (sparse.exhaustive ? "" : "  (budget exhausted, lower bound)") << "\n";
    if (cls) {
      auto labels = [&](const std::vector<int>& blocks) {
        std::ostringstream out;
        out << '{';
        for (std::size_t i = 0; i < blocks.size(); ++i)
          out << (i ? ", " : "")
              << ssr::io::lambda_label(es.blocks[static_cast<std::size_t>(blocks[i])].lambda);
        out << '}';
        return out.str();
      };
      std::cout << "classification at s=" << cls->s << ": J1 = " << labels(cls->J1)
                << "  J2 = " << labels(cls->J2) << "  J3 = " << labels(cls->J3) << "\n";
    }
    if (exhausted) std::cout << "note: subset budget exhausted, results are partial\n";
  }
  return exhausted ? 3 : 0;
}

int cmd_decompose(const GlobalFlags& g, const std::string& path) {
  const auto inst = ssr::io::load_instance(path);
  print_warnings(inst.warnings);
  const auto tol = g.merged(inst.tol);
  const auto& sys = inst.sys;

  const auto es = ssr::eigenstructure(sys.A, tol);
  const auto ds = ssr::canonical_projectors(es, tol);
  const auto bundle = ssr::decompose_system(sys, es, ds, tol);

  if (g.json_out) {
    json doc = ssr::io::bundle_json(bundle);
    if (!inst.warnings.empty()) doc["warnings"] = inst.warnings;
    emit_json(doc);
  } else {
    std::cout << "blocks:\n";
    for (const auto& blk : bundle.structure.blocks)
      std::cout << "  " << ssr::io::lambda_label(blk.lambda) << "  dim " << blk.dim << "\n";
    std::cout << "sensors:\n";
    for (std::size_t i = 0; i < bundle.sensor_block.size(); ++i) {
      std::cout << "  " << bundle.obs[i].sensor_id << "  tau " << bundle.obs[i].tau
                << "  block ranks [";
      for (int j = 0; j < bundle.block_count(); ++j)
        std::cout << (j ? ", " : "") << bundle.sensor_block[i][static_cast<std::size_t>(j)].rank;
      std::cout << "]\n";
    }
  }
  return 0;
}

int cmd_solve(const GlobalFlags& g, const std::string& path, const std::string& method, int s_flag,
              bool exhaustive_unique, bool prune, bool trimmed) {
  const auto inst = ssr::io::load_instance(path);
  print_warnings(inst.warnings);
  const auto tol = g.merged(inst.tol);
  const auto& sys = inst.sys;

  const auto obs = ssr::all_observability_matrices(sys, tol);
  const auto yb = ssr::io::bind_measurements(inst, obs);

  const int s = s_flag >= 0 ? s_flag : inst.s.value_or(-1);
  if (s < 0)
    throw ssr::ValidationError("solve needs an attack budget: pass --s or put \"s\" in the instance");

  ssr::SolveOptions opt;
  opt.s_max = s;
  opt.exhaustive_unique = exhaustive_unique;
  opt.budget = g.budget;
  opt.threads = g.threads;
  opt.prune_identified = prune;

  ssr::SsrSolution sol;
  std::optional<ssr::EigenStructure> es;
  if (method == "brute") {
    sol = ssr::brute_force_ssr(sys, obs, yb, opt, tol);
  } else {
    es = ssr::eigenstructure(sys.A, tol);
    const auto ds = ssr::canonical_projectors(*es, tol);
    const auto bundle = ssr::decompose_system(sys, *es, ds, tol);
    const auto cls = ssr::classify_eigenvalues(sys, bundle, s, tol, g.budget, g.threads);
    sol = method == "vote" ? ssr::vote_ssr(sys, bundle, cls, yb, opt, tol, trimmed)
                           : ssr::decomposition_ssr(sys, bundle, cls, yb, opt, tol);
  }

  bool lost = false;
  for (auto status : sol.block_status)
    lost = lost || status == ssr::BlockStatus::unreconstructable;

  if (g.json_out) {
    json doc = ssr::io::solution_json(sol, es ? &*es : nullptr);
    if (!inst.warnings.empty()) doc["warnings"] = inst.warnings;
    emit_json(doc);
  } else {
    std::cout << "state: " << fmt_vec(sol.x) << "\n";
    std::cout << "attack set: " << fmt_ids(sol.attack_set) << "\n";
    std::cout << "max kept residual: " << sol.residual << "\n";
    std::cout << "uniqueness: "
              << (sol.unique == ssr::Uniqueness::unique      ? "unique"
                  : sol.unique == ssr::Uniqueness::ambiguous ? "ambiguous"
                                                             : "unknown")
              << "\n";
    std::cout << "subsets examined: " << sol.sets_examined << "\n";
    for (std::size_t j = 0; j < sol.block_status.size(); ++j) {
      const char* text = sol.block_status[j] == ssr::BlockStatus::voted ? "voted"
                         : sol.block_status[j] == ssr::BlockStatus::brute_forced
                             ? "brute_forced"
                             : "unreconstructable";
      std::cout << "block " << (es ? ssr::io::lambda_label(es->blocks[j].lambda)
                                   : std::to_string(j + 1))
                << ": " << text << "\n";
    }
  }
  return lost ? 2 : 0;
}

int cmd_simulate(const GlobalFlags& g, const std::string& path, const std::string& x0_text,
                 const std::string& attack, int s, double noise, double magnitude,
                 const std::string& emit_path) {
  const auto inst = ssr::io::load_instance(path);
  print_warnings(inst.warnings);
  const auto tol = g.merged(inst.tol);
  const auto& sys = inst.sys;

  const auto obs = ssr::all_observability_matrices(sys, tol);
  const ssr::Vec x0 = parse_x0(x0_text, sys.n());

  ssr::AttackScenario sc;
  if (attack == "random")
    sc = ssr::random_attack(sys, obs, s, magnitude, g.seed);
  else if (attack == "stealth")
    sc = ssr::stealth_attack(sys, obs, x0, s, tol, g.budget, g.threads);

  const auto yb = ssr::measure(sys, obs, x0, sc, noise, g.seed + 1);
  const std::optional<int> s_out = s > 0 ? std::optional<int>(s) : inst.s;
  const json instance_doc = ssr::io::instance_json(sys, s_out, &yb, &tol);
  if (!emit_path.empty()) write_file(emit_path, instance_doc.dump(2) + "\n");

  if (g.json_out) {
    json doc = ssr::io::scenario_json(sc, x0);
    doc["instance"] = instance_doc;
    emit_json(doc);
  } else {
    std::cout << "strategy: " << sc.strategy << "\n";
    std::cout << "attacked sensors: " << fmt_ids(sc.attacked) << "\n";
    if (sc.alt_state) {
      std::cout << "also consistent with state " << fmt_vec(*sc.alt_state) << " under attack set "
                << fmt_ids(sc.alt_attacked ? *sc.alt_attacked : std::vector<int>{}) << "\n";
    }
    std::cout << "measurement norm: " << yb.stacked_norm() << "\n";
    if (!emit_path.empty()) std::cout << "wrote instance to " << emit_path << "\n";
  }
  return 0;
}

int cmd_reduce_cs(const GlobalFlags& g, const std::string& path, const std::string& out_path) {
  const json doc = read_json_file(path);
  const auto inst = ssr::io::parse_cs_instance(doc);
  const auto tol = g.merged({});
  const auto red = ssr::cs_to_ssr(inst, tol.rank_rtol);
  const json out = ssr::io::cs_reduction_json(red, inst);
  if (!out_path.empty()) {
    write_file(out_path, out.dump(2) + "\n");
    std::cout << "wrote reduced instance to " << out_path << "\n";
  } else {
    emit_json(out);
  }
  return 0;
}

int cmd_reduce_degeneracy(const GlobalFlags& g, const std::string& path,
                          const std::string& out_path) {
  const json doc = read_json_file(path);
  const auto inst = ssr::io::parse_degeneracy_instance(doc);
  const auto tol = g.merged({});
  const auto red = ssr::degeneracy_to_unobservability(inst, tol.rank_rtol);
  const json out = ssr::io::degeneracy_reduction_json(red, inst);
  if (!out_path.empty()) {
    write_file(out_path, out.dump(2) + "\n");
    std::cout << "wrote reduced instance to " << out_path << "\n";
  } else {
    emit_json(out);
  }
  return 0;
}

int cmd_bench(const GlobalFlags& g, double timeout, const std::string& csv_path) {
  const auto grid = ssr::bench::default_grid(g.seed);
  const auto results = ssr::bench::run_grid(grid, timeout);

  std::ostringstream csv;
  csv << ssr::bench::csv_header() << "\n";
  for (const auto& r : results) csv << ssr::bench::csv_row(r) << "\n";
  if (!csv_path.empty()) write_file(csv_path, csv.str());

  if (g.json_out) {
    json cells = json::array();
    for (const auto& r : results) {
      cells.push_back(json{{"family", r.spec.family},
                           {"n", r.spec.n},
                           {"r", r.spec.r},
                           {"N", r.spec.N},
                           {"s", r.spec.s},
                           {"seed", r.spec.seed},
                           {"t_decompose", r.t_decompose},
                           {"t_solve_decomposed", r.t_solve_decomposed},
                           {"t_solve_monolithic", r.t_solve_monolithic},
                           {"sets_decomposed", r.sets_decomposed},
                           {"sets_monolithic", r.sets_monolithic},
                           {"agree", r.agree},
                           {"timed_out", r.timed_out}});
    }
    emit_json(json{{"cells", std::move(cells)}, {"fitted_slope", ssr::bench::fitted_slope(results)}});
  } else if (csv_path.empty()) {
    std::cout << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalFlags g;

  CLI::App app{"secure state reconstruction toolkit"};
  app.require_subcommand(1);
  app.add_option("--tol-rank", g.tol_rank, "relative rank tolerance override");
  app.add_option("--tol-residual", g.tol_residual, "relative residual tolerance override");
  app.add_flag("--json", g.json_out, "emit JSON instead of text");
  app.add_option("--threads", g.threads, "worker threads for subset scans")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "random seed for simulate/bench");

  std::string analyze_path;
  int analyze_s = -1;
  auto* analyze = app.add_subcommand("analyze", "spectral and observability report");
  analyze->fallthrough();
  analyze->add_option("instance", analyze_path, "instance JSON file")->required();
  analyze->add_option("--s", analyze_s, "attack budget for the eigenvalue classification");

  std::string decompose_path;
  auto* decompose = app.add_subcommand("decompose", "per-eigenvalue subsystem report");
  decompose->fallthrough();
  decompose->add_option("instance", decompose_path, "instance JSON file")->required();

  std::string solve_path, solve_method = "decompose";
  int solve_s = -1;
  bool solve_exhaustive = false, solve_prune = false, solve_trimmed = false;
  auto* solve = app.add_subcommand("solve", "reconstruct the state and the attacked sensors");
  solve->fallthrough();
  solve->add_option("instance", solve_path, "instance JSON file with measurements")->required();
  solve->add_option("--method", solve_method, "decompose, brute or vote")
      ->check(CLI::IsMember({"decompose", "brute", "vote"}));
  solve->add_option("--s", solve_s, "attack budget");
  solve->add_flag("--exhaustive-unique", solve_exhaustive,
                  "scan the whole winning cardinality for a second explanation");
  solve->add_flag("--prune", solve_prune, "drop identified attackers from later subproblems");
  solve->add_flag("--trimmed", solve_trimmed, "vote method: per-component trimmed mean");

  std::string sim_path, sim_x0, sim_attack = "none", sim_emit;
  int sim_s = 0;
  double sim_noise = 0.0, sim_magnitude = 1.0;
  auto* simulate = app.add_subcommand("simulate", "generate measurements under an attack");
  simulate->fallthrough();
  simulate->add_option("instance", sim_path, "instance JSON file")->required();
  simulate->add_option("--x0", sim_x0, "initial state, CSV or JSON array")->required();
  simulate->add_option("--attack", sim_attack, "none, random or stealth")
      ->check(CLI::IsMember({"none", "random", "stealth"}));
  simulate->add_option("--s", sim_s, "attack budget");
  simulate->add_option("--noise", sim_noise, "uniform noise bound per entry");
  simulate->add_option("--magnitude", sim_magnitude, "random attack signal bound");
  simulate->add_option("--emit", sim_emit, "write the measured instance to this file");

  auto* reduce = app.add_subcommand("reduce", "hardness-reduction constructions");
  reduce->require_subcommand(1);
  reduce->fallthrough();
  std::string cs_path, cs_out;
  auto* reduce_cs = reduce->add_subcommand("cs", "sparsest solution of F e = b as reconstruction");
  reduce_cs->fallthrough();
  reduce_cs->add_option("problem", cs_path, "JSON file with \"F\" and \"b\"")->required();
  reduce_cs->add_option("--out", cs_out, "write the reduced instance here");
  std::string deg_path, deg_out;
  auto* reduce_deg =
      reduce->add_subcommand("degeneracy", "singular square submatrix as removal robustness");
  reduce_deg->fallthrough();
  reduce_deg->add_option("problem", deg_path, "JSON file with \"F\"")->required();
  reduce_deg->add_option("--out", deg_out, "write the reduced instance here");

  double bench_timeout = 60.0;
  std::string bench_csv;
  auto* bench = app.add_subcommand("bench", "decomposed vs monolithic cost comparison");
  bench->fallthrough();
  bench->add_option("--timeout", bench_timeout, "per-cell timeout in seconds");
  bench->add_option("--csv", bench_csv, "also write the CSV table to this file");

  int rc = 0;
  analyze->callback([&] { rc = cmd_analyze(g, analyze_path, analyze_s); });
  decompose->callback([&] { rc = cmd_decompose(g, decompose_path); });
  solve->callback([&] {
    rc = cmd_solve(g, solve_path, solve_method, solve_s, solve_exhaustive, solve_prune,
                   solve_trimmed);
  });
  simulate->callback([&] {
    rc = cmd_simulate(g, sim_path, sim_x0, sim_attack, sim_s, sim_noise, sim_magnitude, sim_emit);
  });
  reduce_cs->callback([&] { rc = cmd_reduce_cs(g, cs_path, cs_out); });
  reduce_deg->callback([&] { rc = cmd_reduce_degeneracy(g, deg_path, deg_out); });
  bench->callback([&] { rc = cmd_bench(g, bench_timeout, bench_csv); });

  try {
    g.budget = budget_from_env();
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ssr::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ssr::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ssr::InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ssr::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
