#include "ssrkit/bench.hpp"

#include "ssrkit/decompose.hpp"
#include "ssrkit/observability.hpp"
#include "ssrkit/simulate.hpp"
#include "ssrkit/solvers.hpp"
#include "ssrkit/spectral.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ssr::bench {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

/// Minimum over `reps` samples; each sample batches enough runs to last
/// about two milliseconds so short phases are not lost in timer noise.
template <class F>
double time_min(int reps, F&& body) {
  int batch = 1;
  double first;
  for (;;) {
    const auto t0 = clock_type::now();
    for (int b = 0; b < batch; ++b) body();
    first = seconds_since(t0);
    if (first >= 2e-3 || batch >= (1 << 14)) break;
    batch *= 2;
  }
  double best = first / batch;
  for (int rep = 1; rep < reps; ++rep) {
    const auto t0 = clock_type::now();
    for (int b = 0; b < batch; ++b) body();
    best = std::min(best, seconds_since(t0) / batch);
  }
  return best;
}

std::vector<SensorDef> scalar_sensors(int n, int N, Rng& rng) {
  std::vector<SensorDef> sensors(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    sensors[static_cast<std::size_t>(i)].id = i + 1;
    sensors[static_cast<std::size_t>(i)].C = rng.vec(n, 0.5, 1.5).transpose();
  }
  return sensors;
}

}  // namespace

LtiSystem make_system(const CellSpec& spec) {
  if (spec.n < 1 || spec.N < 1) throw ValidationError("bench cell needs n >= 1 and N >= 1");
  Mat A = Mat::Zero(spec.n, spec.n);
  if (spec.family == "slope") {
    if (spec.n % 2 != 0 || spec.r != spec.n / 2)
      throw ValidationError("slope cells use r = n/2 rotation blocks");
    for (int j = 0; j < spec.r; ++j) {
      const double theta =
          std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(spec.r + 1);
      A(2 * j, 2 * j) = std::cos(theta);
      A(2 * j, 2 * j + 1) = -std::sin(theta);
      A(2 * j + 1, 2 * j) = std::sin(theta);
      A(2 * j + 1, 2 * j + 1) = std::cos(theta);
    }
  } else if (spec.family == "count") {
    if (spec.r < 2 || spec.n % spec.r != 0)
      throw ValidationError("count cells need r >= 2 dividing n");
    const int nj = spec.n / spec.r;
    for (int j = 0; j < spec.r; ++j) {
      const double lambda = 0.8 + 0.45 * static_cast<double>(j) / static_cast<double>(spec.r - 1);
      for (int k = 0; k < nj; ++k) {
        A(j * nj + k, j * nj + k) = lambda;
        if (k + 1 < nj) A(j * nj + k, j * nj + k + 1) = 1.0;
      }
    }
  } else if (spec.family == "single") {
    if (spec.r != 1) throw ValidationError("single cells have r = 1");
    A = Mat::Identity(spec.n, spec.n);
  } else {
    throw ValidationError("unknown bench family: " + spec.family);
  }
  Rng rng(spec.seed);
  return validate_system(A, scalar_sensors(spec.n, spec.N, rng));
}

CellResult run_cell(const CellSpec& spec, double timeout_seconds) {
  CellResult res;
  res.spec = spec;
  const auto start = clock_type::now();

  const LtiSystem sys = make_system(spec);
  Rng rng(spec.seed + 101);
  const Vec x0 = rng.vec(sys.n(), -1.0, 1.0);
  const auto obs = all_observability_matrices(sys);
  const MeasurementBundle clean = exact_measurements(sys, obs, x0);
  const double magnitude = 3.0 * (1.0 + clean.stacked_norm());
  const AttackScenario attack = random_attack(sys, obs, spec.s, magnitude, spec.seed + 202);
  const MeasurementBundle yb = measure(sys, obs, x0, attack);

  const EigenStructure es = eigenstructure(sys.A);
  const DirectSum ds = canonical_projectors(es);
  const SubsystemBundle bundle = decompose_system(sys, es, ds);
  res.t_decompose = time_min(spec.reps, [&] {
    const EigenStructure es2 = eigenstructure(sys.A);
    const DirectSum ds2 = canonical_projectors(es2);
    decompose_system(sys, es2, ds2);
  });
  if (seconds_since(start) > timeout_seconds) {
    res.timed_out = true;
    return res;
  }

  const EigenClassification cls = classify_eigenvalues(sys, bundle, spec.s);
  SolveOptions opt;
  opt.s_max = spec.s;

  SsrSolution dec;
  res.t_solve_decomposed = time_min(spec.reps, [&] { dec = decomposition_ssr(sys, bundle, cls, yb, opt); });
  res.sets_decomposed = dec.sets_examined;
  if (seconds_since(start) > timeout_seconds) {
    res.timed_out = true;
    return res;
  }

  SsrSolution mono;
  res.t_solve_monolithic = time_min(spec.reps, [&] { mono = brute_force_ssr(sys, obs, yb, opt); });
  res.sets_monolithic = mono.sets_examined;
  if (seconds_since(start) > timeout_seconds) {
    res.timed_out = true;
    return res;
  }

  const double tol_x = 1e-6 * (1.0 + mono.x.lpNorm<Eigen::Infinity>());
  res.agree = (dec.x - mono.x).lpNorm<Eigen::Infinity>() <= tol_x &&
              dec.attack_set == mono.attack_set;
  return res;
}

std::vector<CellSpec> default_grid(std::uint64_t seed) {
  std::vector<CellSpec> grid;
  std::uint64_t k = 0;
  for (int n : {8, 16, 32, 64}) grid.push_back({"slope", n, n / 2, 6, 1, seed + k++, 3});
  grid.push_back({"count", 6, 3, 12, 2, seed + k++, 3});
  grid.push_back({"single", 2, 1, 8, 2, seed + k++, 3});
  return grid;
}

std::vector<CellResult> run_grid(const std::vector<CellSpec>& grid, double timeout_seconds) {
  std::vector<CellResult> out;
  out.reserve(grid.size());
  for (const auto& spec : grid) {
    CellResult res = run_cell(spec, timeout_seconds);
    if (!res.timed_out && !res.agree)
      throw NumericError("bench cell " + spec.family + " n=" + std::to_string(spec.n) +
                         ": solvers disagree, aborting the run");
    out.push_back(std::move(res));
  }
  return out;
}

double fitted_slope(const std::vector<CellResult>& results) {
  double su = 0, sv = 0, suu = 0, suv = 0;
  int count = 0;
  for (const auto& r : results) {
    if (r.spec.family != "slope" || r.timed_out || r.t_decompose <= 0.0) continue;
    const double u = std::log(static_cast<double>(r.spec.n));
    const double v = std::log(r.t_decompose);
    su += u;
    sv += v;
    suu += u * u;
    suv += u * v;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = suu - su * su / count;
  return (suv - su * sv / count) / denom;
}

std::string csv_header() {
  return "family,n,r,N,s,seed,sets_decomposed,sets_monolithic,agree,timed_out";
}

std::string csv_row(const CellResult& r) {
  std::ostringstream out;
  out << r.spec.family << ',' << r.spec.n << ',' << r.spec.r << ',' << r.spec.N << ','
      << r.spec.s << ',' << r.spec.seed << ',' << r.sets_decomposed << ','
      << r.sets_monolithic << ',' << (r.agree ? "true" : "false") << ','
      << (r.timed_out ? "true" : "false");
  return out.str();
}

}  // namespace ssr::bench
