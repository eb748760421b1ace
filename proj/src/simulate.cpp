#include "ssrkit/simulate.hpp"

#include "ssrkit/linalg.hpp"
#include "ssrkit/observability.hpp"

#include <algorithm>
#include <string>

namespace ssr {

int Rng::uniform_int(int lo, int hi) {
  if (lo > hi) throw ValidationError("Rng::uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(eng_() % span);
}

Vec Rng::vec(Eigen::Index n, double lo, double hi) {
  Vec v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = uniform(lo, hi);
  return v;
}

std::vector<int> Rng::sample_ids(int n, int k) {
  if (k < 0 || k > n) throw ValidationError("Rng::sample_ids: need 0 <= k <= n");
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i + 1;
  for (int i = 0; i < k; ++i) std::swap(pool[static_cast<std::size_t>(i)],
                                        pool[static_cast<std::size_t>(uniform_int(i, n - 1))]);
  std::vector<int> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

Mat simulate_trajectory(const Mat& A, const Vec& x0, int T) {
  if (A.rows() != A.cols() || A.rows() != x0.size())
    throw ValidationError("simulate_trajectory: dimension mismatch");
  if (T < 0) throw ValidationError("simulate_trajectory: negative horizon");
  Mat out(A.rows(), T + 1);
  out.col(0) = x0;
  for (int k = 1; k <= T; ++k) out.col(k) = A * out.col(k - 1);
  return out;
}

MeasurementBundle exact_measurements(const LtiSystem& sys,
                                     const std::vector<ObservabilityMatrix>& obs, const Vec& x0) {
  if (x0.size() != sys.n()) throw ValidationError("exact_measurements: state dimension mismatch");
  if (static_cast<int>(obs.size()) != sys.N())
    throw ValidationError("exact_measurements: observability matrices missing");
  MeasurementBundle yb;
  yb.Y.reserve(obs.size());
  for (const auto& o : obs) yb.Y.push_back(o.O * x0);
  return yb;
}

MeasurementBundle measure(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                          const Vec& x0, const AttackScenario& scenario, double noise_bound,
                          std::uint64_t seed) {
  if (noise_bound < 0) throw ValidationError("measure: negative noise bound");
  if (scenario.signals.size() != scenario.attacked.size())
    throw ValidationError("measure: attack signals do not align with the attacked set");

  MeasurementBundle yb = exact_measurements(sys, obs, x0);
  for (std::size_t k = 0; k < scenario.attacked.size(); ++k) {
    const int id = scenario.attacked[k];
    if (id < 1 || id > sys.N()) throw ValidationError("measure: attacked sensor id out of range");
    Vec& y = yb.Y[static_cast<std::size_t>(id - 1)];
    if (scenario.signals[k].size() != y.size())
      throw ValidationError("measure: attack signal for sensor " + std::to_string(id) +
                            " has length " + std::to_string(scenario.signals[k].size()) +
                            ", expected " + std::to_string(y.size()));
    y += scenario.signals[k];
  }

  if (noise_bound > 0) {
    Rng rng(seed);
    for (auto& y : yb.Y)
      for (Eigen::Index t = 0; t < y.size(); ++t) y(t) += rng.uniform(-noise_bound, noise_bound);
  }
  return yb;
}

AttackScenario random_attack(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                             int s, double magnitude, std::uint64_t seed) {
  if (s < 0 || s > sys.N())
    throw ValidationError("random_attack: need 0 <= s <= sensor count");
  if (magnitude < 0) throw ValidationError("random_attack: negative magnitude");
  if (static_cast<int>(obs.size()) != sys.N())
    throw ValidationError("random_attack: observability matrices missing");

  Rng rng(seed);
  AttackScenario sc;
  sc.strategy = "random";
  sc.attacked = rng.sample_ids(sys.N(), s);
  sc.signals.reserve(sc.attacked.size());
  for (int id : sc.attacked)
    sc.signals.push_back(
        rng.vec(obs[static_cast<std::size_t>(id - 1)].O.rows(), -magnitude, magnitude));
  return sc;
}

AttackScenario stealth_attack(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                              const Vec& x0, int s, const Tolerances& tol, std::uint64_t budget,
                              int threads) {
  tol.validate();
  if (s < 0) throw ValidationError("stealth_attack: negative attack budget");
  if (x0.size() != sys.n()) throw ValidationError("stealth_attack: state dimension mismatch");
  if (static_cast<int>(obs.size()) != sys.N())
    throw ValidationError("stealth_attack: observability matrices missing");

  std::vector<Mat> maps;
  maps.reserve(obs.size());
  for (const auto& o : obs) maps.push_back(o.O);

  const auto report = sparse_observability_of_maps(maps, tol.rank_rtol, budget, threads);
  if (report.index >= 2 * s && report.exhaustive)
    throw InfeasibleError("stealth_attack: the system is 2s-sparse observable, every attack on at "
                          "most s sensors is detectable");
  if (!report.exhaustive && report.witness.empty())
    throw BudgetError("stealth_attack: no kernel found within the subset budget");
  if (static_cast<int>(report.witness.size()) > 2 * s)
    throw InfeasibleError("stealth_attack: smallest observability-breaking set has " +
                          std::to_string(report.witness.size()) + " sensors, more than 2s");

  // Kernel of the stack over the kept sensors.
  Eigen::Index rows = 0;
  for (int i = 0; i < sys.N(); ++i)
    if (!std::binary_search(report.witness.begin(), report.witness.end(), i + 1))
      rows += maps[static_cast<std::size_t>(i)].rows();
  Mat stack(rows, sys.n());
  Eigen::Index at = 0;
  for (int i = 0; i < sys.N(); ++i) {
    if (std::binary_search(report.witness.begin(), report.witness.end(), i + 1)) continue;
    stack.middleRows(at, maps[static_cast<std::size_t>(i)].rows()) = maps[static_cast<std::size_t>(i)];
    at += maps[static_cast<std::size_t>(i)].rows();
  }
  const Mat kernel = rows == 0 ? Mat::Identity(sys.n(), sys.n())
                               : linalg::null_space(stack, tol.rank_rtol);
  if (kernel.cols() == 0)
    throw NumericError("stealth_attack: witness removal did not expose a kernel direction");

  Vec delta = kernel.col(0);
  delta *= (1.0 + x0.lpNorm<Eigen::Infinity>()) / delta.lpNorm<Eigen::Infinity>();

  const auto half = (report.witness.size() + 1) / 2;
  AttackScenario sc;
  sc.strategy = "stealth";
  sc.attacked.assign(report.witness.begin(), report.witness.begin() + static_cast<std::ptrdiff_t>(half));
  sc.alt_attacked = std::vector<int>(report.witness.begin() + static_cast<std::ptrdiff_t>(half),
                                     report.witness.end());
  sc.alt_state = x0 + delta;
  sc.signals.reserve(sc.attacked.size());
  for (int id : sc.attacked) sc.signals.push_back(obs[static_cast<std::size_t>(id - 1)].O * delta);
  return sc;
}

}  // namespace ssr
