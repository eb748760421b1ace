#include "ssrkit/solvers.hpp"

#include "ssrkit/combinatorics.hpp"
#include "ssrkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace ssr {

namespace {

struct StackedProblem {
  const std::vector<Mat>& maps;
  const std::vector<Vec>& ys;

  // Least-squares state over the sensors not in `removed` (0-based ascending),
  // or nothing when some kept sensor stays inconsistent beyond thr.
  std::optional<Vec> attempt(const std::vector<int>& removed, double thr, double rank_rtol) const {
    const Eigen::Index d = maps.front().cols();
    Eigen::Index rows = 0;
    std::size_t r = 0;
    for (int i = 0; i < static_cast<int>(maps.size()); ++i) {
      if (r < removed.size() && removed[r] == i) {
        ++r;
        continue;
      }
      rows += maps[static_cast<std::size_t>(i)].rows();
    }
    Vec x;
    if (rows == 0) {
      x = Vec::Zero(d);
    } else {
      Mat A(rows, d);
      Vec b(rows);
      Eigen::Index at = 0;
      r = 0;
      for (int i = 0; i < static_cast<int>(maps.size()); ++i) {
        if (r < removed.size() && removed[r] == i) {
          ++r;
          continue;
        }
        const auto& m = maps[static_cast<std::size_t>(i)];
        A.middleRows(at, m.rows()) = m;
        b.segment(at, m.rows()) = ys[static_cast<std::size_t>(i)];
        at += m.rows();
      }
      x = linalg::lstsq(A, b, rank_rtol);
    }
    r = 0;
    for (int i = 0; i < static_cast<int>(maps.size()); ++i) {
      if (r < removed.size() && removed[r] == i) {
        ++r;
        continue;
      }
      const double res =
          (ys[static_cast<std::size_t>(i)] - maps[static_cast<std::size_t>(i)] * x).norm();
      if (res > thr) return std::nullopt;
    }
    return x;
  }

  double max_residual(const Vec& x, const std::vector<int>& removed) const {
    double worst = 0.0;
    std::size_t r = 0;
    for (int i = 0; i < static_cast<int>(maps.size()); ++i) {
      if (r < removed.size() && removed[r] == i) {
        ++r;
        continue;
      }
      worst = std::max(
          worst, (ys[static_cast<std::size_t>(i)] - maps[static_cast<std::size_t>(i)] * x).norm());
    }
    return worst;
  }

  bool kernel_nontrivial(const std::vector<int>& removed, double rank_rtol) const {
    const Eigen::Index d = maps.front().cols();
    Eigen::Index rows = 0;
    std::size_t r = 0;
    for (int i = 0; i < static_cast<int>(maps.size()); ++i) {
      if (r < removed.size() && removed[r] == i) {
        ++r;
        continue;
      }
      rows += maps[static_cast<std::size_t>(i)].rows();
    }
    if (rows == 0) return d > 0;
    Mat A(rows, d);
    Eigen::Index at = 0;
    r = 0;
    for (int i = 0; i < static_cast<int>(maps.size()); ++i) {
      if (r < removed.size() && removed[r] == i) {
        ++r;
        continue;
      }
      const auto& m = maps[static_cast<std::size_t>(i)];
      A.middleRows(at, m.rows()) = m;
      at += m.rows();
    }
    return linalg::svd_rank(A, rank_rtol) < d;
  }
};

std::vector<int> to_ids(const std::vector<int>& zero_based) {
  std::vector<int> ids(zero_based.size());
  std::transform(zero_based.begin(), zero_based.end(), ids.begin(), [](int v) { return v + 1; });
  return ids;
}

}  // namespace

SsrSolution brute_force_maps(const std::vector<Mat>& maps, const std::vector<Vec>& ys,
                             const SolveOptions& opt, const Tolerances& tol) {
  tol.validate();
  if (maps.empty() || maps.size() != ys.size())
    throw ValidationError("brute_force_maps: maps and measurements must align");
  const Eigen::Index d = maps.front().cols();
  double sq = 0.0;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].cols() != d) throw ValidationError("brute_force_maps: inconsistent column counts");
    if (ys[i].size() != maps[i].rows())
      throw ValidationError("brute_force_maps: measurement length mismatch at sensor " +
                            std::to_string(i + 1));
    sq += ys[i].squaredNorm();
  }
  const double scale = 1.0 + std::sqrt(sq);
  const double thr = tol.residual * scale;
  const double state_radius = tol.vote * scale;

  const StackedProblem prob{maps, ys};
  const int N = static_cast<int>(maps.size());
  const int s_cap = std::min(opt.s_max, N);
  if (opt.s_max < 0) throw ValidationError("brute_force_maps: negative attack budget");

  std::uint64_t spent = 0;
  for (int c = 0; c <= s_cap; ++c) {
    auto pred = [&](const std::vector<int>& removed) {
      return prob.attempt(removed, thr, tol.rank_rtol).has_value();
    };
    const auto scan = detail::scan_combinations(N, c, opt.budget - spent, opt.threads, pred);
    spent += scan.charged;
    if (scan.hit) {
      SsrSolution sol;
      std::vector<int> removed = *scan.hit;
      sol.x = *prob.attempt(removed, thr, tol.rank_rtol);
      sol.attack_set = to_ids(removed);
      sol.residual = prob.max_residual(sol.x, removed);
      sol.sets_examined = spent;
      sol.unique =
          prob.kernel_nontrivial(removed, tol.rank_rtol) ? Uniqueness::ambiguous : Uniqueness::unique;

      if (opt.exhaustive_unique && sol.unique == Uniqueness::unique) {
        // Scan the rest of this cardinality for a second, different explanation.
        std::vector<int> probe = removed;
        std::uint64_t pos = scan.charged;  // lex position after the hit
        const std::uint64_t total = detail::binomial(N, c);
        while (detail::next_combination(probe, N) && pos < total) {
          if (spent >= opt.budget) throw BudgetError("brute_force_maps: subset budget exhausted");
          ++pos;
          ++spent;
          const auto alt = prob.attempt(probe, thr, tol.rank_rtol);
          if (alt && ((*alt) - sol.x).lpNorm<Eigen::Infinity>() > state_radius) {
            sol.unique = Uniqueness::ambiguous;
            break;
          }
        }
        sol.sets_examined = spent;
      }
      return sol;
    }
    if (scan.truncated) throw BudgetError("brute_force_maps: subset budget exhausted");
  }
  throw InfeasibleError("brute_force_maps: no consistent explanation with at most " +
                        std::to_string(opt.s_max) + " attacked sensors");
}

SsrSolution brute_force_ssr(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                            const MeasurementBundle& yb, const SolveOptions& opt,
                            const Tolerances& tol) {
  validate_measurements(sys, obs, yb);
  std::vector<Mat> maps;
  maps.reserve(obs.size());
  for (const auto& o : obs) maps.push_back(o.O);
  return brute_force_maps(maps, yb.Y, opt, tol);
}

Vec single_sensor_solve(const Mat& O_block, const Vec& y_block, const Tolerances& tol) {
  return linalg::lstsq(O_block, y_block, tol.rank_rtol);
}

VoteOutcome majority_vote(const std::vector<std::pair<int, Vec>>& estimates, int s, double radius) {
  if (estimates.empty()) throw InfeasibleError("majority_vote: no estimates");
  std::vector<std::pair<int, Vec>> sorted = estimates;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  for (std::size_t seed = 0; seed < sorted.size(); ++seed) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < sorted.size(); ++k)
      if ((sorted[k].second - sorted[seed].second).lpNorm<Eigen::Infinity>() <= radius)
        members.push_back(k);
    if (static_cast<int>(members.size()) >= s + 1) {
      VoteOutcome out;
      out.value = sorted[members.front()].second;  // lowest id in the cluster
      for (std::size_t k : members) out.cluster.push_back(sorted[k].first);
      for (std::size_t k = 0; k < sorted.size(); ++k)
        if (!std::binary_search(members.begin(), members.end(), k))
          out.dissenters.push_back(sorted[k].first);
      return out;
    }
  }
  throw InfeasibleError("majority_vote: no cluster reached " + std::to_string(s + 1) +
                        " supporting sensors");
}

Vec trimmed_mean(const std::vector<Vec>& estimates, int s) {
  if (s < 0) throw ValidationError("trimmed_mean: negative trim count");
  const int m = static_cast<int>(estimates.size());
  if (m < 2 * s + 1)
    throw ValidationError("trimmed_mean: need at least " + std::to_string(2 * s + 1) +
                          " estimates, got " + std::to_string(m));
  const Eigen::Index d = estimates.front().size();
  Vec out(d);
  std::vector<double> column(static_cast<std::size_t>(m));
  for (Eigen::Index c = 0; c < d; ++c) {
    for (int k = 0; k < m; ++k) {
      if (estimates[static_cast<std::size_t>(k)].size() != d)
        throw ValidationError("trimmed_mean: inconsistent estimate dimensions");
      column[static_cast<std::size_t>(k)] = estimates[static_cast<std::size_t>(k)](c);
    }
    std::sort(column.begin(), column.end());
    double sum = 0.0;
    for (int k = s; k < m - s; ++k) sum += column[static_cast<std::size_t>(k)];
    out(c) = sum / static_cast<double>(m - 2 * s);
  }
  return out;
}

namespace {

bool contains(const std::vector<int>& sorted_vals, int v) {
  return std::binary_search(sorted_vals.begin(), sorted_vals.end(), v);
}

SsrSolution assemble_block_solution(const LtiSystem& sys, const SubsystemBundle& b,
                                    const MeasurementBundle& yb,
                                    const ProjectedMeasurements& proj,
                                    const std::vector<std::optional<Vec>>& parts,
                                    std::vector<BlockStatus> status, std::set<int> attack,
                                    bool ambiguous, std::uint64_t examined, double thr) {
  SsrSolution sol;
  sol.x = recompose_state(b.sum, parts);
  sol.attack_set.assign(attack.begin(), attack.end());
  sol.block_status = std::move(status);
  sol.sets_examined = examined;
  sol.unique = ambiguous ? Uniqueness::ambiguous : Uniqueness::unique;

  double worst = 0.0;
  for (int i = 0; i < sys.N(); ++i) {
    if (attack.count(i + 1)) continue;
    worst = std::max(worst, (yb.Y[static_cast<std::size_t>(i)] -
                             b.obs[static_cast<std::size_t>(i)].O * sol.x)
                                .norm());
  }
  sol.residual = worst;
  (void)proj;
  (void)thr;
  return sol;
}

}  // namespace

SsrSolution decomposition_ssr(const LtiSystem& sys, const SubsystemBundle& b,
                              const EigenClassification& cls, const MeasurementBundle& yb,
                              const SolveOptions& opt, const Tolerances& tol) {
  tol.validate();
  validate_measurements(sys, b.obs, yb);
  if (opt.s_max != cls.s)
    throw ValidationError("decomposition_ssr: classification was built for s = " +
                          std::to_string(cls.s) + ", solve asked for s = " +
                          std::to_string(opt.s_max));

  const auto proj = project_measurements(b, yb);
  const double scale = 1.0 + yb.stacked_norm();
  const double thr = tol.residual * scale;
  const double vote_radius = tol.vote * scale;
  const int r = b.block_count();
  const int N = sys.N();

  std::vector<std::optional<Vec>> parts(static_cast<std::size_t>(r));
  std::vector<BlockStatus> status(static_cast<std::size_t>(r), BlockStatus::voted);
  std::set<int> attack;
  std::vector<bool> active(static_cast<std::size_t>(N), true);
  bool ambiguous = false;
  std::uint64_t examined = 0;

  // Measurement energy outside a sensor's image is unexplainable by any state.
  for (int i = 0; i < N; ++i)
    if (proj.residual[static_cast<std::size_t>(i)] > thr) {
      attack.insert(i + 1);
      if (opt.prune_identified) active[static_cast<std::size_t>(i)] = false;
    }

  for (int j = 0; j < r; ++j) {
    if (contains(cls.J1, j)) {
      parts[static_cast<std::size_t>(j)] = Vec::Zero(b.sum.dim(j));
      status[static_cast<std::size_t>(j)] = BlockStatus::unreconstructable;
      ambiguous = true;
      continue;
    }

    if (contains(cls.J2, j)) {
      std::vector<std::pair<int, Vec>> estimates;
      for (int id : cls.S[static_cast<std::size_t>(j)]) {
        if (!active[static_cast<std::size_t>(id - 1)]) continue;
        const auto& sb = b.sensor_block[static_cast<std::size_t>(id - 1)][static_cast<std::size_t>(j)];
        estimates.emplace_back(
            id, single_sensor_solve(sb.O, proj.Y[static_cast<std::size_t>(id - 1)][static_cast<std::size_t>(j)], tol));
      }
      const auto outcome = majority_vote(estimates, cls.s, vote_radius);
      parts[static_cast<std::size_t>(j)] = outcome.value;
      status[static_cast<std::size_t>(j)] = BlockStatus::voted;
    } else {
      // J3: exhaustive search on the block, over the sensors still trusted.
      std::vector<Mat> maps;
      std::vector<Vec> ys;
      std::vector<int> act_ids;
      for (int i = 0; i < N; ++i) {
        if (!active[static_cast<std::size_t>(i)]) continue;
        maps.push_back(b.sensor_block[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].O);
        ys.push_back(proj.Y[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        act_ids.push_back(i + 1);
      }
      SolveOptions sub = opt;
      const auto sol = brute_force_maps(maps, ys, sub, tol);
      parts[static_cast<std::size_t>(j)] = sol.x;
      status[static_cast<std::size_t>(j)] = BlockStatus::brute_forced;
      examined += sol.sets_examined;
      if (sol.unique == Uniqueness::ambiguous) ambiguous = true;
    }

    // Uniform per-block identification: any sensor whose block component
    // disagrees with the block solution is attacked.
    for (int i = 0; i < N; ++i) {
      const auto& sb = b.sensor_block[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double res = (proj.Y[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                          sb.O * (*parts[static_cast<std::size_t>(j)]))
                             .norm();
      if (res > thr) {
        attack.insert(i + 1);
        if (opt.prune_identified) active[static_cast<std::size_t>(i)] = false;
      }
    }
  }

  return assemble_block_solution(sys, b, yb, proj, parts, std::move(status), std::move(attack),
                                 ambiguous, examined, thr);
}

SsrSolution vote_ssr(const LtiSystem& sys, const SubsystemBundle& b,
                     const EigenClassification& cls, const MeasurementBundle& yb,
                     const SolveOptions& opt, const Tolerances& tol, bool trimmed) {
  tol.validate();
  validate_measurements(sys, b.obs, yb);
  const int r = b.block_count();
  for (int j = 0; j < r; ++j)
    if (static_cast<int>(cls.S[static_cast<std::size_t>(j)].size()) < 2 * cls.s + 1)
      throw InfeasibleError("vote_ssr: block " + std::to_string(j) + " is observed by only " +
                            std::to_string(cls.S[static_cast<std::size_t>(j)].size()) +
                            " sensors, need " + std::to_string(2 * cls.s + 1));

  const auto proj = project_measurements(b, yb);
  const double scale = 1.0 + yb.stacked_norm();
  const double thr = tol.residual * scale;
  const double vote_radius = tol.vote * scale;

  std::vector<std::optional<Vec>> parts(static_cast<std::size_t>(r));
  std::vector<BlockStatus> status(static_cast<std::size_t>(r), BlockStatus::voted);
  std::set<int> attack;

  for (int j = 0; j < r; ++j) {
    std::vector<std::pair<int, Vec>> estimates;
    for (int id : cls.S[static_cast<std::size_t>(j)]) {
      const auto& sb = b.sensor_block[static_cast<std::size_t>(id - 1)][static_cast<std::size_t>(j)];
      estimates.emplace_back(
          id, single_sensor_solve(sb.O, proj.Y[static_cast<std::size_t>(id - 1)][static_cast<std::size_t>(j)], tol));
    }
    if (trimmed) {
      std::vector<Vec> values;
      values.reserve(estimates.size());
      for (auto& [id, est] : estimates) values.push_back(std::move(est));
      parts[static_cast<std::size_t>(j)] = trimmed_mean(values, cls.s);
    } else {
      const auto outcome = majority_vote(estimates, cls.s, vote_radius);
      parts[static_cast<std::size_t>(j)] = outcome.value;
      for (int i = 0; i < sys.N(); ++i) {
        const auto& sb = b.sensor_block[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if ((proj.Y[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
             sb.O * (*parts[static_cast<std::size_t>(j)]))
                .norm() > thr)
          attack.insert(i + 1);
      }
    }
  }

  if (!trimmed)
    for (int i = 0; i < sys.N(); ++i)
      if (proj.residual[static_cast<std::size_t>(i)] > thr) attack.insert(i + 1);

  auto sol = assemble_block_solution(sys, b, yb, proj, parts, std::move(status), std::move(attack),
                                     /*ambiguous=*/false, /*examined=*/0, thr);
  if (trimmed) {
    sol.unique = Uniqueness::unknown;
    sol.residual = 0.0;
    double worst = 0.0;
    for (int i = 0; i < sys.N(); ++i)
      worst = std::max(worst, (yb.Y[static_cast<std::size_t>(i)] -
                               b.obs[static_cast<std::size_t>(i)].O * sol.x)
                                  .norm());
    sol.residual = worst;
  }
  return sol;
}

}  // namespace ssr
