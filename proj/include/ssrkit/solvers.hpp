#pragma once

#include "ssrkit/decompose.hpp"
#include "ssrkit/observability.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ssr {

enum class Uniqueness { unique, ambiguous, unknown };

enum class BlockStatus { voted, brute_forced, unreconstructable };

/// A state/attack-set explanation of the measurements.
struct SsrSolution {
  Vec x;
  std::vector<int> attack_set;  // ascending 1-based sensor ids
  double residual = 0.0;        // max per-sensor residual over the kept sensors
  Uniqueness unique = Uniqueness::unknown;
  std::vector<BlockStatus> block_status;  // per eigen-block (decomposition paths)
  std::uint64_t sets_examined = 0;
};

struct SolveOptions {
  int s_max = 0;
  /// Keep scanning the winning cardinality for a second, different
  /// explanation instead of trusting the kernel test alone.
  bool exhaustive_unique = false;
  std::uint64_t budget = kDefaultBudget;
  int threads = 1;
  /// Decomposition path: drop sensors identified as attacked in earlier
  /// blocks from the later blocks' searches.
  bool prune_identified = false;
};

/// Smallest attack support (then lexicographically first) under which the
/// remaining maps admit a consistent state.  Throws InfeasibleError when no
/// support of size <= s_max works, BudgetError when the subset budget runs
/// out first.
SsrSolution brute_force_maps(const std::vector<Mat>& maps, const std::vector<Vec>& ys,
                             const SolveOptions& opt, const Tolerances& tol = {});

SsrSolution brute_force_ssr(const LtiSystem& sys, const std::vector<ObservabilityMatrix>& obs,
                            const MeasurementBundle& yb, const SolveOptions& opt,
                            const Tolerances& tol = {});

/// One sensor's state estimate for one block.
Vec single_sensor_solve(const Mat& O_block, const Vec& y_block, const Tolerances& tol = {});

struct VoteOutcome {
  Vec value;
  std::vector<int> cluster;     // voter ids inside the winning cluster
  std::vector<int> dissenters;  // voter ids outside it
};

/// Majority vote over (sensor id, estimate) pairs: the first cluster (seeded
/// in ascending id order, max-norm radius) reaching s+1 members wins and the
/// lowest-id member provides the value.  Throws InfeasibleError when no
/// cluster reaches s+1 support.
VoteOutcome majority_vote(const std::vector<std::pair<int, Vec>>& estimates, int s, double radius);

/// Per-component mean after dropping the s largest and s smallest values;
/// needs at least 2s+1 estimates.
Vec trimmed_mean(const std::vector<Vec>& estimates, int s);

/// Per-eigenvalue solver: votes on the well-observed blocks, brute-forces the
/// rest, zeroes the lost ones (status unreconstructable, overall ambiguous).
/// The attack set is the union of the per-block inconsistent sensors and the
/// sensors with out-of-image measurement energy.
SsrSolution decomposition_ssr(const LtiSystem& sys, const SubsystemBundle& b,
                              const EigenClassification& cls, const MeasurementBundle& yb,
                              const SolveOptions& opt, const Tolerances& tol = {});

/// Pure voting path; every block must be 2s-eigenvalue observable.  With
/// `trimmed` set the per-component trimmed mean replaces exact clustering
/// (bounded-noise setting; attack identification is not attempted).
SsrSolution vote_ssr(const LtiSystem& sys, const SubsystemBundle& b,
                     const EigenClassification& cls, const MeasurementBundle& yb,
                     const SolveOptions& opt, const Tolerances& tol = {}, bool trimmed = false);

}  // namespace ssr
