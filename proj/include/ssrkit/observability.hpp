#pragma once

#include "ssrkit/decompose.hpp"

#include <cstdint>
#include <vector>

namespace ssr {

/// Which sensors can see a given eigenvalue on their own.
struct EigObsEntry {
  std::complex<double> lambda;
  std::vector<int> sensors;  // ascending 1-based ids
};

/// Per-eigenvalue observing sets and the resulting index:
/// min over eigenvalues of |S_lambda| - 1 (-1 when some S_lambda is empty).
struct EigObsReport {
  std::vector<EigObsEntry> entries;  // aligned with the eigenstructure's blocks
  int index = -1;
};

/// Result of the removal-set search.  When exhaustive, index = |witness| - 1
/// and witness is the lexicographically first smallest sensor set whose
/// removal breaks observability (empty witness with index -1 means the system
/// is unobservable without removing anything).  When the budget ran out,
/// index is only a verified lower bound and witness is empty.
struct SparseObsReport {
  int index = -1;
  std::vector<int> witness;
  bool exhaustive = true;
  std::uint64_t tests = 0;
};

/// Eigenvector test: the stacked map [A - lambda I; C] keeps full column
/// rank, i.e. no eigenvector of lambda is invisible to this sensor.
bool pbh_observable(const Mat& A, const Mat& C, std::complex<double> lambda, double rank_rtol);

EigObsReport eigenvalue_observability(const LtiSystem& sys, const EigenStructure& es,
                                      const Tolerances& tol = {});

/// Removal-set search over the stacked per-sensor maps (columns = state
/// dimension of whatever space the maps act on).
SparseObsReport sparse_observability_of_maps(const std::vector<Mat>& maps, double rank_rtol,
                                             std::uint64_t budget = kDefaultBudget,
                                             int threads = 1);

SparseObsReport sparse_observability(const LtiSystem& sys, const Tolerances& tol = {},
                                     std::uint64_t budget = kDefaultBudget, int threads = 1);

/// Decides "observability survives every removal of at most k sensors" by
/// scanning the size-k removal sets (failure is monotone in the removal set).
struct KSparseResult {
  bool value = false;
  bool exhaustive = true;
  std::vector<int> witness;  // a failing removal set when value is false
  std::uint64_t tests = 0;
};
KSparseResult is_k_sparse_observable(const std::vector<Mat>& maps, int k, double rank_rtol,
                                     std::uint64_t budget = kDefaultBudget, int threads = 1);

/// Attack-budget classification of the eigen-blocks:
///  J1  blocks whose subsystem does not survive 2s sensor removals (lost),
///  J2  blocks whose eigenvalue at least 2s+1 sensors can see (vote),
///  J3  the rest (small exhaustive search per block).
struct EigenClassification {
  int s = 0;
  std::vector<int> J1, J2, J3;          // block indices into the structure
  std::vector<std::vector<int>> S;      // per block: observing sensors
  std::vector<bool> exhaustive;         // per block: removal search completed
};

EigenClassification classify_eigenvalues(const LtiSystem& sys, const SubsystemBundle& b, int s,
                                         const Tolerances& tol = {},
                                         std::uint64_t budget = kDefaultBudget, int threads = 1);

/// Both indices side by side; they always satisfy sparse >= eig, and they
/// coincide when every eigenvalue has geometric multiplicity one.
struct Gm1Report {
  int sparse_index = -1;
  int eig_index = -1;
  bool all_gamma_one = false;
  bool equal = false;
  bool exhaustive = true;
};

Gm1Report check_gm1_equivalence(const LtiSystem& sys, const Tolerances& tol = {},
                                std::uint64_t budget = kDefaultBudget, int threads = 1);

}  // namespace ssr
