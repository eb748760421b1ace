#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Default cap on the number of subset rank tests a combinatorial search may
/// spend before giving up.  The CLI honours the SSRKIT_BUDGET environment
/// variable as an override.
inline constexpr std::uint64_t kDefaultBudget = 2'000'000;

/// Relative tolerance knobs shared across the library.  Every value is a
/// dimensionless factor; the effective threshold is formed where it is used:
/// rank tests scale with the largest singular value and the matrix size,
/// eigenvalue clustering with 1 + |A|, residual and vote tests with 1 + |Y|.
struct Tolerances {
  /// Singular values below rank_rtol * sigma_max * max(rows, cols) count as zero.
  double rank_rtol = 1e-10;
  /// Eigenvalue grouping radius, scaled by 1 + |A|_F.
  double eig_cluster = 1e-7;
  /// Measurement consistency threshold, scaled by 1 + |Y|_2.
  double residual = 1e-7;
  /// Vote clustering radius (max norm on estimates), scaled by 1 + |Y|_2.
  double vote = 1e-6;

  void validate() const;
};

/// Structurally invalid input: bad dimensions, non-finite entries, bad ids.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The data defeated a numerical procedure (ill-separated spectrum, image
/// independence lost, subspace not invariant).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No explanation exists within the requested attack budget, or a required
/// precondition (observability, vote support) does not hold.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A combinatorial search ran out of its subset budget before finishing.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ssr
