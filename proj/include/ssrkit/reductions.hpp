#pragma once

#include "ssrkit/model.hpp"

#include <cstdint>
#include <vector>

namespace ssr {

/// Sparsest-solution problem: find e minimizing the nonzero count subject to
/// F e = b, with F underdetermined (m < n) and of full row rank.
struct CsInstance {
  Mat F;  // m x n
  Vec b;  // m
};

/// Throws ValidationError unless F is m x n with m < n, full row rank under
/// rank_rtol, b has length m, and everything is finite.
void validate_cs(const CsInstance& inst, double rank_rtol);

/// The sparsest-solution instance rewritten as state reconstruction: state
/// dimension n - m, identity dynamics, one scalar sensor per component of e.
/// Solutions map back through e = particular - kernel * x, whose support is
/// exactly the attacked-sensor set of the reconstruction problem.
struct CsReduction {
  LtiSystem sys;         // A = I_(n-m), sensor i reads row i of the kernel basis
  MeasurementBundle yb;  // Y_i = particular(i)
  Mat kernel;            // n x (n-m), orthonormal columns spanning ker F
  Vec particular;        // minimum-norm solution of F e = b

  Vec recover_error(const Vec& x) const { return particular - kernel * x; }
};

CsReduction cs_to_ssr(const CsInstance& inst, double rank_rtol = Tolerances{}.rank_rtol);

/// Direct support enumeration for the sparsest solution, independent of the
/// reconstruction machinery.  Unlike the reduction it accepts any finite F
/// (square or rank-deficient included) and throws InfeasibleError when no
/// support works.  Integral instances (entries within 1e-9 of integers,
/// magnitude <= 2^20) are decided with exact integer ranks.
struct CsSupportResult {
  Vec e;
  std::vector<int> support;  // ascending 1-based component ids
  int sparsity = 0;
  bool exhaustive = true;
  bool exact_arithmetic = false;
  std::uint64_t tests = 0;
};

CsSupportResult cs_min_support(const CsInstance& inst, double rank_rtol = Tolerances{}.rank_rtol,
                               std::uint64_t budget = kDefaultBudget, int threads = 1);

/// Row-degeneracy problem: does a tall full-column-rank matrix contain a
/// singular n x n row submatrix?
struct DegeneracyInstance {
  Mat F;  // p x n, p >= n
};

void validate_degeneracy(const DegeneracyInstance& inst, double rank_rtol);

/// The same question rewritten as removal-robust observability: identity
/// dynamics, the rows of F as scalar sensors, and removal budget r = p - n.
/// Some r rows can be removed to leave an unobservable system exactly when F
/// has a singular n x n submatrix.
struct DegeneracyReduction {
  LtiSystem sys;
  int r = 0;
};

DegeneracyReduction degeneracy_to_unobservability(const DegeneracyInstance& inst,
                                                  double rank_rtol = Tolerances{}.rank_rtol);

/// Is there a removal set of exactly r sensors that leaves the stacked maps
/// with a nontrivial kernel?  (Removal can only shrink the kept stack, so
/// this also decides the "at most r" question.)  Scans size-r removal sets
/// lexicographically and reports the first hit; a non-exhaustive result means
/// the budget ran out with nothing found so far.
struct RemovalWitness {
  bool found = false;
  std::vector<int> removed;  // ascending 1-based sensor ids
  bool exhaustive = true;
  std::uint64_t tests = 0;
};

RemovalWitness r_sparse_unobservability(const std::vector<Mat>& maps, int r,
                                        double rank_rtol = Tolerances{}.rank_rtol,
                                        std::uint64_t budget = kDefaultBudget, int threads = 1);

/// Degeneracy decision with a witness.  Integral matrices are decided with
/// exact integer ranks; the kept rows of the witness are the singular
/// submatrix, the removed rows its complement.
struct DegeneracyResult {
  bool degenerate = false;
  std::vector<int> dependent;  // ascending 1-based rows of a singular n-subset
  std::vector<int> removed;    // the complementary removal set
  bool exhaustive = true;
  bool exact_arithmetic = false;
  std::uint64_t tests = 0;
};

DegeneracyResult linear_degeneracy(const DegeneracyInstance& inst,
                                   double rank_rtol = Tolerances{}.rank_rtol,
                                   std::uint64_t budget = kDefaultBudget, int threads = 1);

}  // namespace ssr
