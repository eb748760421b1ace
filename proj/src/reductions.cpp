#include "ssrkit/reductions.hpp"

#include "ssrkit/combinatorics.hpp"
#include "ssrkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssr {

namespace {

Mat select_columns(const Mat& m, const std::vector<int>& cols) {
  Mat out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  return out;
}

Mat select_rows(const Mat& m, const std::vector<int>& rows) {
  Mat out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(rows[k]);
  return out;
}

std::vector<int> to_ids(const std::vector<int>& zero_based) {
  std::vector<int> ids(zero_based.size());
  std::transform(zero_based.begin(), zero_based.end(), ids.begin(), [](int v) { return v + 1; });
  return ids;
}

std::vector<int> complement_ids(const std::vector<int>& zero_based, int n) {
  std::vector<int> out;
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    if (k < zero_based.size() && zero_based[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i + 1);
  }
  return out;
}

}  // namespace

void validate_cs(const CsInstance& inst, double rank_rtol) {
  if (inst.F.rows() < 1 || inst.F.cols() < 1)
    throw ValidationError("cs instance: F must be nonempty");
  if (!inst.F.allFinite() || !inst.b.allFinite())
    throw ValidationError("cs instance: non-finite entries");
  if (inst.b.size() != inst.F.rows())
    throw ValidationError("cs instance: b has length " + std::to_string(inst.b.size()) +
                          ", expected " + std::to_string(inst.F.rows()));
  if (inst.F.rows() >= inst.F.cols())
    throw ValidationError("cs instance: F must be underdetermined (rows < cols); a square system "
                          "pins e down and nothing is left to search");
  if (linalg::svd_rank(inst.F, rank_rtol) != inst.F.rows())
    throw ValidationError("cs instance: F does not have full row rank");
}

CsReduction cs_to_ssr(const CsInstance& inst, double rank_rtol) {
  validate_cs(inst, rank_rtol);
  const int n = static_cast<int>(inst.F.cols());
  const int m = static_cast<int>(inst.F.rows());

  CsReduction red;
  red.kernel = linalg::null_space(inst.F, rank_rtol);
  if (red.kernel.cols() != n - m)
    throw NumericError("cs_to_ssr: kernel dimension " + std::to_string(red.kernel.cols()) +
                       ", expected " + std::to_string(n - m));
  // The kernel columns are unit vectors, so entries at rank_rtol scale are
  // round-off of structural zeros.  They must become exact zero maps: a
  // 1e-16 leftover gain would let the reduced problem "explain" any
  // measurement on that sensor with an astronomically large state.
  red.kernel = red.kernel.unaryExpr(
      [rank_rtol](double v) { return std::abs(v) <= rank_rtol ? 0.0 : v; });
  red.particular = linalg::lstsq(inst.F, inst.b, rank_rtol);

  std::vector<SensorDef> sensors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    sensors[static_cast<std::size_t>(i)].id = i + 1;
    sensors[static_cast<std::size_t>(i)].C = red.kernel.row(i);
  }
  red.sys = validate_system(Mat::Identity(n - m, n - m), std::move(sensors));

  red.yb.Y.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vec y(1);
    y(0) = red.particular(i);
    red.yb.Y[static_cast<std::size_t>(i)] = y;
  }
  return red;
}

CsSupportResult cs_min_support(const CsInstance& inst, double rank_rtol, std::uint64_t budget,
                               int threads) {
  if (inst.F.rows() < 1 || inst.F.cols() < 1)
    throw ValidationError("cs_min_support: F must be nonempty");
  if (!inst.F.allFinite() || !inst.b.allFinite())
    throw ValidationError("cs_min_support: non-finite entries");
  if (inst.b.size() != inst.F.rows()) throw ValidationError("cs_min_support: b length mismatch");

  const int n = static_cast<int>(inst.F.cols());
  const bool exact = linalg::is_integral(inst.F) && linalg::is_integral(inst.b);

  Mat augmented(inst.F.rows(), n + 1);
  augmented.leftCols(n) = inst.F;
  augmented.col(n) = inst.b;

  auto feasible = [&](const std::vector<int>& support) {
    const Mat sub = select_columns(inst.F, support);
    std::vector<int> with_b = support;
    with_b.push_back(n);
    const Mat aug = select_columns(augmented, with_b);
    if (exact) return linalg::integer_rank(aug) == linalg::integer_rank(sub);
    return linalg::svd_rank(aug, rank_rtol) == linalg::svd_rank(sub, rank_rtol);
  };

  std::uint64_t spent = 0;
  for (int c = 0; c <= n; ++c) {
    const auto scan = detail::scan_combinations(n, c, budget - spent, threads, feasible);
    spent += scan.charged;
    if (scan.hit) {
      CsSupportResult out;
      out.support = to_ids(*scan.hit);
      out.sparsity = c;
      out.exact_arithmetic = exact;
      out.tests = spent;
      out.e = Vec::Zero(n);
      if (c > 0) {
        const Vec on_support = linalg::lstsq(select_columns(inst.F, *scan.hit), inst.b, rank_rtol);
        for (std::size_t k = 0; k < scan.hit->size(); ++k)
          out.e((*scan.hit)[k]) = on_support(static_cast<Eigen::Index>(k));
      }
      return out;
    }
    if (scan.truncated)
      throw BudgetError("cs_min_support: subset budget exhausted at support size " +
                        std::to_string(c));
  }
  throw InfeasibleError("cs_min_support: F e = b has no solution on any support");
}

void validate_degeneracy(const DegeneracyInstance& inst, double rank_rtol) {
  if (inst.F.rows() < 1 || inst.F.cols() < 1)
    throw ValidationError("degeneracy instance: F must be nonempty");
  if (!inst.F.allFinite()) throw ValidationError("degeneracy instance: non-finite entries");
  if (inst.F.rows() <= inst.F.cols())
    throw ValidationError("degeneracy instance: F must be tall (rows > cols)");
  if (linalg::svd_rank(inst.F, rank_rtol) != inst.F.cols())
    throw ValidationError("degeneracy instance: F does not have full column rank");
}

DegeneracyReduction degeneracy_to_unobservability(const DegeneracyInstance& inst,
                                                  double rank_rtol) {
  validate_degeneracy(inst, rank_rtol);
  const int p = static_cast<int>(inst.F.rows());
  const int n = static_cast<int>(inst.F.cols());

  DegeneracyReduction red;
  red.r = p - n;
  std::vector<SensorDef> sensors(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    sensors[static_cast<std::size_t>(i)].id = i + 1;
    sensors[static_cast<std::size_t>(i)].C = inst.F.row(i);
  }
  red.sys = validate_system(Mat::Identity(n, n), std::move(sensors));
  return red;
}

RemovalWitness r_sparse_unobservability(const std::vector<Mat>& maps, int r, double rank_rtol,
                                        std::uint64_t budget, int threads) {
  if (maps.empty()) throw ValidationError("r_sparse_unobservability: no maps");
  if (r < 0) throw ValidationError("r_sparse_unobservability: negative removal count");
  const Eigen::Index d = maps.front().cols();
  for (const auto& m : maps)
    if (m.cols() != d) throw ValidationError("r_sparse_unobservability: inconsistent column counts");
  const int N = static_cast<int>(maps.size());

  auto breaks = [&](const std::vector<int>& removed) {
    Eigen::Index rows = 0;
    std::size_t k = 0;
    for (int i = 0; i < N; ++i) {
      if (k < removed.size() && removed[k] == i) {
        ++k;
        continue;
      }
      rows += maps[static_cast<std::size_t>(i)].rows();
    }
    if (rows == 0) return d > 0;
    Mat stack(rows, d);
    Eigen::Index at = 0;
    k = 0;
    for (int i = 0; i < N; ++i) {
      if (k < removed.size() && removed[k] == i) {
        ++k;
        continue;
      }
      stack.middleRows(at, maps[static_cast<std::size_t>(i)].rows()) = maps[static_cast<std::size_t>(i)];
      at += maps[static_cast<std::size_t>(i)].rows();
    }
    return linalg::svd_rank(stack, rank_rtol) < d;
  };

  const auto scan = detail::scan_combinations(N, std::min(r, N), budget, threads, breaks);
  RemovalWitness out;
  out.tests = scan.charged;
  if (scan.hit) {
    out.found = true;
    out.removed = to_ids(*scan.hit);
  } else {
    out.exhaustive = !scan.truncated;
  }
  return out;
}

DegeneracyResult linear_degeneracy(const DegeneracyInstance& inst, double rank_rtol,
                                   std::uint64_t budget, int threads) {
  validate_degeneracy(inst, rank_rtol);
  const int p = static_cast<int>(inst.F.rows());
  const int n = static_cast<int>(inst.F.cols());
  const bool exact = linalg::is_integral(inst.F);

  auto singular = [&](const std::vector<int>& kept) {
    const Mat sub = select_rows(inst.F, kept);
    if (exact) return linalg::integer_singular(sub);
    return linalg::svd_rank(sub, rank_rtol) < n;
  };

  const auto scan = detail::scan_combinations(p, n, budget, threads, singular);
  DegeneracyResult out;
  out.exact_arithmetic = exact;
  out.tests = scan.charged;
  if (scan.hit) {
    out.degenerate = true;
    out.dependent = to_ids(*scan.hit);
    out.removed = complement_ids(*scan.hit, p);
  } else {
    out.exhaustive = !scan.truncated;
  }
  return out;
}

}  // namespace ssr
