#include "ssrkit/linalg.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>

namespace ssr {

void Tolerances::validate() const {
  if (!(rank_rtol > 0) || !(eig_cluster > 0) || !(residual > 0) || !(vote > 0))
    throw ValidationError("tolerances must all be strictly positive");
}

namespace linalg {
namespace {

template <class Matrix>
int rank_from_svd(const Eigen::BDCSVD<Matrix>& svd, Eigen::Index rows, Eigen::Index cols,
                  double rank_rtol, double scale = 0.0) {
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double smax = sv(0);
  if (!std::isfinite(smax)) return 0;
  const double anchor = std::max(smax, scale);
  if (anchor == 0.0) return 0;
  const double thr = rank_rtol * anchor * static_cast<double>(std::max(rows, cols));
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > thr) ++r;
  return r;
}

}  // namespace

int svd_rank(const Mat& m, double rank_rtol, double scale) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(m);
  return rank_from_svd(svd, m.rows(), m.cols(), rank_rtol, scale);
}

int svd_rank(const CMat& m, double rank_rtol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<CMat> svd(m);
  return rank_from_svd(svd, m.rows(), m.cols(), rank_rtol);
}

Mat null_space(const Mat& m, double rank_rtol) {
  if (m.size() == 0) return Mat::Identity(m.cols(), m.cols());
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeFullV);
  const int r = rank_from_svd(svd, m.rows(), m.cols(), rank_rtol);
  return svd.matrixV().rightCols(m.cols() - r);
}

Mat range_basis(const Mat& m, double rank_rtol, double scale) {
  if (m.size() == 0) return Mat(m.rows(), 0);
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU);
  const int r = rank_from_svd(svd, m.rows(), m.cols(), rank_rtol, scale);
  return svd.matrixU().leftCols(r);
}

Vec lstsq(const Mat& a, const Vec& b, double rank_rtol) {
  if (a.rows() != b.size()) throw ValidationError("lstsq: dimension mismatch");
  if (a.cols() == 0) return Vec(0);
  if (a.size() == 0) return Vec::Zero(a.cols());
  Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rank_rtol * static_cast<double>(std::max(a.rows(), a.cols())));
  return svd.solve(b);
}

Mat pinv(const Mat& m, double rank_rtol) {
  if (m.size() == 0) return Mat(m.cols(), m.rows());
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double thr = rank_rtol * smax * static_cast<double>(std::max(m.rows(), m.cols()));
  Vec inv = Vec::Zero(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > thr) inv(k) = 1.0 / sv(k);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Mat normalized_power(const Mat& base, unsigned k) {
  if (base.rows() != base.cols()) throw ValidationError("normalized_power: square matrix required");
  auto renorm = [](Mat& m) {
    const double s = m.cwiseAbs().maxCoeff();
    if (s > 0 && std::isfinite(s)) m /= s;
  };
  Mat result = Mat::Identity(base.rows(), base.cols());
  Mat sq = base;
  renorm(sq);
  bool touched = false;
  while (k > 0) {
    if (k & 1u) {
      result = result * sq;
      renorm(result);
      touched = true;
    }
    k >>= 1;
    if (k > 0) {
      sq = sq * sq;
      renorm(sq);
    }
  }
  if (!touched) return Mat::Identity(base.rows(), base.cols());
  return result;
}

bool is_integral(const Mat& m, double atol, double max_abs) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (!std::isfinite(v) || std::abs(v) > max_abs) return false;
      if (std::abs(v - std::round(v)) > atol) return false;
    }
  return true;
}

namespace {

using BigInt = boost::multiprecision::cpp_int;

using BigMat = std::vector<std::vector<BigInt>>;

BigMat to_big(const Mat& m) {
  BigMat out(m.rows(), std::vector<BigInt>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out[i][j] = static_cast<long long>(std::llround(m(i, j)));
  return out;
}

// Fraction-free (Bareiss) elimination; returns the rank, exact.
int bareiss_rank(BigMat a) {
  const int rows = static_cast<int>(a.size());
  const int cols = rows ? static_cast<int>(a[0].size()) : 0;
  BigInt prev = 1;
  int rank = 0;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (a[r][col] != 0) { pivot = r; break; }
    if (pivot < 0) continue;
    std::swap(a[rank], a[pivot]);
    for (int r = rank + 1; r < rows; ++r) {
      for (int c = col + 1; c < cols; ++c)
        a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
      a[r][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return rank;
}

}  // namespace

int integer_rank(const Mat& m) {
  if (!is_integral(m)) throw ValidationError("integer_rank: matrix is not integral");
  if (m.size() == 0) return 0;
  return bareiss_rank(to_big(m));
}

bool integer_singular(const Mat& m) {
  if (m.rows() != m.cols()) throw ValidationError("integer_singular: square matrix required");
  return integer_rank(m) < m.rows();
}

}  // namespace linalg
}  // namespace ssr
