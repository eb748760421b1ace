#include "ssrkit/spectral.hpp"

#include "ssrkit/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ssr {

namespace {

struct Cluster {
  std::complex<double> mean{0.0, 0.0};
  std::vector<int> members;  // indices into the raw eigenvalue vector
};

std::vector<Cluster> cluster_eigenvalues(const CVec& values, double radius) {
  std::vector<int> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto &va = values(a), &vb = values(b);
    if (va.real() != vb.real()) return va.real() < vb.real();
    return va.imag() < vb.imag();
  });

  std::vector<Cluster> clusters;
  for (int k : order) {
    const std::complex<double> v = values(k);
    Cluster* nearest = nullptr;
    double best = radius;
    for (auto& c : clusters) {
      const double d = std::abs(v - c.mean);
      if (d <= best) {
        best = d;
        nearest = &c;
      }
    }
    if (nearest) {
      const auto sz = static_cast<double>(nearest->members.size());
      nearest->mean = (nearest->mean * sz + v) / (sz + 1.0);
      nearest->members.push_back(k);
    } else {
      clusters.push_back(Cluster{v, {k}});
    }
  }

  // Agglomerate until no two cluster means sit within the radius.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < clusters.size() && !merged; ++a)
      for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b) {
        if (std::abs(clusters[a].mean - clusters[b].mean) <= radius) {
          const auto na = static_cast<double>(clusters[a].members.size());
          const auto nb = static_cast<double>(clusters[b].members.size());
          clusters[a].mean = (clusters[a].mean * na + clusters[b].mean * nb) / (na + nb);
          clusters[a].members.insert(clusters[a].members.end(), clusters[b].members.begin(),
                                     clusters[b].members.end());
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
      }
  }
  return clusters;
}

Mat kernel_of_power(const Mat& base, unsigned power, int expected_dim, double rank_rtol,
                    const char* what) {
  const Mat powered = linalg::normalized_power(base, power);
  Mat basis = linalg::null_space(powered, rank_rtol);
  if (basis.cols() != expected_dim)
    throw NumericError(std::string(what) + ": kernel dimension " + std::to_string(basis.cols()) +
                       ", expected " + std::to_string(expected_dim) +
                       " (ill-conditioned spectrum?)");
  return basis;
}

Vec normalized_column(const Vec& v) {
  const double s = v.lpNorm<Eigen::Infinity>();
  return s > 0 ? Vec(v / s) : v;
}

}  // namespace

int EigenStructure::total_dim() const {
  int d = 0;
  for (const auto& b : blocks) d += b.dim;
  return d;
}

EigenStructure eigenstructure(const Mat& A, const Tolerances& tol) {
  tol.validate();
  if (A.rows() == 0 || A.rows() != A.cols())
    throw ValidationError("eigenstructure: square matrix required");
  if (!A.allFinite()) throw ValidationError("eigenstructure: non-finite entries");

  const int n = static_cast<int>(A.rows());
  const double radius = tol.eig_cluster * (1.0 + A.norm());

  Eigen::EigenSolver<Mat> solver(A, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw NumericError("eigenstructure: eigenvalue iteration failed");
  const CMat& vectors = solver.eigenvectors();

  auto clusters = cluster_eigenvalues(solver.eigenvalues(), radius);

  for (std::size_t a = 0; a < clusters.size(); ++a)
    for (std::size_t b = a + 1; b < clusters.size(); ++b)
      if (std::abs(clusters[a].mean - clusters[b].mean) < 2.0 * radius)
        throw NumericError("eigenstructure: ill-separated spectrum (two eigenvalue groups closer "
                           "than twice the clustering radius)");

  // Snap near-real groups onto the real axis and pair the rest conjugately.
  std::vector<Cluster> real_clusters, upper, lower;
  for (auto& c : clusters) {
    if (std::abs(c.mean.imag()) <= radius) {
      c.mean.imag(0.0);
      real_clusters.push_back(std::move(c));
    } else if (c.mean.imag() > 0) {
      upper.push_back(std::move(c));
    } else {
      lower.push_back(std::move(c));
    }
  }
  if (upper.size() != lower.size())
    throw NumericError("eigenstructure: conjugate pairing failed");
  std::vector<bool> used(lower.size(), false);
  for (const auto& u : upper) {
    bool found = false;
    for (std::size_t k = 0; k < lower.size(); ++k)
      if (!used[k] && std::abs(std::conj(u.mean) - lower[k].mean) <= 2.0 * radius &&
          lower[k].members.size() == u.members.size()) {
        used[k] = true;
        found = true;
        break;
      }
    if (!found) throw NumericError("eigenstructure: conjugate pairing failed");
  }

  EigenStructure es;
  const Mat I = Mat::Identity(n, n);
  for (const auto& c : real_clusters) {
    DistinctEigenvalue blk;
    blk.lambda = c.mean;
    blk.alpha = static_cast<int>(c.members.size());
    blk.dim = blk.alpha;
    if (blk.alpha == 1) {
      // Simple eigenvalue: the solver's eigenvector is the whole space.
      blk.gamma = 1;
      const CVec cv = vectors.col(c.members.front());
      const Vec re = cv.real(), im = cv.imag();
      Vec b = normalized_column(re.lpNorm<Eigen::Infinity>() >= im.lpNorm<Eigen::Infinity>() ? re
                                                                                             : im);
      if ((A * b - c.mean.real() * b).lpNorm<Eigen::Infinity>() > radius)
        throw NumericError("eigenstructure: eigenvector residual exceeds clustering radius");
      blk.basis = b;
    } else {
      const Mat shifted = A - c.mean.real() * I;
      // Relative to A's own scale a vanishing shift means A is numerically a
      // multiple of the identity; powering the round-off would only amplify
      // noise, so the whole space is the (diagonalizable) block.
      if (linalg::svd_rank(shifted, tol.rank_rtol, 1.0 + A.norm()) == 0) {
        if (blk.dim != n)
          throw NumericError("eigenstructure: near-scalar shift on a partial cluster");
        blk.gamma = blk.alpha;
        blk.basis = I;
      } else {
        blk.gamma = n - linalg::svd_rank(shifted, tol.rank_rtol);
        blk.basis = kernel_of_power(shifted, static_cast<unsigned>(blk.alpha), blk.dim,
                                    tol.rank_rtol, "eigenstructure");
      }
    }
    es.blocks.push_back(std::move(blk));
  }
  for (const auto& c : upper) {
    DistinctEigenvalue blk;
    blk.lambda = c.mean;
    blk.alpha = static_cast<int>(c.members.size());
    blk.dim = 2 * blk.alpha;
    if (blk.alpha == 1) {
      blk.gamma = 1;
      const CVec cv = vectors.col(c.members.front());
      Mat b(n, 2);
      b.col(0) = normalized_column(cv.real());
      b.col(1) = normalized_column(cv.imag());
      if (linalg::svd_rank(b, tol.rank_rtol) != 2)
        throw NumericError("eigenstructure: complex eigenvector has degenerate real span");
      blk.basis = b;
    } else {
      // Real annihilator of the pair: (A - l)(A - conj(l)) = A^2 - 2 Re(l) A + |l|^2 I.
      const Mat q = A * A - 2.0 * c.mean.real() * A + std::norm(c.mean) * I;
      // Same degenerate case as above, at the annihilator's quadratic scale.
      if (linalg::svd_rank(q, tol.rank_rtol, 1.0 + A.squaredNorm()) == 0) {
        if (blk.dim != n)
          throw NumericError("eigenstructure: near-annihilated pair on a partial cluster");
        blk.gamma = blk.alpha;
        blk.basis = I;
      } else {
        CMat shifted = A.cast<std::complex<double>>();
        shifted.diagonal().array() -= c.mean;
        blk.gamma = n - linalg::svd_rank(shifted, tol.rank_rtol);
        blk.basis = kernel_of_power(q, static_cast<unsigned>(blk.alpha), blk.dim, tol.rank_rtol,
                                    "eigenstructure");
      }
    }
    es.blocks.push_back(std::move(blk));
  }

  std::sort(es.blocks.begin(), es.blocks.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });

  if (es.total_dim() != n)
    throw NumericError("eigenstructure: block dimensions sum to " + std::to_string(es.total_dim()) +
                       ", expected " + std::to_string(n));
  return es;
}

DirectSum canonical_projectors(const EigenStructure& es, const Tolerances& tol) {
  tol.validate();
  if (es.blocks.empty()) throw ValidationError("canonical_projectors: empty structure");
  const int n = static_cast<int>(es.blocks.front().basis.rows());

  DirectSum ds;
  ds.M.resize(n, n);
  int col = 0;
  for (const auto& blk : es.blocks) {
    if (blk.basis.rows() != n) throw ValidationError("canonical_projectors: inconsistent basis rows");
    ds.offset.push_back(col);
    ds.M.middleCols(col, blk.dim) = blk.basis;
    col += blk.dim;
  }
  if (col != n)
    throw ValidationError("canonical_projectors: block dimensions sum to " + std::to_string(col) +
                          ", expected " + std::to_string(n));

  if (linalg::svd_rank(ds.M, tol.rank_rtol) != n)
    throw NumericError("canonical_projectors: block bases do not form a direct sum");

  Eigen::FullPivLU<Mat> lu(ds.M);
  ds.M_inv = lu.inverse();

  for (std::size_t j = 0; j < es.blocks.size(); ++j) {
    const int d = es.blocks[j].dim;
    const int off = ds.offset[j];
    ds.basis.push_back(ds.M.middleCols(off, d));
    ds.coord.push_back(ds.M_inv.middleRows(off, d));
    ds.projector.push_back(ds.basis.back() * ds.coord.back());
  }
  return ds;
}

Mat restrict_map(const Mat& F, const DirectSum& ds, int j, const Tolerances& tol) {
  tol.validate();
  if (j < 0 || j >= ds.block_count()) throw ValidationError("restrict_map: block index out of range");
  const auto& Mj = ds.basis[static_cast<std::size_t>(j)];
  if (F.rows() != F.cols() || F.rows() != Mj.rows())
    throw ValidationError("restrict_map: dimension mismatch");

  const Mat Aj = ds.coord[static_cast<std::size_t>(j)] * F * Mj;
  const double defect = (F * Mj - Mj * Aj).norm();
  const double thr = tol.eig_cluster * (1.0 + F.norm());
  if (defect > thr)
    throw NumericError("restrict_map: subspace is not invariant under the map (defect " +
                       std::to_string(defect) + ")");
  return Aj;
}

}  // namespace ssr
