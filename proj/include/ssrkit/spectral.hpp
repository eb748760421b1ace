#pragma once

#include "ssrkit/types.hpp"

#include <vector>

namespace ssr {

/// One distinct eigenvalue of a real matrix.  Conjugate pairs are merged into
/// a single real block: lambda keeps the member with positive imaginary part
/// and the subspace doubles to dimension 2 * alpha.
struct DistinctEigenvalue {
  std::complex<double> lambda;  // imag >= 0
  int alpha = 0;                // algebraic multiplicity of lambda itself
  int gamma = 0;                // geometric multiplicity of lambda itself
  int dim = 0;                  // subspace dimension: alpha, or 2 * alpha for a merged pair
  /// n x dim, independent columns spanning the subspace.  Simple eigenvalues
  /// keep a max-norm-1 eigenvector (readable coordinates); larger blocks get
  /// an orthonormal kernel basis.
  Mat basis;

  bool complex_pair() const { return lambda.imag() > 0.0; }
};

/// Distinct eigenvalues sorted by (real, imag); block subspaces sum to R^n.
struct EigenStructure {
  std::vector<DistinctEigenvalue> blocks;

  int block_count() const { return static_cast<int>(blocks.size()); }
  int total_dim() const;
};

/// Oblique projector family aligned with the eigenstructure's direct sum:
/// P_j = basis_j * coord_j where coord_j holds the matching rows of the
/// inverse of the assembled basis matrix.  P_j^2 = P_j, P_j P_k = 0 for
/// j != k, and the P_j sum to the identity.
struct DirectSum {
  Mat M;                       // n x n assembled block bases
  Mat M_inv;                   // n x n
  std::vector<Mat> basis;      // n x d_j
  std::vector<Mat> coord;      // d_j x n
  std::vector<Mat> projector;  // n x n
  std::vector<int> offset;     // first column of block j inside M

  int block_count() const { return static_cast<int>(basis.size()); }
  int dim(int j) const { return static_cast<int>(basis[static_cast<std::size_t>(j)].cols()); }
};

/// Eigenvalues of A grouped within tol.eig_cluster * (1 + |A|_F), with per
/// block algebraic/geometric multiplicities and a basis of the generalized
/// eigenspace (kernel of the annihilating polynomial power).
/// Throws NumericError when two groups sit closer than twice the clustering
/// radius without being merged (ill-separated spectrum), or when a block's
/// kernel does not have the expected dimension.
EigenStructure eigenstructure(const Mat& A, const Tolerances& tol = {});

/// Builds the canonical oblique projectors for the blocks' direct sum.
/// Throws NumericError when the concatenated bases are not invertible.
DirectSum canonical_projectors(const EigenStructure& es, const Tolerances& tol = {});

/// Matrix of F restricted to block j, written in that block's coordinates.
/// Throws NumericError when F does not map the subspace into itself.
Mat restrict_map(const Mat& F, const DirectSum& ds, int j, const Tolerances& tol = {});

}  // namespace ssr
