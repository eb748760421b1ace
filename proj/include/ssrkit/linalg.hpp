#pragma once

#include "ssrkit/types.hpp"

namespace ssr::linalg {

/// Numerical rank from singular values: count of sigma_k above
/// rank_rtol * max(sigma_max, scale) * max(rows, cols).  Pass a positive
/// scale when the matrix is derived from a larger one (e.g. a restriction)
/// so that pure round-off relative to the parent does not count as rank.
int svd_rank(const Mat& m, double rank_rtol, double scale = 0.0);
int svd_rank(const CMat& m, double rank_rtol);

/// Orthonormal basis of the right null space, one column per null direction
/// (zero columns when the matrix has full column rank).
Mat null_space(const Mat& m, double rank_rtol);

/// Orthonormal basis of the column space (zero columns for a zero matrix).
/// scale has the same meaning as in svd_rank.
Mat range_basis(const Mat& m, double rank_rtol, double scale = 0.0);

/// Minimum-norm least-squares solution, rank decisions consistent with svd_rank.
Vec lstsq(const Mat& a, const Vec& b, double rank_rtol);

/// Moore-Penrose pseudoinverse with the same rank threshold convention.
Mat pinv(const Mat& m, double rank_rtol);

/// base^k up to a positive scalar factor; the product is renormalized between
/// multiplies so repeated powers cannot overflow or underflow.  Only the null
/// space / column space of the result are meaningful.
Mat normalized_power(const Mat& base, unsigned k);

/// True when every entry is within atol of an integer no larger than max_abs.
bool is_integral(const Mat& m, double atol = 1e-9, double max_abs = 1048576.0);

/// Exact rank of an integer matrix (fraction-free elimination over big ints).
int integer_rank(const Mat& m);

/// True when the integer square matrix is singular, decided exactly.
bool integer_singular(const Mat& m);

}  // namespace ssr::linalg
