#pragma once

#include "lgkit/types.hpp"

namespace lgkit::linalg {

/// Relative singular-value cutoff used for every rank decision.
inline constexpr double kRankTol = 1e-8;

int numerical_rank(const Mat& a, double rel_tol = kRankTol);

/// Orthonormal basis of ker(a), one column per null direction.
Mat null_space(const Mat& a, double rel_tol = kRankTol);

/// Orthonormal basis of the column span of a.
Mat range_basis(const Mat& a, double rel_tol = kRankTol);

/// Orthonormal basis of the complement of span(b) inside R^rows(b).
Mat orthonormal_complement(const Mat& b, double rel_tol = kRankTol);

Mat pinv(const Mat& a);

Mat symmetrize(const Mat& a);

/// S^{-1/2} for symmetric positive-definite S.
Mat inv_sqrt_spd(const Mat& s);

/// Smallest eigenvalue of a symmetric matrix (0x0 gives +inf).
double min_eigenvalue(const Mat& s);

/// max_i |lambda_i - 1| for the pencil a v = lambda b v, b positive-definite.
/// Zero exactly when the two forms agree.
double form_defect(const Mat& a, const Mat& b);

/// max_i |sigma_i(m) - 1|; zero exactly when m is an isometry.
double isometry_defect(const Mat& m);

/// Kronecker product.
Mat kron(const Mat& a, const Mat& b);

}  // namespace lgkit::linalg
