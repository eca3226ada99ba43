#pragma once

#include <Eigen/Dense>

namespace sufcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column j pairs with values(j)
};

/// Full eigendecomposition of a symmetric matrix, eigenvalues sorted
/// descending. Only the lower triangle is read.
SymmetricEigen sym_eigen_desc(const Matrix& a);

/// Flip each column so that its entry of largest magnitude is positive.
/// Ties in magnitude resolve to the smallest row index.
void fix_column_signs(Matrix& columns);

/// Sign (+1/-1) that makes the largest-magnitude entry of v positive.
double dominant_sign(const Eigen::Ref<const Vector>& v);

/// Orthonormal basis of span(a) via column-pivoted QR; columns whose
/// residual falls below rel_tol times the largest are dropped.
Matrix orthonormal_basis(const Matrix& a, double rel_tol = 1e-10);

/// Cosines of the principal angles between span(a) and span(b), descending.
Vector principal_cosines(const Matrix& a, const Matrix& b);

/// Largest principal angle (radians) between span(a) and span(b).
double largest_principal_angle(const Matrix& a, const Matrix& b);

/// Orthogonal matrix R minimising ||target - source R||_F.
Matrix procrustes_rotation(const Matrix& source, const Matrix& target);

/// Symmetric inverse square root of a positive definite matrix.
Matrix inverse_sqrt_spd(const Matrix& a);

/// Symmetric square root of a positive semidefinite matrix.
Matrix sqrt_psd(const Matrix& a);

/// Largest absolute entry of a matrix (0 for an empty matrix).
double max_abs(const Matrix& a);

}  // namespace sufcast
