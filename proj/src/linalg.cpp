#include "sufcast/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "sufcast/errors.hpp"

namespace sufcast {

SymmetricEigen sym_eigen_desc(const Matrix& a) {
  if (a.rows() != a.cols()) throw DataError("eigendecomposition needs a square matrix");
  if (!a.allFinite()) throw DataError("eigendecomposition input has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  // Eigen returns ascending order.
  SymmetricEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double dominant_sign(const Eigen::Ref<const Vector>& v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return (v.size() == 0 || v(best) >= 0.0) ? 1.0 : -1.0;
}

void fix_column_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    if (dominant_sign(columns.col(j)) < 0.0) columns.col(j) *= -1.0;
  }
}

Matrix orthonormal_basis(const Matrix& a, double rel_tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(rel_tol);
  const Eigen::Index r = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), r);
  return q;
}

Vector principal_cosines(const Matrix& a, const Matrix& b) {
  const Matrix qa = orthonormal_basis(a);
  const Matrix qb = orthonormal_basis(b);
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  Vector s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::min(1.0, s(i));
  return s;
}

double largest_principal_angle(const Matrix& a, const Matrix& b) {
  const Vector c = principal_cosines(a, b);
  if (c.size() == 0) return M_PI / 2;
  // Spans of different dimension: the unmatched directions are orthogonal.
  const Eigen::Index da = orthonormal_basis(a).cols();
  const Eigen::Index db = orthonormal_basis(b).cols();
  if (da != db) return M_PI / 2;
  return std::acos(c.minCoeff());
}

Matrix procrustes_rotation(const Matrix& source, const Matrix& target) {
  Eigen::JacobiSVD<Matrix> svd(source.transpose() * target,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix inverse_sqrt_spd(const Matrix& a) {
  const SymmetricEigen e = sym_eigen_desc(a);
  if (e.values.size() == 0) return a;
  if (e.values.minCoeff() <= e.values.maxCoeff() * 1e-14 || e.values.minCoeff() <= 0.0) {
    throw NumericalError("matrix is singular or not positive definite");
  }
  return e.vectors * e.values.cwiseSqrt().cwiseInverse().asDiagonal() * e.vectors.transpose();
}

Matrix sqrt_psd(const Matrix& a) {
  const SymmetricEigen e = sym_eigen_desc(a);
  const Vector clipped = e.values.cwiseMax(0.0);
  return e.vectors * clipped.cwiseSqrt().asDiagonal() * e.vectors.transpose();
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace sufcast
