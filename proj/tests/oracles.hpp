#pragma once

// Reference implementations used only by tests. Each one is deliberately
// naive and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Eigenpairs {
  Vector values;   // descending
  Matrix vectors;
};

/// Cyclic Jacobi rotations on a symmetric matrix.
inline Eigenpairs jacobi(Matrix a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  Eigenpairs out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(idx[k], idx[k]);
    out.vectors.col(k) = v.col(idx[k]);
  }
  return out;
}

/// Leading eigenvectors of a PSD matrix by power iteration with deflation.
inline Eigenpairs power_iteration(Matrix a, int k, int iterations = 20000, unsigned seed = 1) {
  const Eigen::Index n = a.rows();
  Eigenpairs out{Vector(k), Matrix(n, k)};
  std::mt19937 rng(seed);
  std::normal_distribution<double> normal;
  for (int j = 0; j < k; ++j) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
      Vector w = a * v;
      for (int m = 0; m < j; ++m) w -= out.vectors.col(m).dot(w) * out.vectors.col(m);
      const double norm = w.norm();
      if (norm == 0.0) break;
      w /= norm;
      const double change = std::min((w - v).norm(), (w + v).norm());
      v = w;
      lambda = v.dot(a * v);
      if (change < 1e-15) break;
    }
    out.values(j) = lambda;
    out.vectors.col(j) = v;
    a -= lambda * v * v.transpose();
  }
  return out;
}

/// Solves a x = b by Gaussian elimination with partial pivoting.
inline Vector gauss_solve(Matrix a, Vector b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    for (Eigen::Index r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-300) throw std::runtime_error("singular system");
    a.row(col).swap(a.row(piv));
    std::swap(b(col), b(piv));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (Eigen::Index c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b(r) -= f * b(col);
    }
  }
  Vector x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    double s = b(r);
    for (Eigen::Index c = r + 1; c < n; ++c) s -= a(r, c) * x(c);
    x(r) = s / a(r, r);
  }
  return x;
}

/// OLS with intercept through the normal equations; returns (intercept, slopes...).
inline Vector normal_equations(const Matrix& x, const Vector& y) {
  Matrix d(x.rows(), x.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(x.cols()) = x;
  Matrix gram = Matrix::Zero(d.cols(), d.cols());
  Vector rhs = Vector::Zero(d.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index a = 0; a < d.cols(); ++a) {
      rhs(a) += d(i, a) * y(i);
      for (Eigen::Index b = 0; b < d.cols(); ++b) gram(a, b) += d(i, a) * d(i, b);
    }
  return gauss_solve(gram, rhs);
}

/// Local linear estimate at `point` with a Gaussian product kernel, via the
/// weighted normal equations.
inline double local_linear(const Matrix& x, const Vector& y, const Vector& h, const Vector& point) {
  const Eigen::Index n = x.rows();
  const Eigen::Index l = x.cols();
  Matrix gram = Matrix::Zero(l + 1, l + 1);
  Vector rhs = Vector::Zero(l + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = 1.0;
    Vector z(l + 1);
    z(0) = 1.0;
    for (Eigen::Index j = 0; j < l; ++j) {
      const double u = (x(i, j) - point(j)) / h(j);
      w *= std::exp(-0.5 * u * u);
      z(j + 1) = x(i, j) - point(j);
    }
    gram += w * z * z.transpose();
    rhs += w * y(i) * z;
  }
  return gauss_solve(gram, rhs)(0);
}

/// Symmetric PSD square root through Jacobi.
inline Matrix sqrtm(const Matrix& a) {
  const Eigenpairs e = jacobi(a);
  return e.vectors * e.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() * e.vectors.transpose();
}

/// Lower Cholesky factor.
inline Matrix cholesky(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (s <= 0.0) throw std::runtime_error("not positive definite");
    l(j, j) = std::sqrt(s);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return l;
}

/// Generalized symmetric-definite problem a g = lambda b g with g' b g = 1,
/// reduced with a Cholesky factor of b and solved by Jacobi.
inline Eigenpairs generalized(const Matrix& a, const Matrix& b) {
  const Matrix l = cholesky(b);
  const Matrix linv = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(b.rows(), b.cols()));
  const Matrix c = linv * a * linv.transpose();
  Eigenpairs e = jacobi(0.5 * (c + c.transpose()));
  e.vectors = linv.transpose() * e.vectors;
  return e;
}

/// Sliced covariance by explicit loops: sort periods by next target (stable),
/// cut into ceil((T-1)/H)-sized slices, average factor rows.
inline Matrix sliced_covariance(const Matrix& f, const Vector& y, int h) {
  const Eigen::Index pairs = y.size() - 1;
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pairs));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return y(a + 1) < y(b + 1); });
  const Eigen::Index c = (pairs + h - 1) / h;
  Matrix out = Matrix::Zero(f.cols(), f.cols());
  int used = 0;
  for (Eigen::Index start = 0; start < pairs; start += c) {
    Vector m = Vector::Zero(f.cols());
    const Eigen::Index end = std::min(pairs, start + c);
    for (Eigen::Index k = start; k < end; ++k) m += f.row(order[k]).transpose();
    m /= static_cast<double>(end - start);
    out += m * m.transpose();
    ++used;
  }
  return out / used;
}

/// Aligns the sign of b to a (columnwise) and returns the max abs difference.
inline double signed_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double plus = (a.col(j) - b.col(j)).cwiseAbs().maxCoeff();
    const double minus = (a.col(j) + b.col(j)).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::min(plus, minus));
  }
  return worst;
}

inline Matrix random_normal(Eigen::Index r, Eigen::Index c, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace oracle
