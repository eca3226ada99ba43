#include "sufcast/incremental.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sufcast {

namespace {
constexpr Eigen::Index kDenseLimit = 160;
constexpr Eigen::Index kOversample = 8;
constexpr int kMaxIterations = 60;
constexpr double kResidualTolerance = 1e-12;
}  // namespace

RecursiveFactorExtractor::RecursiveFactorExtractor(Matrix predictors, int num_factors)
    : x_(std::move(predictors)), k_(num_factors) {
  if (!x_.allFinite()) throw DataError("predictor panel has non-finite entries");
  if (k_ < 1 || k_ > x_.rows()) throw ConfigError("number of factors out of range");
  block_ = std::min<Eigen::Index>(x_.rows(), k_ + kOversample);
  cross_ = Matrix::Zero(x_.rows(), x_.rows());
  sum_ = Vector::Zero(x_.rows());
}

void RecursiveFactorExtractor::advance_to(Eigen::Index n) {
  if (n < n_) {
    cross_.setZero();
    sum_.setZero();
    n_ = 0;
  }
  if (n - n_ > 4) {
    const auto block = x_.middleCols(n_, n - n_);
    cross_.selfadjointView<Eigen::Lower>().rankUpdate(block);
    sum_ += block.rowwise().sum();
  } else {
    for (Eigen::Index t = n_; t < n; ++t) {
      cross_.selfadjointView<Eigen::Lower>().rankUpdate(x_.col(t));
      sum_ += x_.col(t);
    }
  }
  n_ = n;
  mean_ = sum_ / static_cast<double>(n_);
}

Matrix RecursiveFactorExtractor::centered_gram_times(const Matrix& v) const {
  Matrix out = cross_.selfadjointView<Eigen::Lower>() * v;
  out.noalias() -= sum_ * (mean_.transpose() * v);
  return out;
}

void RecursiveFactorExtractor::dense_solve(Matrix& vecs, Vector& vals) {
  Matrix gram = cross_.selfadjointView<Eigen::Lower>();
  gram.noalias() -= sum_ * mean_.transpose();
  const SymmetricEigen eig = sym_eigen_desc(gram);
  vecs = eig.vectors.leftCols(block_);
  vals = eig.values.head(block_);
}

bool RecursiveFactorExtractor::subspace_iterate(Matrix& vecs, Vector& vals) {
  Matrix v = ritz_;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Matrix y = centered_gram_times(v);
    Matrix small = v.transpose() * y;
    small = 0.5 * (small + small.transpose()).eval();
    const SymmetricEigen eig = sym_eigen_desc(small);
    const Matrix u = v * eig.vectors;
    const Matrix gu = y * eig.vectors;
    const double scale = std::max(std::abs(eig.values(0)), 1e-300);
    bool converged = true;
    for (int j = 0; j < k_ && converged; ++j) {
      const double r = (gu.col(j) - eig.values(j) * u.col(j)).norm();
      converged = r <= kResidualTolerance * scale;
    }
    if (converged) {
      vecs = u;
      vals = eig.values;
      return true;
    }
    Eigen::HouseholderQR<Matrix> qr(gu);
    v = qr.householderQ() * Matrix::Identity(gu.rows(), gu.cols());
  }
  return false;
}

FactorFit RecursiveFactorExtractor::fit_window(Eigen::Index n) {
  if (n < 2 || n > x_.cols()) throw ConfigError("window length out of range");
  if (k_ > n - 1) {
    throw NumericalError("requested " + std::to_string(k_) + " factors on a window of " +
                         std::to_string(n) + " periods");
  }
  advance_to(n);

  Matrix vecs;
  Vector vals;
  const bool small = x_.rows() <= kDenseLimit;
  if (small || !have_ritz_ || !subspace_iterate(vecs, vals)) {
    if (!small && have_ritz_) ++dense_fallbacks_;
    dense_solve(vecs, vals);
  }
  ritz_ = vecs;
  have_ritz_ = true;

  const double cut = std::max(vals(0), 0.0) * detail::kRankTolerance;
  if (!(vals(k_ - 1) > cut) || !(vals(0) > 0.0)) {
    throw NumericalError("window of " + std::to_string(n) +
                         " periods has fewer than " + std::to_string(k_) +
                         " non-zero Gram eigenvalues");
  }
  const Matrix centered = x_.leftCols(n).colwise() - mean_;
  return detail::fit_from_cross_section_eigvecs(centered, vecs.leftCols(k_), vals.head(k_));
}

}  // namespace sufcast
