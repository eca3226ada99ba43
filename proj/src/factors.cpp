#include "sufcast/factors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sufcast {

namespace {

int numerical_rank(const Vector& eigvals_desc) {
  if (eigvals_desc.size() == 0 || eigvals_desc(0) <= 0.0) return 0;
  const double cut = eigvals_desc(0) * detail::kRankTolerance;
  int r = 0;
  while (r < eigvals_desc.size() && eigvals_desc(r) > cut) ++r;
  return r;
}

void check_request(const Matrix& x, int k, int rank) {
  const Eigen::Index cap = std::min(x.rows(), x.cols());
  if (k < 1 || k > cap) {
    throw ConfigError("number of factors must lie in [1, " + std::to_string(cap) + "], got " +
                      std::to_string(k));
  }
  if (k > rank) {
    throw NumericalError("requested " + std::to_string(k) +
                         " factors but the Gram matrix X'X has numerical rank " +
                         std::to_string(rank));
  }
}

void orient(FactorFit& fit) {
  for (Eigen::Index j = 0; j < fit.loadings.cols(); ++j) {
    if (dominant_sign(fit.loadings.col(j)) < 0.0) {
      fit.loadings.col(j) *= -1.0;
      fit.factors.col(j) *= -1.0;
    }
  }
}

}  // namespace

namespace detail {

FactorFit fit_from_cross_section_eigvecs(const Matrix& x, const Matrix& eigvecs,
                                         const Vector& eigvals) {
  const double n = static_cast<double>(x.cols());
  FactorFit fit;
  fit.num_factors = static_cast<int>(eigvecs.cols());
  const Vector inv_root = eigvals.cwiseSqrt().cwiseInverse();
  fit.factors = std::sqrt(n) * (x.transpose() * eigvecs) * inv_root.asDiagonal();
  fit.loadings = x * fit.factors / n;
  fit.eigenvalues = eigvals / n;
  orient(fit);
  return fit;
}

}  // namespace detail

FactorFit estimate_factors(const DataPanel& panel, int num_factors) {
  validate_panel(panel);
  const Matrix& x = panel.predictors;
  const Eigen::Index p = x.rows();
  const Eigen::Index t = x.cols();
  if (p < 1 || t < 2) throw DataError("factor extraction needs p >= 1 and T >= 2");

  if (t <= p) {
    const Matrix gram = x.transpose() * x;
    const SymmetricEigen eig = sym_eigen_desc(gram);
    check_request(x, num_factors, numerical_rank(eig.values));
    FactorFit fit;
    fit.num_factors = num_factors;
    fit.factors = std::sqrt(static_cast<double>(t)) * eig.vectors.leftCols(num_factors);
    fit.loadings = x * fit.factors / static_cast<double>(t);
    fit.eigenvalues = eig.values.head(num_factors) / static_cast<double>(t);
    orient(fit);
    return fit;
  }
  const Matrix gram = x * x.transpose();
  const SymmetricEigen eig = sym_eigen_desc(gram);
  check_request(x, num_factors, numerical_rank(eig.values));
  return detail::fit_from_cross_section_eigvecs(x, eig.vectors.leftCols(num_factors),
                                                eig.values.head(num_factors));
}

Matrix loading_pseudoinverse(const FactorFit& fit) {
  const Matrix& b = fit.loadings;
  if (b.cols() == 0) throw ConfigError("fit has no factors");
  const Matrix btb = b.transpose() * b;
  const SymmetricEigen eig = sym_eigen_desc(btb);
  if (!(eig.values(eig.values.size() - 1) > eig.values(0) * 1e-13) ||
      !(eig.values(0) > 0.0)) {
    throw NumericalError("B'B is singular: factor loadings are degenerate");
  }
  return btb.ldlt().solve(b.transpose());
}

Vector gram_eigenvalues(const Matrix& predictors) {
  const Matrix gram = predictors.cols() <= predictors.rows()
                          ? Matrix(predictors.transpose() * predictors)
                          : Matrix(predictors * predictors.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return solver.eigenvalues().reverse();
}

int default_kmax(Eigen::Index p, Eigen::Index t) {
  const Eigen::Index m = std::min(p, t);
  return static_cast<int>(std::max<Eigen::Index>(1, std::min<Eigen::Index>(20, m / 2)));
}

FactorCountSelection select_num_factors_from_eigenvalues(const Vector& eigenvalues, int kmax) {
  if (kmax < 1 || kmax > eigenvalues.size() - 1) {
    throw ConfigError("kmax must lie in [1, " + std::to_string(eigenvalues.size() - 1) +
                      "], got " + std::to_string(kmax));
  }
  FactorCountSelection out;
  out.ratios = Vector::Constant(kmax, std::numeric_limits<double>::quiet_NaN());
  const double lead = eigenvalues(0);
  const double floor = lead * detail::kRankTolerance;
  bool rank_edge_seen = false;
  double best = -1.0;
  for (int i = 0; i < kmax; ++i) {
    const double num = eigenvalues(i);
    const double den = eigenvalues(i + 1);
    if (den < floor || den <= 0.0) {
      // The first vanishing eigenvalue marks the numerical rank: its ratio is
      // unbounded. Later ratios are 0/0 and carry no information.
      if (!rank_edge_seen && num >= floor && num > 0.0) {
        out.ratios(i) = std::numeric_limits<double>::infinity();
        out.warnings.push_back("eigenvalue " + std::to_string(i + 2) +
                               " of X'X is numerically zero; panel rank is " +
                               std::to_string(i + 1));
        if (best < std::numeric_limits<double>::infinity()) {
          best = std::numeric_limits<double>::infinity();
          out.num_factors = i + 1;
        }
      }
      rank_edge_seen = true;
      continue;
    }
    out.ratios(i) = num / den;
    if (out.ratios(i) > best) {
      best = out.ratios(i);
      out.num_factors = i + 1;
    }
  }
  if (out.num_factors == 0) {
    out.num_factors = 1;
    out.warnings.push_back("no usable eigenvalue ratio; defaulting to one factor");
  }
  return out;
}

FactorCountSelection select_num_factors(const DataPanel& panel, int kmax) {
  validate_panel(panel);
  return select_num_factors_from_eigenvalues(gram_eigenvalues(panel.predictors), kmax);
}

}  // namespace sufcast
