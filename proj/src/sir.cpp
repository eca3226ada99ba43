#include "sufcast/sir.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <string>

namespace sufcast {

int SliceAssignment::size_of(int h) const {
  return static_cast<int>(std::count(slice_of.begin(), slice_of.end(), h));
}

std::vector<Eigen::Index> SliceAssignment::members(int h) const {
  std::vector<Eigen::Index> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (slice_of[k] == h) out.push_back(order[k]);
  }
  return out;
}

SliceAssignment assign_slices(const Vector& target, int num_slices) {
  const Eigen::Index pairs = target.size() - 1;
  if (num_slices < 2) throw ConfigError("need at least two slices");
  if (pairs < num_slices) {
    throw ConfigError("cannot cut " + std::to_string(pairs) + " target pairs into " +
                      std::to_string(num_slices) + " slices");
  }
  if (!target.allFinite()) throw DataError("target has non-finite entries");

  SliceAssignment out;
  out.requested_slices = num_slices;
  out.order.resize(pairs);
  std::iota(out.order.begin(), out.order.end(), Eigen::Index{0});
  std::stable_sort(out.order.begin(), out.order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return target(a + 1) < target(b + 1);
  });

  const auto c = static_cast<int>((pairs + num_slices - 1) / num_slices);
  const auto used = static_cast<int>((pairs + c - 1) / c);
  if (used < num_slices) {
    out.warnings.push_back("with c=" + std::to_string(c) + " observations per slice only " +
                           std::to_string(used) + " of " + std::to_string(num_slices) +
                           " slices are non-empty; using H=" + std::to_string(used));
  }
  out.slice_size = c;
  out.num_slices = used;
  out.slice_of.resize(pairs);
  for (Eigen::Index k = 0; k < pairs; ++k) out.slice_of[k] = static_cast<int>(k / c);
  return out;
}

namespace {

/// Column means of `data` (dims x periods) over each slice, as a dims x H matrix.
Matrix slice_mean_matrix(const Matrix& data, const SliceAssignment& slices) {
  Matrix means = Matrix::Zero(data.rows(), slices.num_slices);
  std::vector<int> counts(slices.num_slices, 0);
  for (Eigen::Index k = 0; k < slices.num_pairs(); ++k) {
    const int h = slices.slice_of[k];
    means.col(h) += data.col(slices.order[k]);
    ++counts[h];
  }
  for (int h = 0; h < slices.num_slices; ++h) {
    if (counts[h] == 0) throw NumericalError("internal error: empty slice");
    means.col(h) /= counts[h];
  }
  return means;
}

SlicedCovariance from_slice_means(const Matrix& means, CovarianceSource source) {
  SlicedCovariance out;
  out.source = source;
  out.matrix = means * means.transpose() / static_cast<double>(means.cols());
  out.matrix = 0.5 * (out.matrix + out.matrix.transpose()).eval();
  for (Eigen::Index h = 0; h < means.cols(); ++h) out.slice_means.push_back(means.col(h));
  return out;
}

void check_alignment(Eigen::Index periods, const SliceAssignment& slices) {
  if (slices.num_pairs() != periods - 1) {
    throw ConfigError("slices cover " + std::to_string(slices.num_pairs()) +
                      " pairs but the fit has " + std::to_string(periods) + " periods");
  }
}

}  // namespace

SlicedCovariance sliced_covariance_factors(const FactorFit& fit, const SliceAssignment& slices) {
  check_alignment(fit.factors.rows(), slices);
  return from_slice_means(slice_mean_matrix(fit.factors.transpose(), slices),
                          CovarianceSource::FactorForm);
}

SlicedCovariance sliced_covariance_loadings(const DataPanel& panel, const FactorFit& fit,
                                            const SliceAssignment& slices) {
  check_alignment(panel.num_periods(), slices);
  if (fit.loadings.rows() != panel.num_series() || fit.factors.rows() != panel.num_periods()) {
    throw ConfigError("fit and panel dimensions disagree");
  }
  const Matrix lambda = loading_pseudoinverse(fit);
  const Matrix xbar = slice_mean_matrix(panel.predictors, slices);
  SlicedCovariance out = from_slice_means(lambda * xbar, CovarianceSource::LoadingForm);

  const Matrix recovered = lambda * panel.predictors;
  const double scale = std::max(1.0, max_abs(fit.factors));
  if (max_abs(recovered - fit.factors.transpose()) > 1e-6 * scale) {
    out.warnings.push_back("factors are not the least-squares PCA solution for this panel; "
                           "factor and loading forms of the sliced covariance may differ");
  }
  return out;
}

SdrBasis sdr_directions(const SlicedCovariance& cov, const FactorFit& fit, int num_indices) {
  const Eigen::Index k = cov.matrix.rows();
  if (num_indices < 1 || num_indices > k) {
    throw ConfigError("number of indices must lie in [1, " + std::to_string(k) + "]");
  }
  if (num_indices > static_cast<int>(cov.slice_means.size())) {
    throw ConfigError("number of indices exceeds the number of slices");
  }
  if (fit.loadings.cols() != k) throw ConfigError("fit and sliced covariance disagree on K");

  const SymmetricEigen eig = sym_eigen_desc(cov.matrix);
  SdrBasis out;
  out.num_indices = num_indices;
  out.spectrum = eig.values;
  out.eigenvalues = eig.values.head(num_indices);
  out.directions = eig.vectors.leftCols(num_indices);
  fix_column_signs(out.directions);

  const double scale = std::max(1.0, std::abs(eig.values(0)));
  if (num_indices < k && eig.values(num_indices - 1) - eig.values(num_indices) < 1e-10 * scale) {
    out.warnings.push_back("eigenvalues " + std::to_string(num_indices) + " and " +
                           std::to_string(num_indices + 1) +
                           " of the sliced covariance are tied; the subspace is not identified");
  }
  if (!(out.eigenvalues(num_indices - 1) > 0.0)) {
    out.warnings.push_back("a retained eigenvalue of the sliced covariance is not positive");
  }
  out.predictor_directions = loading_pseudoinverse(fit).transpose() * out.directions;
  return out;
}

Matrix index_values(const SdrBasis& basis, const Matrix& factors) {
  if (factors.cols() != basis.directions.rows()) {
    throw ConfigError("factor dimension does not match the SDR directions");
  }
  return factors * basis.directions;
}

Matrix predictive_indices(const SdrBasis& basis, const FactorFit& fit) {
  const Eigen::Index t = fit.factors.rows();
  if (t < 2) throw ConfigError("need at least two periods");
  return index_values(basis, fit.factors.topRows(t - 1));
}

IndexCountSelection select_num_indices(const SlicedCovariance& cov, Eigen::Index num_periods,
                                       int num_slices, double alpha) {
  const Eigen::Index k = cov.matrix.rows();
  if (k < 2) throw ConfigError("selecting the number of indices needs K >= 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("significance level must lie in (0, 1)");
  if (num_periods < 2) throw ConfigError("need at least two periods");

  const Vector eig = sym_eigen_desc(cov.matrix).values;
  IndexCountSelection out;
  const double n = static_cast<double>(num_periods - 1);
  for (int l = 0;; ++l) {
    if (l >= k) {
      out.num_indices = static_cast<int>(k);
      return out;
    }
    const int dof = static_cast<int>(k - l) * (num_slices - l - 1);
    if (dof <= 0) {
      out.warnings.push_back("chi-square scan stopped at L=" + std::to_string(l) +
                             ": no degrees of freedom left with H=" + std::to_string(num_slices));
      out.num_indices = l;
      return out;
    }
    const double stat = n * eig.tail(k - l).sum();
    const boost::math::chi_squared dist(dof);
    const double crit = boost::math::quantile(dist, 1.0 - alpha);
    out.statistics.push_back(stat);
    out.critical_values.push_back(crit);
    if (stat <= crit) {
      out.num_indices = l;
      return out;
    }
  }
}

}  // namespace sufcast
