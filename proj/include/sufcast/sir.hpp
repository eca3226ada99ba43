#pragma once

#include <vector>

#include "sufcast/errors.hpp"
#include "sufcast/factors.hpp"

namespace sufcast {

/// Partition of the pairs (f_t, y_{t+1}), t = 0..T-2, into slices by the
/// order statistics of y_{t+1}.
struct SliceAssignment {
  int requested_slices = 0;
  int num_slices = 0;  // H actually used (all non-empty)
  int slice_size = 0;  // c = ceil((T-1)/H)
  /// order[k] is the period t of the k-th smallest y_{t+1}; ties keep time order.
  std::vector<Eigen::Index> order;
  /// slice_of[k] is the slice of ordered position k.
  std::vector<int> slice_of;
  Warnings warnings;

  Eigen::Index num_pairs() const { return static_cast<Eigen::Index>(order.size()); }
  int size_of(int h) const;
  std::vector<Eigen::Index> members(int h) const;
};

enum class CovarianceSource { FactorForm, LoadingForm };

/// Sliced covariance of the inverse regression curve, K x K.
struct SlicedCovariance {
  Matrix matrix;
  std::vector<Vector> slice_means;  // K-vectors, one per slice
  CovarianceSource source = CovarianceSource::FactorForm;
  Warnings warnings;
};

/// Orthonormal SDR directions in factor space and their images in predictor space.
struct SdrBasis {
  Matrix directions;             // K x L, columns psi_j
  Vector eigenvalues;            // L leading eigenvalues, descending
  Vector spectrum;               // all K eigenvalues of the sliced covariance
  Matrix predictor_directions;   // p x L, columns xi_j = Lambda_b' psi_j
  int num_indices = 0;
  Warnings warnings;
};

SliceAssignment assign_slices(const Vector& target, int num_slices);

/// (1/H) sum_h m_h m_h' with m_h the mean estimated factor in slice h.
SlicedCovariance sliced_covariance_factors(const FactorFit& fit, const SliceAssignment& slices);

/// Lambda_b ((1/H) sum_h xbar_h xbar_h') Lambda_b' with xbar_h the slice means of
/// the predictors. Agrees with the factor form for least-squares PCA fits;
/// other fits only raise a warning when the two disagree.
SlicedCovariance sliced_covariance_loadings(const DataPanel& panel, const FactorFit& fit,
                                            const SliceAssignment& slices);

/// Top-L eigenvectors of the sliced covariance, sign-fixed like factor loadings.
SdrBasis sdr_directions(const SlicedCovariance& cov, const FactorFit& fit, int num_indices);

/// (T-1) x L matrix with entry (t, j) = psi_j' f_t for t = 0..T-2.
Matrix predictive_indices(const SdrBasis& basis, const FactorFit& fit);

/// psi_j' f_t for every row of `factors`.
Matrix index_values(const SdrBasis& basis, const Matrix& factors);

struct IndexCountSelection {
  int num_indices = 0;
  std::vector<double> statistics;  // one per tested L
  std::vector<double> critical_values;
  Warnings warnings;
};

/// Sequential chi-square test for the number of indices. At each L the
/// statistic (T-1) * (sum of the K-L smallest eigenvalues) is compared with
/// the (1 - alpha) quantile of chi-square with (K-L)(H-L-1) degrees of
/// freedom; the first L that is not rejected is returned.
IndexCountSelection select_num_indices(const SlicedCovariance& cov, Eigen::Index num_periods,
                                       int num_slices, double alpha);

}  // namespace sufcast
