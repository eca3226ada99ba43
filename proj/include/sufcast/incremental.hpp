#pragma once

#include "sufcast/factors.hpp"

namespace sufcast {

/// Factor extraction over a growing leading window of a fixed panel.
///
/// Keeps the running cross-product sum_t x_t x_t' and sum_t x_t, so moving
/// from window n to n + 1 is a rank-one update. The leading eigenvectors of
/// the centered p x p Gram matrix are tracked by block subspace iteration
/// warm-started from the previous window; small panels and non-converged
/// iterations use the dense solver. The resulting FactorFit matches
/// estimate_factors(center_panel(window)) up to solver tolerance.
class RecursiveFactorExtractor {
 public:
  RecursiveFactorExtractor(Matrix predictors, int num_factors);

  /// Fit on periods [0, n). Windows may be requested in any order, but
  /// increasing n is the cheap path.
  FactorFit fit_window(Eigen::Index n);

  /// Predictor means over the last fitted window.
  const Vector& window_means() const { return mean_; }

  /// Number of fits that needed the dense fallback.
  int dense_fallbacks() const { return dense_fallbacks_; }

 private:
  void advance_to(Eigen::Index n);
  Matrix centered_gram_times(const Matrix& v) const;
  bool subspace_iterate(Matrix& vecs, Vector& vals);
  void dense_solve(Matrix& vecs, Vector& vals);

  Matrix x_;
  int k_;
  Eigen::Index block_;
  Eigen::Index n_ = 0;
  Matrix cross_;  // sum x_t x_t' over the window (lower triangle maintained fully)
  Vector sum_;
  Vector mean_;
  Matrix ritz_;   // p x block_, warm start
  bool have_ritz_ = false;
  int dense_fallbacks_ = 0;
};

}  // namespace sufcast
