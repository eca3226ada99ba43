#pragma once

#include <optional>

#include "sufcast/errors.hpp"
#include "sufcast/panel.hpp"

namespace sufcast {

/// Least-squares principal component solution of a factor model.
///
/// `factors` is T x K with (1/T) F'F = I, `loadings` is p x K with B'B
/// diagonal and B = X F / T. `eigenvalues` are the K leading eigenvalues of
/// X'X / T, descending.
struct FactorFit {
  Matrix factors;
  Matrix loadings;
  Vector eigenvalues;
  int num_factors = 0;
  Warnings warnings;
};

/// Extract K factors from the panel by constrained least squares.
///
/// The smaller of X'X (T x T) and XX' (p x p) is decomposed. Each factor's
/// sign is chosen so the largest-magnitude entry of its loading column is
/// positive, which makes the output a deterministic function of the input.
/// The panel is normally centered first; uncentered input is decomposed as is.
FactorFit estimate_factors(const DataPanel& panel, int num_factors);

/// Left inverse (B'B)^{-1} B' of the loading matrix, K x p.
Matrix loading_pseudoinverse(const FactorFit& fit);

struct FactorCountSelection {
  int num_factors = 0;
  Vector ratios;  // ratios(i) = lambda_{i+1} / lambda_{i+2} (0-based), NaN when excluded
  Warnings warnings;
};

/// Eigenvalue-ratio choice of K from eigenvalues sorted descending.
FactorCountSelection select_num_factors_from_eigenvalues(const Vector& eigenvalues, int kmax);

/// Eigenvalue-ratio choice of K over the eigenvalues of X'X.
FactorCountSelection select_num_factors(const DataPanel& panel, int kmax);

/// min(20, min(p, T) / 2), at least 1.
int default_kmax(Eigen::Index p, Eigen::Index t);

/// Non-zero spectrum of X'X (equivalently XX'), descending, length min(p, T).
Vector gram_eigenvalues(const Matrix& predictors);

namespace detail {
/// Builds a FactorFit for the centered window `x` from the top eigenvectors of
/// the p x p Gram matrix xx' and their eigenvalues.
FactorFit fit_from_cross_section_eigvecs(const Matrix& x, const Matrix& eigvecs,
                                         const Vector& eigvals);
/// Relative tolerance below which a Gram eigenvalue counts as zero.
inline constexpr double kRankTolerance = 1e-12;
}  // namespace detail

}  // namespace sufcast
