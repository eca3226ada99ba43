#pragma once

#include <vector>

#include "sufcast/errors.hpp"
#include "sufcast/factors.hpp"

namespace sufcast {

/// Additive B-spline sieve over observed loading covariates.
///
/// `design` is p x (sum of per-covariate basis counts), laid out in
/// covariate-major blocks: the first block holds the basis functions of
/// covariate 0 evaluated at every entity, and so on.
struct SieveBasis {
  Matrix covariates;                   // p x d
  int degree = 3;
  int num_basis = 0;                   // requested J per covariate
  std::vector<int> basis_per_covariate;  // effective J after knot collapsing
  std::vector<Vector> knots;           // clamped knot vector per covariate
  Matrix design;
  Warnings warnings;
};

/// max(degree + 1, ceil(p^{1/4})).
int default_num_basis(Eigen::Index p, int degree = 3);

/// Values of the clamped B-spline basis with the given knot vector at x.
/// Points outside the knot range are clamped to it.
Vector bspline_basis(const Vector& knots, int degree, double x);

/// Build the additive sieve. Interior knots sit at equally spaced sample
/// quantiles of each covariate; tied knots are collapsed, which reduces the
/// effective basis count and is reported in `warnings`.
SieveBasis build_sieve_basis(const Matrix& covariates, int num_basis, int degree = 3);

/// Orthogonal projection onto the column space of a design matrix, held as
/// an orthonormal basis so that P = Q Q' is never formed unless asked for.
class Projector {
 public:
  /// Rank-revealing construction; a rank-deficient design adds a warning.
  explicit Projector(const Matrix& design);
  static Projector identity(Eigen::Index p);

  Matrix apply(const Matrix& x) const { return basis_ * (basis_.transpose() * x); }
  Matrix matrix() const { return basis_ * basis_.transpose(); }
  const Matrix& basis() const { return basis_; }
  Eigen::Index rank() const { return basis_.cols(); }
  const Warnings& warnings() const { return warnings_; }

 private:
  Projector() = default;
  Matrix basis_;
  Warnings warnings_;
};

/// X-hat = P X, with P the projection onto the sieve space.
DataPanel project_panel(const DataPanel& panel, const SieveBasis& basis);

/// PCA on the projected panel; loadings are T^{-1} X-hat F-hat.
FactorFit projected_factors(const DataPanel& panel, const SieveBasis& basis, int num_factors);

}  // namespace sufcast
