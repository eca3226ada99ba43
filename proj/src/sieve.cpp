#include "sufcast/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sufcast {

namespace {

double sample_quantile(std::vector<double> sorted, double prob) {
  // Linear interpolation between order statistics (the common "type 7" rule).
  const double pos = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

int default_num_basis(Eigen::Index p, int degree) {
  const int rate = static_cast<int>(std::ceil(std::pow(static_cast<double>(p), 0.25) - 1e-12));
  return std::max(degree + 1, rate);
}

Vector bspline_basis(const Vector& knots, int degree, double x) {
  const Eigen::Index n_basis = knots.size() - degree - 1;
  const double lo = knots(degree);
  const double hi = knots(n_basis);
  x = std::clamp(x, lo, hi);

  Eigen::Index span = n_basis - 1;
  if (x < hi) {
    span = degree;
    while (span + 1 < n_basis && knots(span + 1) <= x) ++span;
  }

  std::vector<double> n(degree + 1, 0.0), left(degree + 1, 0.0), right(degree + 1, 0.0);
  n[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = x - knots(span + 1 - j);
    right[j] = knots(span + j) - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom == 0.0 ? 0.0 : n[r] / denom;
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  Vector out = Vector::Zero(n_basis);
  for (int r = 0; r <= degree; ++r) out(span - degree + r) = n[r];
  return out;
}

SieveBasis build_sieve_basis(const Matrix& covariates, int num_basis, int degree) {
  const Eigen::Index p = covariates.rows();
  const Eigen::Index d = covariates.cols();
  if (degree < 0) throw ConfigError("spline degree must be non-negative");
  if (d < 1) throw ConfigError("sieve needs at least one covariate");
  if (num_basis < degree + 1) {
    throw ConfigError("need J >= degree + 1 basis functions (J=" + std::to_string(num_basis) +
                      ", degree=" + std::to_string(degree) + ")");
  }
  if (p <= static_cast<Eigen::Index>(num_basis) * d) {
    throw ConfigError("sieve dimension J*d=" + std::to_string(num_basis * d) +
                      " must be smaller than the number of series p=" + std::to_string(p));
  }
  if (!covariates.allFinite()) throw DataError("covariates have non-finite entries");

  SieveBasis out;
  out.covariates = covariates;
  out.degree = degree;
  out.num_basis = num_basis;

  std::vector<Matrix> blocks;
  Eigen::Index total = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    std::vector<double> v(covariates.col(k).data(), covariates.col(k).data() + p);
    std::sort(v.begin(), v.end());
    const double lo = v.front();
    const double hi = v.back();
    if (!(hi > lo)) {
      throw DataError("covariate " + std::to_string(k) + " is constant; it spans a rank-1 sieve");
    }
    const int pieces = num_basis - degree;
    std::vector<double> interior;
    for (int m = 1; m < pieces; ++m) {
      const double q = sample_quantile(v, static_cast<double>(m) / pieces);
      if (q <= lo || q >= hi) continue;
      if (!interior.empty() && q <= interior.back()) continue;
      interior.push_back(q);
    }
    const int effective = static_cast<int>(interior.size()) + degree + 1;
    if (effective < num_basis) {
      out.warnings.push_back("covariate " + std::to_string(k) + ": tied quantile knots collapsed, J reduced from " +
                             std::to_string(num_basis) + " to " + std::to_string(effective));
    }
    Vector knots(interior.size() + 2 * (degree + 1));
    Eigen::Index pos = 0;
    for (int r = 0; r <= degree; ++r) knots(pos++) = lo;
    for (double q : interior) knots(pos++) = q;
    for (int r = 0; r <= degree; ++r) knots(pos++) = hi;

    Matrix block(p, effective);
    for (Eigen::Index i = 0; i < p; ++i) {
      block.row(i) = bspline_basis(knots, degree, covariates(i, k)).transpose();
    }
    out.basis_per_covariate.push_back(effective);
    out.knots.push_back(std::move(knots));
    total += effective;
    blocks.push_back(std::move(block));
  }

  out.design.resize(p, total);
  Eigen::Index col = 0;
  for (const Matrix& b : blocks) {
    out.design.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  return out;
}

Projector::Projector(const Matrix& design) {
  if (design.cols() == 0) throw ConfigError("empty sieve design");
  Eigen::BDCSVD<Matrix> svd(design, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double tol = s(0) * 1e-10 * static_cast<double>(std::max(design.rows(), design.cols()));
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  if (r == 0) throw NumericalError("sieve design is numerically zero");
  if (r < design.cols()) {
    warnings_.push_back("sieve Gram matrix is rank deficient (rank " + std::to_string(r) + " of " +
                        std::to_string(design.cols()) + "); using the pseudo-inverse projection");
  }
  basis_ = svd.matrixU().leftCols(r);
}

Projector Projector::identity(Eigen::Index p) {
  Projector out;
  out.basis_ = Matrix::Identity(p, p);
  return out;
}

DataPanel project_panel(const DataPanel& panel, const SieveBasis& basis) {
  validate_panel(panel);
  if (basis.design.rows() != panel.num_series()) {
    throw ConfigError("sieve built on " + std::to_string(basis.design.rows()) +
                      " entities but the panel has " + std::to_string(panel.num_series()) +
                      " series");
  }
  DataPanel out = panel;
  out.predictors = Projector(basis.design).apply(panel.predictors);
  return out;
}

FactorFit projected_factors(const DataPanel& panel, const SieveBasis& basis, int num_factors) {
  validate_panel(panel);
  if (basis.design.rows() != panel.num_series()) {
    throw ConfigError("sieve and panel disagree on the number of series");
  }
  const Projector proj(basis.design);
  DataPanel projected = panel;
  projected.predictors = proj.apply(panel.predictors);
  FactorFit fit = estimate_factors(projected, num_factors);
  fit.warnings.insert(fit.warnings.end(), proj.warnings().begin(), proj.warnings().end());
  return fit;
}

}  // namespace sufcast
