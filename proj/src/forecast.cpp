#include "sufcast/forecast.hpp"

#include <cmath>
#include <string>

namespace sufcast {

namespace {

bool has_interaction(RegressorSpec spec) {
  return spec == RegressorSpec::IndicesWithInteraction ||
         spec == RegressorSpec::AllFactorsWithInteraction;
}

std::string column_label(Eigen::Index j, Eigen::Index base_cols, RegressorSpec spec) {
  if (has_interaction(spec) && j == base_cols) return "interaction (column 0 x column 1)";
  return "regressor column " + std::to_string(j);
}

}  // namespace

Matrix build_design(const Matrix& base, RegressorSpec spec) {
  if (spec == RegressorSpec::FirstPc && base.cols() != 1) {
    throw ConfigError("PC1 forecasts take exactly one regressor");
  }
  if (!has_interaction(spec)) return base;
  if (base.cols() < 2) throw ConfigError("interaction specs need at least two regressors");
  Matrix out(base.rows(), base.cols() + 1);
  out.leftCols(base.cols()) = base;
  out.col(base.cols()) = base.col(0).cwiseProduct(base.col(1));
  return out;
}

Vector LinearForecast::predict(const Matrix& base_regressors) const {
  const Matrix design = build_design(base_regressors, spec);
  if (design.cols() != coefficients.size()) {
    throw ConfigError("regressor count does not match the fitted model");
  }
  return (design * coefficients).array() + intercept;
}

LinearForecast pcr_coefficients(const FactorFit& fit, const Vector& target) {
  const Eigen::Index t = fit.factors.rows();
  if (target.size() != t) throw ConfigError("target length does not match the factor fit");
  if (t < 2) throw ConfigError("need at least two periods");
  LinearForecast out;
  out.spec = RegressorSpec::AllFactors;
  out.coefficients = fit.factors.topRows(t - 1).transpose() * target.tail(t - 1) /
                     static_cast<double>(t - 1);
  out.intercept = target.tail(t - 1).mean();
  return out;
}

LinearForecast fit_linear_forecast(const Matrix& regressors, const Vector& target,
                                   RegressorSpec spec) {
  if (regressors.rows() != target.size()) throw ConfigError("regressor rows must match the target");
  if (!regressors.allFinite() || !target.allFinite()) {
    throw DataError("regression input has non-finite entries");
  }
  const Matrix design = build_design(regressors, spec);
  const Eigen::Index n = design.rows();
  const Eigen::Index q = design.cols();
  if (n <= q + 1) {
    throw ConfigError("regression needs more observations (" + std::to_string(n) +
                      ") than coefficients (" + std::to_string(q + 1) + ")");
  }

  Matrix full(n, q + 1);
  full.col(0).setOnes();
  full.rightCols(q) = design;

  // Gram-Schmidt sweep in column order to name the first collinear column.
  Matrix basis(n, q + 1);
  basis.col(0) = full.col(0) / std::sqrt(static_cast<double>(n));
  for (Eigen::Index j = 1; j <= q; ++j) {
    Vector v = full.col(j);
    const double norm0 = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      v -= basis.leftCols(j) * (basis.leftCols(j).transpose() * v);
    }
    const double norm = v.norm();
    if (norm0 == 0.0 || norm <= 1e-10 * norm0) {
      throw NumericalError(column_label(j - 1, regressors.cols(), spec) +
                           " is collinear with the intercept and earlier columns");
    }
    basis.col(j) = v / norm;
  }

  const Vector beta = full.householderQr().solve(target);
  LinearForecast out;
  out.spec = spec;
  out.intercept = beta(0);
  out.coefficients = beta.tail(q);
  return out;
}

Vector default_bandwidths(const Matrix& points, double multiplier) {
  const auto n = static_cast<double>(points.rows());
  const auto l = static_cast<double>(points.cols());
  Vector out(points.cols());
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double mean = points.col(j).mean();
    const double sd = std::sqrt((points.col(j).array() - mean).square().sum() / (n - 1.0));
    out(j) = 1.06 * sd * std::pow(n, -1.0 / (4.0 + l)) * multiplier;
  }
  return out;
}

KernelSmoother local_linear_fit(const Matrix& indices, const Vector& target,
                                const std::optional<Vector>& bandwidths,
                                double bandwidth_multiplier) {
  const Eigen::Index n = indices.rows();
  const Eigen::Index l = indices.cols();
  if (l < 1) throw ConfigError("local linear regression needs at least one index");
  if (target.size() != n) throw ConfigError("index rows must match the target");
  if (n < 10 || n < l + 2) throw ConfigError("local linear regression needs at least 10 points");
  if (!indices.allFinite() || !target.allFinite()) throw DataError("non-finite smoother input");
  if (!(bandwidth_multiplier > 0.0)) throw ConfigError("bandwidth multiplier must be positive");
  for (Eigen::Index j = 0; j < l; ++j) {
    if (indices.col(j).maxCoeff() == indices.col(j).minCoeff()) {
      throw DataError("predictive index " + std::to_string(j) + " has zero variance");
    }
  }
  KernelSmoother out;
  out.points = indices;
  out.targets = target;
  if (bandwidths) {
    if (bandwidths->size() != l) throw ConfigError("one bandwidth per index is required");
    if (!(bandwidths->array() > 0.0).all()) throw ConfigError("bandwidths must be positive");
    out.bandwidths = *bandwidths;
  } else {
    out.bandwidths = default_bandwidths(indices, bandwidth_multiplier);
  }
  return out;
}

LocalLinearPrediction local_linear_predict(const KernelSmoother& s, const Vector& point) {
  const Eigen::Index n = s.points.rows();
  const Eigen::Index l = s.points.cols();
  if (point.size() != l) throw ConfigError("prediction point has the wrong dimension");
  if (!point.allFinite()) throw DataError("prediction point is not finite");

  Matrix design(n, l + 1);
  design.col(0).setOnes();
  design.rightCols(l) = s.points.rowwise() - point.transpose();
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u2 =
        (design.row(i).tail(l).transpose().array() / s.bandwidths.array()).square().sum();
    w(i) = std::exp(-0.5 * u2);
  }

  LocalLinearPrediction out;
  if (w.sum() >= 1e-8) {
    const Vector root = w.cwiseSqrt();
    const Matrix wd = root.asDiagonal() * design;
    Eigen::ColPivHouseholderQR<Matrix> qr(wd);
    qr.setThreshold(1e-10);
    if (qr.rank() == l + 1) {
      out.value = qr.solve(Vector(root.cwiseProduct(s.targets)))(0);
      return out;
    }
  }
  const Vector beta = design.householderQr().solve(s.targets);
  out.value = beta(0);
  out.global_fallback = true;
  return out;
}

Vector local_linear_predict_rows(const KernelSmoother& smoother, const Matrix& points) {
  Vector out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out(i) = local_linear_predict(smoother, points.row(i).transpose()).value;
  }
  return out;
}

double r_squared(const Vector& actual, const Vector& fitted) {
  if (actual.size() != fitted.size()) throw ConfigError("R^2 inputs differ in length");
  const double sst = (actual.array() - actual.mean()).square().sum();
  if (!(sst > 0.0)) throw DataError("target has zero variation; R^2 is undefined");
  return 1.0 - (actual - fitted).squaredNorm() / sst;
}

double in_sample_r2(const LinearForecast& model, const Matrix& regressors, const Vector& target) {
  return r_squared(target, model.predict(regressors));
}

double in_sample_r2(const KernelSmoother& model, const Vector& target) {
  return r_squared(target, local_linear_predict_rows(model, model.points));
}

double out_of_sample_r2_score(const Vector& actual, const Vector& forecast) {
  return r_squared(actual, forecast);
}

}  // namespace sufcast
