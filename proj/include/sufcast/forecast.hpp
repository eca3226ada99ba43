#pragma once

#include <optional>

#include "sufcast/errors.hpp"
#include "sufcast/factors.hpp"

namespace sufcast {

/// Which regressors a linear forecast was built on. The interaction specs
/// append the product of the first two base regressors.
enum class RegressorSpec {
  AllFactors,                 // PCR
  FirstPc,                    // PC1
  Indices,                    // SF with linear link
  IndicesWithInteraction,     // SFi
  AllFactorsWithInteraction,  // PCRi
};

struct LinearForecast {
  Vector coefficients;  // one per design column (base regressors + interaction)
  double intercept = 0.0;
  RegressorSpec spec = RegressorSpec::AllFactors;

  /// Predictions for each row of the base regressors.
  Vector predict(const Matrix& base_regressors) const;
};

/// Design columns for a spec: the base regressors plus, for the interaction
/// specs, the product of columns 0 and 1.
Matrix build_design(const Matrix& base_regressors, RegressorSpec spec);

/// Least-squares coefficients phi = (T-1)^{-1} sum_t y_{t+1} f_t of the
/// target on the estimated factors; the intercept is the mean of y_2..y_T.
LinearForecast pcr_coefficients(const FactorFit& fit, const Vector& target);

/// Ordinary least squares with intercept. Throws NumericalError naming the
/// first column that is collinear with the intercept and earlier columns.
LinearForecast fit_linear_forecast(const Matrix& regressors, const Vector& target,
                                   RegressorSpec spec);

enum class Kernel { Gaussian };

struct KernelSmoother {
  Matrix points;   // n x L training indices
  Vector targets;  // n
  Vector bandwidths;
  Kernel kernel = Kernel::Gaussian;
};

/// Rule-of-thumb bandwidth 1.06 * sd * n^{-1/(4+L)} * multiplier per column.
Vector default_bandwidths(const Matrix& points, double multiplier = 1.0);

/// Stores the training data; bandwidths default to the rule of thumb.
KernelSmoother local_linear_fit(const Matrix& indices, const Vector& target,
                                const std::optional<Vector>& bandwidths = std::nullopt,
                                double bandwidth_multiplier = 1.0);

struct LocalLinearPrediction {
  double value = 0.0;
  bool global_fallback = false;  // kernel mass vanished or local system was singular
};

/// Gaussian-product-kernel weighted plane through the training data,
/// evaluated at `point`.
LocalLinearPrediction local_linear_predict(const KernelSmoother& smoother, const Vector& point);

/// local_linear_predict at every row of `points`.
Vector local_linear_predict_rows(const KernelSmoother& smoother, const Matrix& points);

/// 1 - SSR/SST with SST about the mean of `actual`.
double r_squared(const Vector& actual, const Vector& fitted);

double in_sample_r2(const LinearForecast& model, const Matrix& regressors, const Vector& target);
double in_sample_r2(const KernelSmoother& model, const Vector& target);

/// 1 - sum (y - yhat)^2 / sum (y - ybar)^2 with ybar the test-sample mean.
/// Negative whenever the forecasts lose to that mean.
double out_of_sample_r2_score(const Vector& actual, const Vector& forecast);

}  // namespace sufcast
