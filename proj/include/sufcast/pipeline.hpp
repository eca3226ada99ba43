#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sufcast/forecast.hpp"
#include "sufcast/sieve.hpp"
#include "sufcast/sir.hpp"

namespace sufcast {

/// Forecasting methods. Pcri is a simulation-only baseline.
enum class Method { Pcr, Pc1, Sf1, Sf2, Sfi, Pcri };

/// Where the factors come from: plain PCA, projected PCA on a sieve, or the
/// true factors of a simulation (whitened per window).
enum class FactorSource { Pca, Projected, Known };

std::string to_string(Method m);
std::string to_string(FactorSource s);
Method parse_method(const std::string& name);

/// Number of sufficient predictive indices a method consumes (0 for PCA baselines).
int required_indices(Method m);

struct PipelineConfig {
  Method method = Method::Sf1;
  int num_factors = 0;  // 0 selects K by the eigenvalue ratio
  int kmax = 0;         // 0 uses default_kmax
  int num_slices = 10;
  int num_indices = 0;  // 0 selects L by the chi-square scan
  double alpha = 0.05;
  double bandwidth_multiplier = 1.0;
  double train_fraction = 0.5;
  int refit_every = 1;
  FactorSource source = FactorSource::Pca;
};

/// Throws ConfigError for inconsistent settings.
void validate(const PipelineConfig& config);

struct PipelineData {
  DataPanel panel;                      // raw panel; windows are centered internally
  std::optional<SieveBasis> sieve;      // required for FactorSource::Projected
  std::optional<Matrix> known_factors;  // T x K, required for FactorSource::Known
};

/// One method's fitted forecasting rule on a window.
struct MethodModel {
  Method method = Method::Sf1;
  LinearForecast linear;
  std::optional<KernelSmoother> smoother;

  /// Forecast from factor rows (one forecast per row).
  Vector predict(const Matrix& factor_rows, const Matrix& directions) const;
};

/// Everything estimated on one window [0, n).
struct PipelineFit {
  Eigen::Index window = 0;
  FactorFit factors;
  std::optional<SliceAssignment> slices;
  std::optional<SlicedCovariance> covariance;
  std::optional<SdrBasis> sdr;
  std::optional<IndexCountSelection> index_selection;
  std::map<Method, MethodModel> models;
  Warnings warnings;

  /// Fitted values of y_{t+1}, t = 0..n-2, for a method.
  Vector fitted(Method m) const;
};

/// Number of factors to use on the window [0, n): the configured K, the
/// known-factor dimension, or the eigenvalue-ratio choice.
int resolve_num_factors(const PipelineData& data, const PipelineConfig& config, Eigen::Index n);

/// Fit factors, sliced covariance, directions and every requested method on
/// the window [0, n) with K factors.
PipelineFit fit_pipeline(const PipelineData& data, const PipelineConfig& config,
                         const std::vector<Method>& methods, Eigen::Index n, int num_factors);

/// In- and out-of-sample performance of one method.
struct EvalReport {
  double r2_in = 0.0;
  double r2_oos = 0.0;
  Vector forecasts;  // forecasts of y_t for t = split_index..T-1
  Vector actual;
  Eigen::Index split_index = 0;
  int failures = 0;
  Warnings warnings;
};

struct EvaluationOptions {
  bool out_of_sample = true;
};

/// Recursive evaluation of several methods sharing one factor extraction per
/// step. For each n from floor(T * train_fraction) to T-1 the whole pipeline is
/// re-estimated on periods [0, n) and y_n is forecast. A failing step is
/// recorded and forecast by the training mean.
std::map<Method, EvalReport> evaluate_methods(const PipelineData& data, const PipelineConfig& config,
                                              const std::vector<Method>& methods,
                                              const EvaluationOptions& options = {});

/// evaluate_methods for config.method alone.
EvalReport out_of_sample_r2(const PipelineConfig& config, const PipelineData& data);

}  // namespace sufcast
