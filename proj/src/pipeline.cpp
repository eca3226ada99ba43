#include "sufcast/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "sufcast/incremental.hpp"

namespace sufcast {

std::string to_string(Method m) {
  switch (m) {
    case Method::Pcr: return "pcr";
    case Method::Pc1: return "pc1";
    case Method::Sf1: return "sf1";
    case Method::Sf2: return "sf2";
    case Method::Sfi: return "sfi";
    case Method::Pcri: return "pcri";
  }
  return "unknown";
}

std::string to_string(FactorSource s) {
  switch (s) {
    case FactorSource::Pca: return "pca";
    case FactorSource::Projected: return "projected_pca";
    case FactorSource::Known: return "known_factors";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Pcr, Method::Pc1, Method::Sf1, Method::Sf2, Method::Sfi, Method::Pcri}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "' (expected pcr, pc1, sf1, sf2, sfi or pcri)");
}

int required_indices(Method m) {
  switch (m) {
    case Method::Sf1: return 1;
    case Method::Sf2:
    case Method::Sfi: return 2;
    default: return 0;
  }
}

void validate(const PipelineConfig& c) {
  if (c.num_factors < 0) throw ConfigError("number of factors must be positive or auto");
  if (c.kmax < 0) throw ConfigError("kmax must be positive or default");
  if (c.num_slices < 2) throw ConfigError("need at least two slices");
  if (c.num_indices < 0) throw ConfigError("number of indices must be positive or auto");
  if (c.num_indices > 0 && c.num_indices < required_indices(c.method)) {
    throw ConfigError("method " + to_string(c.method) + " needs at least " +
                      std::to_string(required_indices(c.method)) + " predictive indices, got L=" +
                      std::to_string(c.num_indices));
  }
  if (c.num_factors > 0 && c.num_indices > c.num_factors) {
    throw ConfigError("cannot estimate more indices than factors");
  }
  if (c.num_factors > 0 && required_indices(c.method) > c.num_factors) {
    throw ConfigError("method " + to_string(c.method) + " needs more factors than configured");
  }
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!(c.bandwidth_multiplier > 0.0)) throw ConfigError("bandwidth multiplier must be positive");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1)");
  }
  if (c.refit_every < 1) throw ConfigError("refit interval must be at least 1");
}

namespace {

Matrix base_regressors(Method m, const Matrix& factor_rows, const Matrix& directions) {
  switch (m) {
    case Method::Pcr:
    case Method::Pcri: return factor_rows;
    case Method::Pc1: return factor_rows.leftCols(1);
    case Method::Sf1: return factor_rows * directions.leftCols(1);
    case Method::Sf2:
    case Method::Sfi: return factor_rows * directions.leftCols(2);
  }
  return factor_rows;
}

RegressorSpec spec_for(Method m) {
  switch (m) {
    case Method::Pcr: return RegressorSpec::AllFactors;
    case Method::Pc1: return RegressorSpec::FirstPc;
    case Method::Sf1: return RegressorSpec::Indices;
    case Method::Sfi: return RegressorSpec::IndicesWithInteraction;
    case Method::Pcri: return RegressorSpec::AllFactorsWithInteraction;
    case Method::Sf2: return RegressorSpec::Indices;
  }
  return RegressorSpec::AllFactors;
}

/// Whitened known factors on [0, n) with loadings regressed from the panel.
struct KnownWindow {
  FactorFit fit;
  Vector mean;
  Matrix whitener;
};

KnownWindow whiten_known(const Matrix& known, const Matrix& predictors, Eigen::Index n) {
  KnownWindow out;
  const Matrix f = known.topRows(n);
  out.mean = f.colwise().mean().transpose();
  const Matrix centered = f.rowwise() - out.mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(n);
  out.whitener = inverse_sqrt_spd(cov);
  out.fit.num_factors = static_cast<int>(known.cols());
  out.fit.factors = centered * out.whitener;
  const Matrix x = predictors.leftCols(n).colwise() - predictors.leftCols(n).rowwise().mean();
  out.fit.loadings = x * out.fit.factors / static_cast<double>(n);
  out.fit.eigenvalues = out.fit.loadings.colwise().squaredNorm().transpose() / static_cast<double>(n);
  return out;
}

PipelineFit fit_on_factors(FactorFit factors, const Vector& y, const PipelineConfig& cfg,
                           const std::vector<Method>& methods, bool select_indices) {
  PipelineFit out;
  const Eigen::Index n = factors.factors.rows();
  out.window = n;
  const int k = factors.num_factors;

  int needed = 0;
  for (Method m : methods) needed = std::max(needed, required_indices(m));
  if (cfg.num_indices > 0) needed = std::max(needed, cfg.num_indices);
  if (needed > k) {
    throw ConfigError("need " + std::to_string(needed) + " predictive indices but only " +
                      std::to_string(k) + " factors");
  }

  const bool want_sir = needed > 0 || select_indices;
  if (want_sir) {
    out.slices = assign_slices(y, cfg.num_slices);
    out.covariance = sliced_covariance_factors(factors, *out.slices);
    int dirs = std::max(needed, 1);
    if (select_indices && cfg.num_indices == 0 && k >= 2) {
      out.index_selection =
          select_num_indices(*out.covariance, n, out.slices->num_slices, cfg.alpha);
      const int chosen = out.index_selection->num_indices;
      if (chosen < needed) {
        out.warnings.push_back("chi-square scan selected L=" + std::to_string(chosen) +
                               " but the method uses " + std::to_string(needed) + " indices");
      }
      dirs = std::max(dirs, std::min(chosen, k));
    }
    dirs = std::min(dirs, out.slices->num_slices);
    out.sdr = sdr_directions(*out.covariance, factors, dirs);
  }

  const Matrix directions = out.sdr ? out.sdr->directions : Matrix();
  const Matrix rows = factors.factors.topRows(n - 1);
  const Vector next = y.tail(n - 1);
  for (Method m : methods) {
    MethodModel model;
    model.method = m;
    const Matrix base = base_regressors(m, rows, directions);
    if (m == Method::Sf2) {
      model.smoother = local_linear_fit(base, next, std::nullopt, cfg.bandwidth_multiplier);
    } else {
      model.linear = fit_linear_forecast(base, next, spec_for(m));
    }
    out.models.emplace(m, std::move(model));
  }
  out.factors = std::move(factors);
  return out;
}

Matrix projected_predictors(const PipelineData& data) {
  if (!data.sieve) throw ConfigError("projected PCA needs loading covariates");
  if (data.sieve->design.rows() != data.panel.num_series()) {
    throw ConfigError("covariates describe " + std::to_string(data.sieve->design.rows()) +
                      " series but the panel has " + std::to_string(data.panel.num_series()));
  }
  return Projector(data.sieve->design).apply(data.panel.predictors);
}

FactorFit window_factors(const PipelineData& data, FactorSource source, Eigen::Index n, int k) {
  switch (source) {
    case FactorSource::Pca:
      return estimate_factors(center_panel(leading_window(data.panel, n)), k);
    case FactorSource::Projected: {
      DataPanel w = leading_window(data.panel, n);
      w.predictors = projected_predictors(data).leftCols(n);
      return estimate_factors(center_panel(w), k);
    }
    case FactorSource::Known:
      if (!data.known_factors) throw ConfigError("known-factor source needs the true factors");
      return whiten_known(*data.known_factors, data.panel.predictors, n).fit;
  }
  throw ConfigError("unknown factor source");
}

}  // namespace

Vector MethodModel::predict(const Matrix& factor_rows, const Matrix& directions) const {
  const Matrix base = base_regressors(method, factor_rows, directions);
  if (smoother) return local_linear_predict_rows(*smoother, base);
  return linear.predict(base);
}

Vector PipelineFit::fitted(Method m) const {
  const Matrix directions = sdr ? sdr->directions : Matrix();
  return models.at(m).predict(factors.factors.topRows(window - 1), directions);
}

int resolve_num_factors(const PipelineData& data, const PipelineConfig& config, Eigen::Index n) {
  if (config.source == FactorSource::Known) {
    if (!data.known_factors) throw ConfigError("known-factor source needs the true factors");
    return static_cast<int>(data.known_factors->cols());
  }
  if (config.num_factors > 0) return config.num_factors;
  DataPanel w = leading_window(data.panel, n);
  if (config.source == FactorSource::Projected) w.predictors = projected_predictors(data).leftCols(n);
  w = center_panel(w);
  const int kmax = config.kmax > 0 ? config.kmax : default_kmax(w.num_series(), w.num_periods());
  return select_num_factors(w, kmax).num_factors;
}

PipelineFit fit_pipeline(const PipelineData& data, const PipelineConfig& config,
                         const std::vector<Method>& methods, Eigen::Index n, int num_factors) {
  validate(config);
  validate_panel(data.panel);
  PipelineFit fit = fit_on_factors(window_factors(data, config.source, n, num_factors),
                                   data.panel.target.head(n), config, methods, true);
  return fit;
}

std::map<Method, EvalReport> evaluate_methods(const PipelineData& data, const PipelineConfig& cfg,
                                              const std::vector<Method>& methods,
                                              const EvaluationOptions& options) {
  validate(cfg);
  validate_panel(data.panel);
  const Eigen::Index t = data.panel.num_periods();
  if (t < 20) throw DataError("evaluation needs at least 20 periods, got " + std::to_string(t));
  if (methods.empty()) throw ConfigError("no methods to evaluate");
  const auto split = static_cast<Eigen::Index>(std::floor(static_cast<double>(t) * cfg.train_fraction));
  if (split < cfg.num_slices + 1 || split < 10 || split >= t) {
    throw ConfigError("training window of " + std::to_string(split) +
                      " periods is too short for the configured slices");
  }

  const int k = resolve_num_factors(data, cfg, split);
  const Vector& y = data.panel.target;

  std::map<Method, EvalReport> reports;
  const PipelineFit full = fit_pipeline(data, cfg, methods, t, k);
  for (Method m : methods) {
    EvalReport& r = reports[m];
    r.split_index = split;
    r.r2_in = r_squared(y.tail(t - 1), full.fitted(m));
    r.warnings = full.warnings;
  }
  if (!options.out_of_sample) return reports;

  const Eigen::Index steps = t - split;
  for (Method m : methods) {
    reports[m].forecasts.resize(steps);
    reports[m].actual = y.tail(steps);
  }

  std::optional<RecursiveFactorExtractor> extractor;
  Matrix base;
  if (cfg.source != FactorSource::Known) {
    base = cfg.source == FactorSource::Projected ? projected_predictors(data)
                                                 : data.panel.predictors;
    extractor.emplace(base, k);
  }

  std::optional<PipelineFit> current;
  Matrix map;      // K x dim, sends a centered source vector to its factor
  Vector center;
  for (Eigen::Index n = split; n < t; ++n) {
    const Eigen::Index step = n - split;
    const bool refit = !current || step % cfg.refit_every == 0;
    try {
      Vector f_last;
      if (refit) {
        current.reset();
        FactorFit ff;
        if (cfg.source == FactorSource::Known) {
          KnownWindow kw = whiten_known(*data.known_factors, data.panel.predictors, n);
          map = kw.whitener.transpose();
          center = kw.mean;
          ff = std::move(kw.fit);
        } else {
          ff = extractor->fit_window(n);
          center = extractor->window_means();
          if (cfg.refit_every > 1) map = loading_pseudoinverse(ff);
        }
        f_last = ff.factors.row(n - 1).transpose();
        current = fit_on_factors(std::move(ff), y.head(n), cfg, methods, false);
      } else {
        const Vector src = cfg.source == FactorSource::Known
                               ? Vector(data.known_factors->row(n - 1).transpose())
                               : Vector(base.col(n - 1));
        f_last = map * (src - center);
      }
      const Matrix directions = current->sdr ? current->sdr->directions : Matrix();
      for (Method m : methods) {
        reports[m].forecasts(step) = current->models.at(m).predict(f_last.transpose(), directions)(0);
      }
    } catch (const Error& e) {
      current.reset();
      const double fallback = y.head(n).mean();
      for (Method m : methods) {
        EvalReport& r = reports[m];
        r.forecasts(step) = fallback;
        ++r.failures;
        if (r.failures <= 3) {
          r.warnings.push_back("step n=" + std::to_string(n) + " failed: " + e.what());
        }
      }
    }
  }
  for (Method m : methods) {
    EvalReport& r = reports[m];
    r.r2_oos = out_of_sample_r2_score(r.actual, r.forecasts);
  }
  return reports;
}

EvalReport out_of_sample_r2(const PipelineConfig& config, const PipelineData& data) {
  return evaluate_methods(data, config, {config.method}).at(config.method);
}

}  // namespace sufcast
