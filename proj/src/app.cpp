#include "sufcast/app.hpp"

#include <cmath>

#include "sufcast/csv.hpp"

namespace sufcast {

namespace {

template <class F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError(name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(name + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(name + ": " + e.what());
  }
}

PipelineConfig pipeline_config(const RunConfig& c) {
  PipelineConfig pc;
  pc.method = c.method;
  pc.num_factors = c.num_factors.value_or(0);
  pc.kmax = c.kmax;
  pc.num_slices = c.num_slices;
  pc.num_indices = c.num_indices.value_or(0);
  pc.alpha = c.alpha;
  pc.bandwidth_multiplier = c.bandwidth_multiplier;
  pc.train_fraction = c.train_fraction;
  pc.refit_every = c.refit_every;
  pc.source = c.covariates ? FactorSource::Projected : FactorSource::Pca;
  return pc;
}

Json warnings_json(const Warnings& w) {
  Json out = Json::array();
  for (const std::string& s : w) out.push_back(s);
  return out;
}

void append(Warnings& to, const Warnings& from) { to.insert(to.end(), from.begin(), from.end()); }

std::optional<SieveBasis> load_sieve(const RunConfig& c, Eigen::Index p) {
  if (!c.covariates) return std::nullopt;
  return stage("covariates", [&] {
    const Matrix z = load_matrix_csv(*c.covariates);
    if (z.rows() != p) {
      throw DataError("covariate file has " + std::to_string(z.rows()) + " rows but the panel has " +
                      std::to_string(p) + " series");
    }
    return build_sieve_basis(z, c.sieve_basis > 0 ? c.sieve_basis : default_num_basis(p));
  });
}

/// Panel whose factors are extracted: raw, or projected on the sieve.
DataPanel extraction_panel(const DataPanel& raw, const std::optional<SieveBasis>& sieve) {
  DataPanel w = raw;
  if (sieve) w.predictors = Projector(sieve->design).apply(raw.predictors);
  return center_panel(w);
}

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Simulate: return "simulate";
    case Subcommand::Forecast: return "forecast";
    case Subcommand::Factors: return "factors";
  }
  return "unknown";
}

void validate(const RunConfig& c) {
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
    throw ConfigError("--train-frac must lie in (0, 1)");
  }
  if (c.num_factors && *c.num_factors < 1) throw ConfigError("--factors must be positive or 'auto'");
  if (c.num_indices && *c.num_indices < 1) throw ConfigError("--indices must be positive or 'auto'");
  if (c.num_slices < 2) throw ConfigError("--slices must be at least 2");
  if (!(c.bandwidth_multiplier > 0.0)) throw ConfigError("--bandwidth-mult must be positive");
  if (c.reps < 1) throw ConfigError("--reps must be at least 1");
  if (c.kmax < 0) throw ConfigError("--kmax must be non-negative");
  if (c.refit_every < 1) throw ConfigError("--refit-every must be at least 1");
  if (c.method == Method::Pcri && c.subcommand != Subcommand::Simulate) {
    throw ConfigError("pcri is only available to simulate");
  }
  if (c.output.empty()) throw ConfigError("--out is required");
  if (c.subcommand != Subcommand::Simulate && c.input.empty()) throw ConfigError("an input CSV is required");
  PipelineConfig pc = pipeline_config(c);
  validate(pc);
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = to_string(c.subcommand);
  j["input"] = c.input;
  j["target"] = c.target;
  j["covariates"] = c.covariates ? Json(*c.covariates) : Json(nullptr);
  j["factors"] = c.num_factors ? Json(*c.num_factors) : Json("auto");
  j["kmax"] = c.kmax;
  j["slices"] = c.num_slices;
  j["indices"] = c.num_indices ? Json(*c.num_indices) : Json("auto");
  j["method"] = to_string(c.method);
  j["bandwidth_mult"] = c.bandwidth_multiplier;
  j["train_frac"] = c.train_fraction;
  j["alpha"] = c.alpha;
  j["refit_every"] = c.refit_every;
  j["sieve_basis"] = c.sieve_basis;
  j["seed"] = c.seed;
  j["reps"] = c.reps;
  j["out"] = c.output;
  if (c.subcommand == Subcommand::Simulate) {
    j["dgp"] = to_string(c.dgp);
    j["p"] = c.p;
    j["T"] = c.T;
    j["panel_out"] = c.panel_out ? Json(*c.panel_out) : Json(nullptr);
    j["out_of_sample"] = c.out_of_sample;
  }
  return j;
}

Json run_forecast(const RunConfig& c) {
  validate(c);
  const LoadedPanel lp = stage("load", [&] { return load_csv(c.input, c.target); });
  PipelineData data;
  data.panel = lp.panel;
  data.sieve = load_sieve(c, lp.panel.num_series());
  PipelineConfig pc = pipeline_config(c);
  const Eigen::Index t = lp.panel.num_periods();
  const auto split = static_cast<Eigen::Index>(std::floor(static_cast<double>(t) * c.train_fraction));
  Warnings warnings;
  if (data.sieve) append(warnings, data.sieve->warnings);

  std::optional<FactorCountSelection> kselect;
  const int k = stage("factor selection", [&] {
    if (c.num_factors) return *c.num_factors;
    if (split < 2) throw ConfigError("training window too short to select K");
    const DataPanel w = extraction_panel(leading_window(lp.panel, split), data.sieve);
    const int kmax = c.kmax > 0 ? c.kmax : default_kmax(w.num_series(), w.num_periods());
    kselect = select_num_factors(w, kmax);
    return kselect->num_factors;
  });
  if (kselect) append(warnings, kselect->warnings);
  pc.num_factors = k;

  const PipelineFit full =
      stage("full-sample fit", [&] { return fit_pipeline(data, pc, {c.method}, t, k); });
  const EvalReport report =
      stage("evaluation", [&] { return evaluate_methods(data, pc, {c.method}).at(c.method); });
  append(warnings, report.warnings);
  if (full.sdr) append(warnings, full.sdr->warnings);
  if (full.slices) append(warnings, full.slices->warnings);

  Json r;
  r["schema"] = "sufcast.forecast";
  r["schema_version"] = kReportVersion;
  r["config"] = config_to_json(c);
  r["input"] = {{"num_series", lp.panel.num_series()},
                {"num_periods", t},
                {"target", lp.target_name},
                {"projected", data.sieve.has_value()}};

  const int num_indices = full.sdr ? full.sdr->num_indices : 0;
  Json sel;
  sel["num_factors"] = k;
  sel["num_factors_auto"] = !c.num_factors.has_value();
  sel["factor_ratios"] = kselect ? to_json(kselect->ratios) : Json::array();
  sel["num_slices"] = full.slices ? full.slices->num_slices : c.num_slices;
  sel["num_indices"] = num_indices;
  sel["num_indices_auto"] = !c.num_indices.has_value();
  sel["method_indices"] = required_indices(c.method);
  if (full.index_selection) {
    sel["selected_num_indices"] = full.index_selection->num_indices;
    sel["index_test"] = {{"statistics", full.index_selection->statistics},
                         {"critical_values", full.index_selection->critical_values},
                         {"alpha", c.alpha}};
  }
  r["selection"] = sel;

  Json fs;
  fs["factor_eigenvalues"] = to_json(full.factors.eigenvalues);
  fs["sliced_covariance_eigenvalues"] = full.sdr ? to_json(full.sdr->spectrum) : Json::array();
  fs["directions_psi"] = full.sdr ? columns_to_json(full.sdr->directions) : Json::array();
  fs["directions_xi"] = full.sdr ? columns_to_json(full.sdr->predictor_directions) : Json::array();
  r["full_sample"] = fs;

  r["result"] = {{"method", to_string(c.method)},
                 {"r2_in", std::isfinite(report.r2_in) ? Json(report.r2_in) : Json(nullptr)},
                 {"r2_oos", std::isfinite(report.r2_oos) ? Json(report.r2_oos) : Json(nullptr)},
                 {"split_index", report.split_index},
                 {"failures", report.failures}};

  Json rows = Json::array();
  std::vector<double> periods;
  std::vector<double> actual;
  std::vector<double> forecast;
  for (Eigen::Index i = 0; i < report.forecasts.size(); ++i) {
    const Eigen::Index period = report.split_index + i;
    rows.push_back({{"period", lp.time_labels[static_cast<std::size_t>(period)]},
                    {"actual", report.actual(i)},
                    {"forecast", report.forecasts(i)}});
    periods.push_back(static_cast<double>(period));
    actual.push_back(report.actual(i));
    forecast.push_back(report.forecasts(i));
  }
  r["forecasts"] = rows;
  r["warnings"] = warnings_json(warnings);

  write_report(c.output, r);
  write_columns_csv(sibling_csv(c.output, "forecasts"), {"period", "actual", "forecast"},
                    {periods, actual, forecast});
  return r;
}

Json run_simulate(const RunConfig& c) {
  validate(c);
  SimConfig sc = make_sim_config(c.dgp, c.p, c.T, c.seed, c.reps);
  validate(sc);
  ReplicationSpec spec;
  spec.out_of_sample = c.out_of_sample;
  spec.num_slices = c.num_slices;
  spec.bandwidth_multiplier = c.bandwidth_multiplier;
  spec.refit_every = c.refit_every;
  spec.train_fraction = c.train_fraction;
  spec.alpha = c.alpha;
  spec.sieve_basis = c.sieve_basis;
  spec.threads = c.threads;

  if (c.panel_out) {
    const SimDraw draw = generate(sc, replication_seed(c.seed, 0));
    write_panel_csv(*c.panel_out, label_panel(draw.panel));
    if (draw.truth.covariates.size() > 0) {
      const Matrix& z = draw.truth.covariates;
      write_columns_csv(sibling_csv(*c.panel_out, "covariates"), {"z"},
                        {std::vector<double>(z.data(), z.data() + z.size())});
    }
  }
  const SummaryTable table = stage("replications", [&] { return run_replications(sc, spec); });

  Json r;
  r["schema"] = "sufcast.simulate";
  r["schema_version"] = kReportVersion;
  r["config"] = config_to_json(c);
  r["design"] = {{"dgp", to_string(sc.dgp)},
                 {"p", sc.p},
                 {"T", sc.T},
                 {"K", sc.K},
                 {"ar_factor", to_json(sc.ar_factor)},
                 {"ar_idio", to_json(sc.ar_idio)},
                 {"sigma_y", sc.sigma_y},
                 {"phi", to_json(sc.phi)},
                 {"seed", sc.seed}};
  r["reps"] = table.reps;
  r["failures"] = table.failures;
  Json metrics = Json::array();
  std::vector<double> med;
  std::vector<double> sd;
  std::vector<double> count;
  std::vector<std::string> names;
  for (const MetricSummary& m : table.rows) {
    metrics.push_back({{"name", m.name},
                       {"median", std::isfinite(m.median) ? Json(m.median) : Json(nullptr)},
                       {"sd", std::isfinite(m.sd) ? Json(m.sd) : Json(nullptr)},
                       {"count", m.count}});
    names.push_back(m.name);
    med.push_back(m.median);
    sd.push_back(m.sd);
    count.push_back(m.count);
  }
  r["metrics"] = metrics;
  Json per_rep = Json::object();
  for (const auto& [name, values] : table.per_rep) {
    per_rep[name] = to_json(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  r["per_rep"] = per_rep;
  r["warnings"] = warnings_json(table.warnings);
  write_report(c.output, r);

  write_columns_csv(sibling_csv(c.output, "summary"), {"metric", "median", "sd", "count"},
                    {med, sd, count}, names);
  return r;
}

Json run_factors(const RunConfig& c) {
  validate(c);
  const LoadedPanel lp = stage("load", [&] { return load_csv(c.input, c.target); });
  const std::optional<SieveBasis> sieve = load_sieve(c, lp.panel.num_series());
  const DataPanel x = extraction_panel(lp.panel, sieve);
  Warnings warnings;
  if (sieve) append(warnings, sieve->warnings);

  const Vector eig = stage("factors", [&] {
    return Vector(gram_eigenvalues(x.predictors) / static_cast<double>(x.num_periods()));
  });
  const int kmax = c.kmax > 0 ? c.kmax : default_kmax(x.num_series(), x.num_periods());
  const FactorCountSelection sel =
      stage("factor selection", [&] { return select_num_factors(x, kmax); });
  const int k = c.num_factors.value_or(sel.num_factors);
  if (!c.num_factors) append(warnings, sel.warnings);
  const FactorFit fit = stage("factors", [&] { return estimate_factors(x, k); });
  append(warnings, fit.warnings);

  Json r;
  r["schema"] = "sufcast.factors";
  r["schema_version"] = kReportVersion;
  r["config"] = config_to_json(c);
  r["input"] = {{"num_series", lp.panel.num_series()},
                {"num_periods", lp.panel.num_periods()},
                {"target", lp.target_name}};
  r["num_factors"] = k;
  r["num_factors_auto"] = !c.num_factors.has_value();
  r["eigenvalues"] = to_json(eig);
  r["ratios"] = to_json(sel.ratios);
  r["projected"] = sieve.has_value();
  r["warnings"] = warnings_json(warnings);
  write_report(c.output, r);

  std::vector<std::string> fh;
  std::vector<std::string> bh;
  std::vector<std::vector<double>> fcols;
  std::vector<std::vector<double>> bcols;
  for (int j = 0; j < k; ++j) {
    fh.push_back("f" + std::to_string(j + 1));
    bh.push_back("b" + std::to_string(j + 1));
    const Vector f = fit.factors.col(j);
    const Vector b = fit.loadings.col(j);
    fcols.emplace_back(f.data(), f.data() + f.size());
    bcols.emplace_back(b.data(), b.data() + b.size());
  }
  write_columns_csv(sibling_csv(c.output, "factors"), fh, fcols);
  write_columns_csv(sibling_csv(c.output, "loadings"), bh, bcols);
  return r;
}

Json run(const RunConfig& c) {
  switch (c.subcommand) {
    case Subcommand::Simulate: return run_simulate(c);
    case Subcommand::Forecast: return run_forecast(c);
    case Subcommand::Factors: return run_factors(c);
  }
  throw ConfigError("unknown subcommand");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 1;
}

}  // namespace sufcast
