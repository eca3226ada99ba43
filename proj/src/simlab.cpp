#include "sufcast/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace sufcast {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// (periods x dims) stationary Gaussian AR(1) paths with unit innovations.
/// Row 0 is drawn from the stationary law.
Matrix ar1_paths(const Vector& coef, Eigen::Index periods, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(periods, coef.size());
  for (Eigen::Index j = 0; j < coef.size(); ++j) {
    const double a = coef(j);
    out(0, j) = normal(rng) / std::sqrt(1.0 - a * a);
    for (Eigen::Index t = 1; t < periods; ++t) out(t, j) = a * out(t - 1, j) + normal(rng);
  }
  return out;
}

Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  }
  return out;
}

double interaction_link(const Eigen::Ref<const Vector>& f) { return f(0) * (f(1) + f(2) + 1.0); }

/// Target y_{t+1} for every row f_t of `factors`, including its innovation.
Vector target_from_factors(const SimConfig& c, const Matrix& factors, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(factors.rows());
  for (Eigen::Index t = 0; t < factors.rows(); ++t) {
    const Vector f = factors.row(t).transpose();
    switch (c.dgp) {
      case Dgp::Linear41: y(t) = c.phi.dot(f) + c.sigma_y * normal(rng); break;
      case Dgp::Interaction42:
      case Dgp::Semiparametric43: y(t) = interaction_link(f) + c.target_noise * normal(rng); break;
      case Dgp::NullIndependent: y(t) = normal(rng); break;
    }
  }
  return y;
}

Matrix true_directions(const SimConfig& c) {
  switch (c.dgp) {
    case Dgp::Linear41: return c.phi.normalized();
    case Dgp::Interaction42:
    case Dgp::Semiparametric43: {
      Matrix d = Matrix::Zero(c.K, 2);
      d(0, 0) = 1.0;
      d(1, 1) = d(2, 1) = 1.0 / std::sqrt(2.0);
      return d;
    }
    case Dgp::NullIndependent: return Matrix(c.K, 0);
  }
  return Matrix(c.K, 0);
}

/// Shared tail of every generator: factor paths, idiosyncratic terms, target.
SimDraw assemble(const SimConfig& c, Matrix loadings, Matrix covariates, std::mt19937_64& rng) {
  validate(c);
  SimDraw out;
  const Matrix path = ar1_paths(c.ar_factor, c.T + 1, rng);  // row 0 is f_0
  const Matrix idio = ar1_paths(c.ar_idio, c.T, rng);        // T x p
  const Vector y = target_from_factors(c, path.topRows(c.T), rng);

  out.truth.factors = path.bottomRows(c.T);
  out.truth.loadings = std::move(loadings);
  out.truth.covariates = std::move(covariates);
  out.panel.predictors = out.truth.loadings * out.truth.factors.transpose();
  if (c.idio_scale != 0.0) out.panel.predictors += c.idio_scale * idio.transpose();
  out.panel.target = y;  // y(t) depends on f_{t-1}; y(0) on the presample f_0

  out.truth.directions = true_directions(c);
  out.truth.rotation = canonical_rotation(out.truth.factors, out.truth.loadings);
  if (out.truth.directions.cols() > 0) {
    const Matrix mapped =
        out.truth.rotation.transpose().partialPivLu().solve(out.truth.directions);
    out.truth.central_basis = orthonormal_basis(mapped);
  } else {
    out.truth.central_basis = Matrix(c.K, 0);
  }
  return out;
}

}  // namespace

std::string to_string(Dgp dgp) {
  switch (dgp) {
    case Dgp::Linear41: return "linear";
    case Dgp::Interaction42: return "interaction";
    case Dgp::Semiparametric43: return "semiparametric";
    case Dgp::NullIndependent: return "null";
  }
  return "unknown";
}

Dgp parse_dgp(const std::string& name) {
  for (Dgp d : {Dgp::Linear41, Dgp::Interaction42, Dgp::Semiparametric43, Dgp::NullIndependent}) {
    if (to_string(d) == name) return d;
  }
  throw ConfigError("unknown DGP '" + name + "' (expected linear, interaction, semiparametric or null)");
}

void validate(const SimConfig& c) {
  if (c.p < 1 || c.T < 2 || c.K < 1) throw ConfigError("simulation needs p >= 1, T >= 2, K >= 1");
  if (c.ar_factor.size() != c.K) throw ConfigError("need one AR coefficient per factor");
  if (c.ar_idio.size() != c.p) throw ConfigError("need one AR coefficient per series");
  if ((c.ar_factor.array().abs() >= 1.0).any() || (c.ar_idio.array().abs() >= 1.0).any()) {
    throw ConfigError("AR(1) coefficients must lie strictly inside (-1, 1)");
  }
  if (!(c.sigma_y >= 0.0) || !(c.idio_scale >= 0.0) || !(c.target_noise >= 0.0) ||
      !(c.gamma_scale >= 0.0)) {
    throw ConfigError("noise scales must be non-negative");
  }
  if (c.dgp == Dgp::Linear41 && c.phi.size() != c.K) throw ConfigError("phi must have K entries");
  if ((c.dgp == Dgp::Interaction42 || c.dgp == Dgp::Semiparametric43) && c.K < 3) {
    throw ConfigError("the interaction target needs at least three factors");
  }
  if (c.dgp == Dgp::Semiparametric43 && c.K != 3) {
    throw ConfigError("the semiparametric design has exactly three factors");
  }
  if (c.reps < 1) throw ConfigError("need at least one replication");
}

double linear_signal_variance(const Vector& phi, const Vector& ar_factor) {
  return (phi.array().square() / (1.0 - ar_factor.array().square())).sum();
}

SimConfig make_sim_config(Dgp dgp, Eigen::Index p, Eigen::Index T, std::uint64_t seed, int reps) {
  SimConfig c;
  c.dgp = dgp;
  c.p = p;
  c.T = T;
  c.seed = seed;
  c.reps = reps;
  switch (dgp) {
    case Dgp::Linear41:
    case Dgp::NullIndependent: c.K = 5; break;
    case Dgp::Interaction42: c.K = 7; break;
    case Dgp::Semiparametric43: c.K = 3; break;
  }
  std::mt19937_64 rng(splitmix64(seed ^ 0xA5A5A5A5ULL));
  std::uniform_real_distribution<double> unif(0.2, 0.8);
  c.ar_factor.resize(c.K);
  for (int j = 0; j < c.K; ++j) c.ar_factor(j) = unif(rng);
  c.ar_idio.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) c.ar_idio(i) = unif(rng);
  if (dgp == Dgp::Linear41) {
    c.phi = Vector::Zero(c.K);
    c.phi.head(3) << 0.8, 0.5, 0.3;
    c.sigma_y = std::sqrt(linear_signal_variance(c.phi, c.ar_factor));
  }
  return c;
}

std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep) {
  return splitmix64(splitmix64(master) + rep);
}

SimDraw gen_linear_41(const SimConfig& c, std::uint64_t stream_seed) {
  if (c.dgp != Dgp::Linear41) throw ConfigError("config is not the linear design");
  std::mt19937_64 rng(stream_seed);
  Matrix b = standard_normal(c.p, c.K, rng);
  return assemble(c, std::move(b), Matrix(), rng);
}

SimDraw gen_interaction_42(const SimConfig& c, std::uint64_t stream_seed) {
  if (c.dgp != Dgp::Interaction42) throw ConfigError("config is not the interaction design");
  std::mt19937_64 rng(stream_seed);
  Matrix b = standard_normal(c.p, c.K, rng);
  return assemble(c, std::move(b), Matrix(), rng);
}

Eigen::Vector3d semiparametric_loading(double z) {
  return {z, z * z - 1.0, z * z * z - 2.0 * z};
}

SimDraw gen_semiparametric_43(const SimConfig& c, std::uint64_t stream_seed) {
  if (c.dgp != Dgp::Semiparametric43) throw ConfigError("config is not the semiparametric design");
  std::mt19937_64 rng(stream_seed);
  Matrix z = standard_normal(c.p, 1, rng);
  Matrix b(c.p, 3);
  for (Eigen::Index i = 0; i < c.p; ++i) b.row(i) = semiparametric_loading(z(i, 0)).transpose();
  if (c.gamma_scale > 0.0) b += c.gamma_scale * standard_normal(c.p, 3, rng);
  return assemble(c, std::move(b), std::move(z), rng);
}

SimDraw gen_null(const SimConfig& c, std::uint64_t stream_seed) {
  if (c.dgp != Dgp::NullIndependent) throw ConfigError("config is not the null design");
  std::mt19937_64 rng(stream_seed);
  Matrix b = standard_normal(c.p, c.K, rng);
  return assemble(c, std::move(b), Matrix(), rng);
}

SimDraw generate(const SimConfig& c, std::uint64_t stream_seed) {
  switch (c.dgp) {
    case Dgp::Linear41: return gen_linear_41(c, stream_seed);
    case Dgp::Interaction42: return gen_interaction_42(c, stream_seed);
    case Dgp::Semiparametric43: return gen_semiparametric_43(c, stream_seed);
    case Dgp::NullIndependent: return gen_null(c, stream_seed);
  }
  throw ConfigError("unknown DGP");
}

Matrix canonical_rotation(const Matrix& f, const Matrix& b) {
  if (f.cols() != b.cols()) throw ConfigError("factors and loadings disagree on K");
  const Matrix w = f.transpose() * f / static_cast<double>(f.rows());
  const Matrix w_half = sqrt_psd(w);
  const Matrix w_inv_half = inverse_sqrt_spd(w);  // throws on singular F'F
  const Matrix energy = w_half * (b.transpose() * b) * w_half;
  SymmetricEigen eig = sym_eigen_desc(0.5 * (energy + energy.transpose()));
  // Rotated loadings B H^{-1} = B W^{1/2} V: sign each column like factor_core.
  const Matrix rotated_loadings = b * w_half * eig.vectors;
  for (Eigen::Index j = 0; j < eig.vectors.cols(); ++j) {
    if (dominant_sign(rotated_loadings.col(j)) < 0.0) eig.vectors.col(j) *= -1.0;
  }
  return eig.vectors.transpose() * w_inv_half;
}

double subspace_r2(const Vector& estimate, const Matrix& basis) {
  const double norm = estimate.norm();
  if (!(norm > 0.0)) throw DataError("subspace R^2 of a zero vector is undefined");
  if (basis.rows() != estimate.size()) throw ConfigError("basis and estimate differ in dimension");
  return (basis.transpose() * (estimate / norm)).squaredNorm();
}

Matrix alignment_rotation(const Matrix& estimated_factors, const Matrix& rotated_true_factors) {
  return procrustes_rotation(rotated_true_factors, estimated_factors);
}

Matrix large_sample_sliced_covariance(const SimConfig& c, int num_slices, Eigen::Index draws,
                                      std::uint64_t seed) {
  validate(c);
  std::mt19937_64 rng(seed);
  const Matrix path = ar1_paths(c.ar_factor, draws + 1, rng);
  const Vector y_next = target_from_factors(c, path.topRows(draws), rng);
  // Pairs (f_t, y_{t+1}): target vector shifted by one so that slicing sees y_{t+1}.
  Vector target(draws + 1);
  target(0) = 0.0;
  target.tail(draws) = y_next;
  FactorFit truth;
  truth.num_factors = c.K;
  truth.factors = path.topRows(draws + 1);
  return sliced_covariance_factors(truth, assign_slices(target, num_slices)).matrix;
}

const MetricSummary& SummaryTable::at(const std::string& name) const {
  for (const MetricSummary& r : rows) {
    if (r.name == name) return r;
  }
  throw ConfigError("summary table has no metric '" + name + "'");
}

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

void record_reports(std::map<std::string, double>& out, const std::map<Method, EvalReport>& reports,
                    const std::string& suffix, bool oos) {
  for (const auto& [m, r] : reports) {
    const std::string name = suffix.empty() ? to_string(m) : suffix;
    out["r2_in_" + name] = r.r2_in;
    if (oos) {
      out["r2_oos_" + name] = r.r2_oos;
      out["failures_" + name] = r.failures;
    }
  }
}

}  // namespace

std::map<std::string, double> replication_metrics(const SimConfig& c, const SimDraw& draw,
                                                  const ReplicationSpec& spec) {
  std::map<std::string, double> out;
  const DataPanel centered = center_panel(draw.panel);
  const Eigen::Index t = draw.panel.num_periods();
  const Vector& y = draw.panel.target;

  PipelineConfig cfg;
  cfg.num_factors = c.K;
  cfg.num_slices = spec.num_slices;
  cfg.bandwidth_multiplier = spec.bandwidth_multiplier;
  cfg.refit_every = spec.refit_every;
  cfg.train_fraction = spec.train_fraction;
  cfg.alpha = spec.alpha;
  const EvaluationOptions opts{spec.out_of_sample};

  PipelineData data;
  data.panel = draw.panel;

  auto direction_metrics = [&](int num_indices) {
    const FactorFit fit = estimate_factors(centered, c.K);
    const Matrix g = draw.truth.factors * draw.truth.rotation.transpose();
    const Matrix a = alignment_rotation(fit.factors, g);
    const SliceAssignment slices = assign_slices(y, spec.num_slices);
    const SlicedCovariance cov = sliced_covariance_factors(fit, slices);
    const SdrBasis sdr = sdr_directions(cov, fit, num_indices);
    for (int j = 0; j < num_indices; ++j) {
      out["r2_phi_" + std::to_string(j + 1)] =
          subspace_r2(a * sdr.directions.col(j), draw.truth.central_basis);
    }
    out["r2_phi_pcr"] = subspace_r2(a * pcr_coefficients(fit, y).coefficients,
                                    draw.truth.central_basis);
    return std::make_tuple(fit, cov, sdr);
  };

  switch (c.dgp) {
    case Dgp::Linear41: {
      cfg.num_indices = 1;
      record_reports(out, evaluate_methods(data, cfg, {Method::Sf1, Method::Pcr, Method::Pc1}, opts),
                     "", spec.out_of_sample);
      direction_metrics(1);
      break;
    }
    case Dgp::Interaction42: {
      cfg.num_indices = 2;
      record_reports(out,
                     evaluate_methods(data, cfg, {Method::Sfi, Method::Pcr, Method::Pcri}, opts),
                     "", spec.out_of_sample);
      const auto [fit, cov, sdr] = direction_metrics(2);
      for (int j = 0; j < c.K; ++j) {
        const Vector f = fit.factors.col(j).head(t - 1);
        const Vector yy = y.tail(t - 1);
        const double fc = (f.array() - f.mean()).matrix().norm();
        const double yc = (yy.array() - yy.mean()).matrix().norm();
        const double corr =
            (f.array() - f.mean()).matrix().dot((yy.array() - yy.mean()).matrix()) / (fc * yc);
        out["abs_corr_f" + std::to_string(j + 1)] = std::abs(corr);
      }
      out["sigma_eig3_over_eig2"] = sdr.spectrum(2) / sdr.spectrum(1);
      out["selected_L"] = select_num_indices(cov, t, assign_slices(y, spec.num_slices).num_slices,
                                             spec.alpha).num_indices;
      break;
    }
    case Dgp::Semiparametric43: {
      cfg.num_indices = 2;
      const int j = spec.sieve_basis > 0 ? spec.sieve_basis : default_num_basis(c.p);
      PipelineData projected = data;
      projected.sieve = build_sieve_basis(draw.truth.covariates, j);
      PipelineData known = data;
      known.known_factors = draw.truth.factors;

      record_reports(out, evaluate_methods(data, cfg, {Method::Sfi}, opts), "sf_pca",
                     spec.out_of_sample);
      PipelineConfig pcfg = cfg;
      pcfg.source = FactorSource::Projected;
      record_reports(out, evaluate_methods(projected, pcfg, {Method::Sfi}, opts), "sf_projpca",
                     spec.out_of_sample);
      PipelineConfig kcfg = cfg;
      kcfg.source = FactorSource::Known;
      record_reports(out, evaluate_methods(known, kcfg, {Method::Sfi}, opts), "sf_knownf",
                     spec.out_of_sample);
      break;
    }
    case Dgp::NullIndependent: {
      const FactorFit fit = estimate_factors(centered, c.K);
      const SliceAssignment slices = assign_slices(y, spec.num_slices);
      const SlicedCovariance cov = sliced_covariance_factors(fit, slices);
      out["selected_L"] = select_num_indices(cov, t, slices.num_slices, spec.alpha).num_indices;
      cfg.num_indices = 1;
      record_reports(out, evaluate_methods(data, cfg, {Method::Sf1}, {false}), "", false);
      break;
    }
  }
  return out;
}

SummaryTable run_replications(const SimConfig& config, const ReplicationSpec& spec) {
  validate(config);
  const int reps = config.reps;
  std::vector<std::optional<std::map<std::string, double>>> results(reps);
  std::vector<std::string> errors(reps);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next++; r < reps; r = next++) {
      try {
        const SimDraw draw = generate(config, replication_seed(config.seed, static_cast<std::uint64_t>(r)));
        results[r] = replication_metrics(config, draw, spec);
      } catch (const Error& e) {
        errors[r] = e.what();
      }
    }
  };
  int threads = spec.threads > 0 ? spec.threads
                                 : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, reps);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  SummaryTable table;
  table.dgp = config.dgp;
  table.p = config.p;
  table.T = config.T;
  table.reps = reps;
  for (int r = 0; r < reps; ++r) {
    if (!results[r]) {
      ++table.failures;
      if (table.failures <= 5) {
        table.warnings.push_back("replication " + std::to_string(r) + " failed: " + errors[r]);
      }
      continue;
    }
    for (const auto& [name, value] : *results[r]) table.per_rep[name].push_back(value);
  }
  for (const auto& [name, values] : table.per_rep) {
    table.rows.push_back({name, median(values), sample_sd(values), static_cast<int>(values.size())});
  }
  return table;
}

}  // namespace sufcast
