#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sufcast/pipeline.hpp"

namespace sufcast {

enum class Dgp { Linear41, Interaction42, Semiparametric43, NullIndependent };

std::string to_string(Dgp dgp);
Dgp parse_dgp(const std::string& name);

/// Simulation design. `ar_factor` and `ar_idio` are drawn once from the
/// master seed and stay fixed across replications.
struct SimConfig {
  Dgp dgp = Dgp::Linear41;
  Eigen::Index p = 100;
  Eigen::Index T = 100;
  int K = 5;
  Vector ar_factor;   // K AR(1) coefficients of the factors
  Vector ar_idio;     // p AR(1) coefficients of the idiosyncratic terms
  double sigma_y = 1.0;
  Vector phi;         // linear target direction (Linear41 only)
  double idio_scale = 1.0;   // 0 gives a noiseless panel
  double target_noise = 1.0; // sd of the target innovation in the interaction designs
  double gamma_scale = 0.0;  // loading noise on top of g(z) (Semiparametric43)
  std::uint64_t seed = 0;
  int reps = 1;
};

/// Throws ConfigError on non-stationary coefficients or negative noise scales.
void validate(const SimConfig& config);

/// Standard design for a DGP: K, phi, sigma_y and AR coefficients drawn
/// from U[0.2, 0.8] with a generator seeded by `seed`.
SimConfig make_sim_config(Dgp dgp, Eigen::Index p, Eigen::Index T, std::uint64_t seed, int reps = 1);

/// Var(phi' f_t) for independent stationary AR(1) factors with unit innovations.
double linear_signal_variance(const Vector& phi, const Vector& ar_factor);

struct TrueModel {
  Matrix loadings;       // p x K
  Matrix factors;        // T x K, f_1..f_T
  Matrix rotation;       // K x K, H
  Matrix directions;     // K x L, orthonormal true directions in the original coordinates
  Matrix central_basis;  // K x L, orthonormal basis of span{(H')^{-1} phi_j}
  Matrix covariates;     // p x 1 (Semiparametric43), else empty
};

struct SimDraw {
  DataPanel panel;
  TrueModel truth;
};

/// Seed of replication `rep` derived from the master seed.
std::uint64_t replication_seed(std::uint64_t master, std::uint64_t rep);

/// Linear target y_{t+1} = phi' f_t + sigma_y eps_{t+1}, K = 5.
SimDraw gen_linear_41(const SimConfig& config, std::uint64_t stream_seed);
/// y_{t+1} = f_1t (f_2t + f_3t + 1) + eps_{t+1}, K = 7.
SimDraw gen_interaction_42(const SimConfig& config, std::uint64_t stream_seed);
/// Loadings g(z) = (z, z^2 - 1, z^3 - 2z) of one observed covariate, K = 3,
/// interaction target.
SimDraw gen_semiparametric_43(const SimConfig& config, std::uint64_t stream_seed);
/// Linear41 panel with a target independent of everything.
SimDraw gen_null(const SimConfig& config, std::uint64_t stream_seed);
/// Dispatch on config.dgp.
SimDraw generate(const SimConfig& config, std::uint64_t stream_seed);

/// Loadings (g1, g2, g3) at covariate value z.
Eigen::Vector3d semiparametric_loading(double z);

/// Invertible H with (1/T) (F H')'(F H') = I and (H^{-1})' B'B H^{-1} diagonal,
/// rows ordered by decreasing loading energy and signed like factor_core.
Matrix canonical_rotation(const Matrix& true_factors, const Matrix& true_loadings);

/// Squared multiple correlation of `estimate` with the span of an orthonormal basis.
double subspace_r2(const Vector& estimate, const Matrix& basis);

/// Orthogonal A minimising ||estimated - truth_rotated A||_F. A direction psi in
/// estimated-factor coordinates corresponds to A psi in rotated-truth coordinates.
Matrix alignment_rotation(const Matrix& estimated_factors, const Matrix& rotated_true_factors);

/// Sliced covariance of the true factors from a long simulated path of the
/// DGP (no panel), in original factor coordinates.
Matrix large_sample_sliced_covariance(const SimConfig& config, int num_slices,
                                      Eigen::Index draws, std::uint64_t seed);

/// What to compute in each replication.
struct ReplicationSpec {
  bool out_of_sample = true;
  int num_slices = 10;
  double bandwidth_multiplier = 1.0;
  int refit_every = 1;
  double train_fraction = 0.5;
  double alpha = 0.05;
  int sieve_basis = 0;  // 0 uses default_num_basis
  int threads = 0;      // 0 uses the hardware concurrency
};

struct MetricSummary {
  std::string name;
  double median = 0.0;
  double sd = 0.0;
  int count = 0;
};

struct SummaryTable {
  Dgp dgp = Dgp::Linear41;
  Eigen::Index p = 0;
  Eigen::Index T = 0;
  int reps = 0;
  int failures = 0;
  std::vector<MetricSummary> rows;
  std::map<std::string, std::vector<double>> per_rep;  // values of successful reps
  Warnings warnings;

  const MetricSummary& at(const std::string& name) const;
};

/// Metrics of one replication, keyed by column name (r2_in_sf1, r2_oos_pcr,
/// r2_phi_1, abs_corr_f3, ...).
std::map<std::string, double> replication_metrics(const SimConfig& config, const SimDraw& draw,
                                                  const ReplicationSpec& spec);

/// Runs config.reps replications (in parallel when threads allow) and
/// aggregates every metric into median and standard deviation.
SummaryTable run_replications(const SimConfig& config, const ReplicationSpec& spec);

double median(std::vector<double> values);
double sample_sd(const std::vector<double>& values);

}  // namespace sufcast
