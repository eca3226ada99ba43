#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>

#include "sufcast/report.hpp"
#include "sufcast/simlab.hpp"

namespace sufcast {

enum class Subcommand { Simulate, Forecast, Factors };

std::string to_string(Subcommand s);

/// Everything one CLI invocation needs. Unset optionals mean "auto".
struct RunConfig {
  Subcommand subcommand = Subcommand::Forecast;
  std::optional<int> num_factors;
  int kmax = 0;
  int num_slices = 10;
  std::optional<int> num_indices;
  Method method = Method::Sf1;
  double bandwidth_multiplier = 1.0;
  double train_fraction = 0.5;
  double alpha = 0.05;
  int refit_every = 1;
  std::uint64_t seed = 0;
  int reps = 1;
  std::string input;
  std::string target = "y";
  std::optional<std::string> covariates;
  int sieve_basis = 0;
  std::string output;

  // simulate only
  Dgp dgp = Dgp::Linear41;
  Eigen::Index p = 100;
  Eigen::Index T = 200;
  std::optional<std::string> panel_out;
  bool out_of_sample = true;
  int threads = 0;
};

/// Throws ConfigError on out-of-range values or inconsistent choices.
void validate(const RunConfig& config);

Json config_to_json(const RunConfig& config);

/// Each run_* writes the report to config.output (plus CSV tables next to
/// it) and returns the report.
Json run_forecast(const RunConfig& config);
Json run_simulate(const RunConfig& config);
Json run_factors(const RunConfig& config);
Json run(const RunConfig& config);

/// 2 config, 3 data, 4 numerical, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace sufcast
