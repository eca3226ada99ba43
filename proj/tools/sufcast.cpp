#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sufcast/app.hpp"

namespace {

using sufcast::ConfigError;

std::optional<int> parse_count(const std::string& text, const char* flag) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(flag) + " expects a positive integer or 'auto', got '" + text + "'");
}

void add_model_flags(CLI::App* cmd, sufcast::RunConfig& cfg, std::string& factors,
                     std::string& indices, std::string& method) {
  cmd->add_option("--factors", factors, "number of factors K or 'auto'")->capture_default_str();
  cmd->add_option("--kmax", cfg.kmax, "upper bound for automatic K (0 = default)");
  cmd->add_option("--slices", cfg.num_slices, "number of slices H")->capture_default_str();
  cmd->add_option("--indices", indices, "number of predictive indices L or 'auto'")->capture_default_str();
  cmd->add_option("--method", method, "pcr, pc1, sf1, sf2 or sfi")->capture_default_str();
  cmd->add_option("--bandwidth-mult", cfg.bandwidth_multiplier, "multiplier on the rule-of-thumb bandwidth")
      ->capture_default_str();
  cmd->add_option("--train-frac", cfg.train_fraction, "fraction of periods in the first training window")
      ->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "level of the chi-square index test")->capture_default_str();
  cmd->add_option("--refit-every", cfg.refit_every, "re-estimate the model every n steps")->capture_default_str();
  cmd->add_option("--covariates", cfg.covariates, "CSV of loading covariates (enables projected PCA)");
  cmd->add_option("--sieve-basis", cfg.sieve_basis, "B-spline functions per covariate (0 = default)");
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  cmd->add_option("--reps", cfg.reps, "number of replications")->capture_default_str();
  cmd->add_option("--out", cfg.output, "report path (JSON); CSV tables are written next to it")->required();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sufficient forecasting with factor models"};
  app.require_subcommand(1);

  sufcast::RunConfig cfg;
  std::string factors = "auto";
  std::string indices = "auto";
  std::string method = "sf1";
  std::string dgp = "linear";
  bool in_sample_only = false;

  CLI::App* simulate = app.add_subcommand("simulate", "run Monte Carlo replications of a simulation design");
  add_model_flags(simulate, cfg, factors, indices, method);
  simulate->add_option("--dgp", dgp, "linear, interaction, semiparametric or null")->capture_default_str();
  simulate->add_option("--p", cfg.p, "number of predictors")->capture_default_str();
  simulate->add_option("--T", cfg.T, "number of periods")->capture_default_str();
  simulate->add_option("--panel-out", cfg.panel_out, "write the first replication's panel as CSV");
  simulate->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");
  simulate->add_flag("--in-sample-only", in_sample_only, "skip the recursive out-of-sample evaluation");

  CLI::App* forecast = app.add_subcommand("forecast", "estimate and evaluate a forecasting method on a CSV panel");
  add_model_flags(forecast, cfg, factors, indices, method);
  forecast->add_option("input", cfg.input, "panel CSV")->required();
  forecast->add_option("--target", cfg.target, "name of the target column")->capture_default_str();

  CLI::App* fac = app.add_subcommand("factors", "extract factors from a CSV panel");
  add_model_flags(fac, cfg, factors, indices, method);
  fac->add_option("input", cfg.input, "panel CSV")->required();
  fac->add_option("--target", cfg.target, "name of the target column")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) cfg.subcommand = sufcast::Subcommand::Simulate;
    else if (forecast->parsed()) cfg.subcommand = sufcast::Subcommand::Forecast;
    else cfg.subcommand = sufcast::Subcommand::Factors;
    cfg.num_factors = parse_count(factors, "--factors");
    cfg.num_indices = parse_count(indices, "--indices");
    cfg.method = sufcast::parse_method(method);
    cfg.dgp = sufcast::parse_dgp(dgp);
    cfg.out_of_sample = !in_sample_only;

    const sufcast::Json report = sufcast::run(cfg);
    for (const auto& w : report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
    std::cout << "wrote " << cfg.output << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sufcast::exit_code_for(e);
  }
}
