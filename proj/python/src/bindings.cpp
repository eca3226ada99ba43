#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sufcast/factors.hpp"
#include "sufcast/pipeline.hpp"
#include "sufcast/simlab.hpp"
#include "sufcast/sir.hpp"

namespace py = pybind11;
using namespace sufcast;

namespace {

// Python callers pass panels with periods in rows (T x p).
DataPanel make_panel(const Matrix& x, const Vector& y) {
  DataPanel panel;
  panel.predictors = x.transpose();
  panel.target = y;
  validate_panel(panel);
  return panel;
}

DataPanel make_panel(const Matrix& x) { return make_panel(x, Vector::Zero(x.rows())); }

py::dict fit_to_dict(const FactorFit& fit) {
  py::dict d;
  d["factors"] = fit.factors;
  d["loadings"] = fit.loadings;
  d["eigenvalues"] = fit.eigenvalues;
  d["warnings"] = fit.warnings;
  return d;
}

py::dict estimate(const Matrix& x, int k, const std::optional<Matrix>& covariates, int num_basis) {
  const DataPanel panel = center_panel(make_panel(x));
  if (!covariates) return fit_to_dict(estimate_factors(panel, k));
  const SieveBasis sieve = build_sieve_basis(*covariates, num_basis > 0 ? num_basis : default_num_basis(panel.num_series()));
  py::dict d = fit_to_dict(projected_factors(panel, sieve, k));
  d["warnings"] = sieve.warnings;
  return d;
}

py::dict choose_factors(const Matrix& x, int kmax) {
  const DataPanel panel = center_panel(make_panel(x));
  const FactorCountSelection s = select_num_factors(panel, kmax > 0 ? kmax : default_kmax(panel.num_series(), panel.num_periods()));
  py::dict d;
  d["num_factors"] = s.num_factors;
  d["ratios"] = s.ratios;
  d["warnings"] = s.warnings;
  return d;
}

py::dict directions(const Matrix& x, const Vector& y, int k, int num_slices, int num_indices, double alpha) {
  const DataPanel panel = center_panel(make_panel(x, y));
  const FactorFit fit = estimate_factors(panel, k);
  const SliceAssignment slices = assign_slices(panel.target, num_slices);
  const SlicedCovariance cov = sliced_covariance_factors(fit, slices);
  py::dict d;
  int l = num_indices;
  if (l <= 0) {
    const IndexCountSelection sel = select_num_indices(cov, panel.num_periods(), slices.num_slices, alpha);
    l = std::max(1, sel.num_indices);
    d["selected_num_indices"] = sel.num_indices;
  }
  const SdrBasis sdr = sdr_directions(cov, fit, l);
  d["sliced_covariance"] = cov.matrix;
  d["psi"] = sdr.directions;
  d["xi"] = sdr.predictor_directions;
  d["spectrum"] = sdr.spectrum;
  d["indices"] = predictive_indices(sdr, fit);
  d["num_slices"] = slices.num_slices;
  Warnings w = slices.warnings;
  w.insert(w.end(), sdr.warnings.begin(), sdr.warnings.end());
  d["warnings"] = w;
  return d;
}

py::dict forecast(const Matrix& x, const Vector& y, const std::string& method, int k, int num_slices,
                  int num_indices, double bandwidth_multiplier, double train_fraction, bool out_of_sample) {
  PipelineConfig cfg;
  cfg.method = parse_method(method);
  cfg.num_factors = k;
  cfg.num_slices = num_slices;
  cfg.num_indices = num_indices;
  cfg.bandwidth_multiplier = bandwidth_multiplier;
  cfg.train_fraction = train_fraction;
  PipelineData data;
  data.panel = make_panel(x, y);
  EvaluationOptions opts;
  opts.out_of_sample = out_of_sample;
  const EvalReport r = evaluate_methods(data, cfg, {cfg.method}, opts).at(cfg.method);
  py::dict d;
  d["method"] = method;
  d["r2_in"] = r.r2_in;
  d["r2_oos"] = out_of_sample ? py::cast(r.r2_oos) : py::none();
  d["forecasts"] = r.forecasts;
  d["actual"] = r.actual;
  d["split_index"] = r.split_index;
  d["failures"] = r.failures;
  d["warnings"] = r.warnings;
  return d;
}

py::dict simulate(const std::string& dgp, Eigen::Index p, Eigen::Index t, std::uint64_t seed, std::uint64_t rep) {
  const SimConfig c = make_sim_config(parse_dgp(dgp), p, t, seed);
  const SimDraw draw = generate(c, replication_seed(seed, rep));
  py::dict d;
  d["x"] = Matrix(draw.panel.predictors.transpose());
  d["y"] = draw.panel.target;
  d["factors"] = draw.truth.factors;
  d["loadings"] = draw.truth.loadings;
  d["rotation"] = draw.truth.rotation;
  d["central_basis"] = draw.truth.central_basis;
  if (draw.truth.covariates.size() > 0) d["covariates"] = draw.truth.covariates;
  return d;
}

py::dict replicate(const std::string& dgp, Eigen::Index p, Eigen::Index t, std::uint64_t seed, int reps,
                   bool out_of_sample, int threads) {
  const SimConfig c = make_sim_config(parse_dgp(dgp), p, t, seed, reps);
  ReplicationSpec spec;
  spec.out_of_sample = out_of_sample;
  spec.threads = threads;
  SummaryTable table;
  {
    py::gil_scoped_release release;
    table = run_replications(c, spec);
  }
  py::dict d;
  for (const MetricSummary& m : table.rows) {
    py::dict row;
    row["median"] = m.median;
    row["sd"] = m.sd;
    row["count"] = m.count;
    d[py::str(m.name)] = row;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_sufcast, m) {
  m.doc() = "Factor-based sufficient forecasting.";

  auto base = py::register_exception<Error>(m, "SufcastError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  m.def("estimate_factors", &estimate, py::arg("x"), py::arg("num_factors"), py::arg("covariates") = py::none(),
        py::arg("num_basis") = 0,
        "Principal component factors of a T x p panel. With covariates (p x d) the panel is first "
        "projected onto a B-spline sieve.");
  m.def("select_num_factors", &choose_factors, py::arg("x"), py::arg("kmax") = 0,
        "Eigenvalue-ratio choice of the number of factors.");
  m.def("sdr_directions", &directions, py::arg("x"), py::arg("y"), py::arg("num_factors"),
        py::arg("num_slices") = 10, py::arg("num_indices") = 0, py::arg("alpha") = 0.05,
        "Sliced covariance, SDR directions and predictive indices. num_indices=0 runs the chi-square scan.");
  m.def("forecast", &forecast, py::arg("x"), py::arg("y"), py::arg("method") = "sf1", py::arg("num_factors") = 0,
        py::arg("num_slices") = 10, py::arg("num_indices") = 0, py::arg("bandwidth_multiplier") = 1.0,
        py::arg("train_fraction") = 0.5, py::arg("out_of_sample") = true,
        "In-sample and recursive out-of-sample evaluation of one method.");
  m.def("simulate", &simulate, py::arg("dgp"), py::arg("p"), py::arg("T"), py::arg("seed") = 0, py::arg("rep") = 0,
        "One draw of a simulation design: linear, interaction, semiparametric or null.");
  m.def("run_replications", &replicate, py::arg("dgp"), py::arg("p"), py::arg("T"), py::arg("seed") = 0,
        py::arg("reps") = 10, py::arg("out_of_sample") = true, py::arg("threads") = 0,
        "Monte Carlo summary: metric name -> median, sd and count.");
}
