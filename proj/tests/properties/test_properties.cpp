#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "sufcast/simlab.hpp"

using namespace sufcast;

namespace {

SimDraw rep_draw(const SimConfig& c, int rep) { return generate(c, replication_seed(c.seed, rep)); }

}  // namespace

TEST_CASE("factor space converges along the (p, T) grid") {
  std::vector<double> medians;
  for (const auto& [p, t] : {std::pair<int, int>{50, 100}, {100, 500}, {500, 500}}) {
    const SimConfig c = make_sim_config(Dgp::Linear41, p, t, 101);
    std::vector<double> angles;
    for (int r = 0; r < 20; ++r) {
      const SimDraw d = rep_draw(c, r);
      const FactorFit fit = estimate_factors(center_panel(d.panel), c.K);
      const Matrix truth = d.truth.factors * d.truth.rotation.transpose();
      angles.push_back(largest_principal_angle(fit.factors, truth.rowwise() - truth.colwise().mean()));
    }
    medians.push_back(median(angles));
  }
  MESSAGE("median largest principal angle: " << medians[0] << ", " << medians[1] << ", " << medians[2]);
  CHECK(medians[1] < medians[0]);
  CHECK(medians[2] < medians[1]);
}

TEST_CASE("estimated SDR span barely depends on H") {
  const SimConfig c = make_sim_config(Dgp::Linear41, 500, 500, 102);
  std::vector<double> r2;
  for (int r = 0; r < 50; ++r) {
    const SimDraw d = rep_draw(c, r);
    const FactorFit fit = estimate_factors(center_panel(d.panel), c.K);
    const SdrBasis five = sdr_directions(sliced_covariance_factors(fit, assign_slices(d.panel.target, 5)), fit, 1);
    const SdrBasis twenty = sdr_directions(sliced_covariance_factors(fit, assign_slices(d.panel.target, 20)), fit, 1);
    r2.push_back(subspace_r2(five.directions.col(0), twenty.directions));
  }
  MESSAGE("median R^2 between H=5 and H=20 directions: " << median(r2));
  CHECK(median(r2) > 0.95);
}

TEST_CASE("chi-square scan keeps its level under the null") {
  SimConfig c = make_sim_config(Dgp::NullIndependent, 50, 200, 103);
  int zero = 0;
  const int reps = 500;
  for (int r = 0; r < reps; ++r) {
    const SimDraw d = rep_draw(c, r);
    const FactorFit fit = estimate_factors(center_panel(d.panel), c.K);
    const SliceAssignment s = assign_slices(d.panel.target, 10);
    zero += select_num_indices(sliced_covariance_factors(fit, s), 200, s.num_slices, 0.05).num_indices == 0;
  }
  const double rate = double(zero) / reps;
  MESSAGE("share of null replications with L=0: " << rate);
  CHECK(rate > 0.92);
  CHECK(rate < 0.98);
}

TEST_CASE("interaction design has a two-dimensional central subspace") {
  // L-hat = 2 in most replications at p = T = 500 ...
  {
    const SimConfig c = make_sim_config(Dgp::Interaction42, 500, 500, 104);
    int two = 0;
    for (int r = 0; r < 30; ++r) {
      const SimDraw d = rep_draw(c, r);
      const FactorFit fit = estimate_factors(center_panel(d.panel), c.K);
      const SliceAssignment s = assign_slices(d.panel.target, 10);
      two += select_num_indices(sliced_covariance_factors(fit, s), 500, s.num_slices, 0.05).num_indices == 2;
    }
    MESSAGE("replications selecting L=2: " << two << "/30");
    CHECK(two > 15);
  }
  // ... and a clear eigen-gap after the second eigenvalue once T is large.
  {
    const SimConfig c = make_sim_config(Dgp::Interaction42, 500, 1000, 105);
    std::vector<double> ratio;
    for (int r = 0; r < 20; ++r) {
      const SimDraw d = rep_draw(c, r);
      const FactorFit fit = estimate_factors(center_panel(d.panel), c.K);
      const SdrBasis s = sdr_directions(sliced_covariance_factors(fit, assign_slices(d.panel.target, 10)), fit, 2);
      ratio.push_back(s.spectrum(2) / s.spectrum(1));
    }
    MESSAGE("median third/second eigenvalue at p=500, T=1000: " << median(ratio));
    CHECK(median(ratio) < 0.25);
  }
}

TEST_CASE("PCR direction lies in the central subspace") {
  const SimConfig c = make_sim_config(Dgp::Interaction42, 500, 500, 106);
  std::vector<double> r2;
  for (int r = 0; r < 50; ++r) {
    const SimDraw d = rep_draw(c, r);
    const FactorFit fit = estimate_factors(center_panel(d.panel), c.K);
    const Matrix a = alignment_rotation(fit.factors, d.truth.factors * d.truth.rotation.transpose());
    r2.push_back(subspace_r2(a * pcr_coefficients(fit, d.panel.target).coefficients, d.truth.central_basis));
  }
  MESSAGE("median R^2 of the PCR direction: " << median(r2));
  CHECK(median(r2) >= 0.9);
}

TEST_CASE("SF(1) tracks PCR under the linear design") {
  SimConfig c = make_sim_config(Dgp::Linear41, 100, 500, 107, 200);
  ReplicationSpec spec;
  spec.out_of_sample = false;
  const SummaryTable t = run_replications(c, spec);
  const double diff = std::abs(t.at("r2_in_sf1").median - t.at("r2_in_pcr").median);
  MESSAGE("in-sample SF(1) " << t.at("r2_in_sf1").median << " vs PCR " << t.at("r2_in_pcr").median);
  CHECK(diff <= 0.03);
}

TEST_CASE("null design gives a small sliced covariance") {
  const SimConfig c = make_sim_config(Dgp::NullIndependent, 50, 2000, 108);
  const SimDraw d = rep_draw(c, 0);
  const FactorFit fit = estimate_factors(center_panel(d.panel), c.K);
  const SlicedCovariance s = sliced_covariance_factors(fit, assign_slices(d.panel.target, 10));
  // Each slice mean of unit-variance factors has variance about H / T.
  CHECK(oracle::jacobi(s.matrix).values(0) < 0.05);
}

TEST_CASE("projected PCA helps when loadings are smooth in a covariate") {
  for (int p : {100, 500}) {
    const SimConfig c = make_sim_config(Dgp::Semiparametric43, p, 100, 109, 100);
    ReplicationSpec spec;
    spec.threads = 1;
    const SummaryTable t = run_replications(c, spec);
    const double pca = t.at("r2_oos_sf_pca").median;
    const double proj = t.at("r2_oos_sf_projpca").median;
    MESSAGE("p=" << p << ": SF " << pca << ", SF-projPCA " << proj << ", SF-knownF "
                 << t.at("r2_oos_sf_knownf").median);
    CHECK(proj >= pca);
  }
}
