#include <doctest.h>

#include "helpers.hpp"
#include "sufcast/factors.hpp"
#include "sufcast/incremental.hpp"
#include "sufcast/linalg.hpp"
#include "sufcast/panel.hpp"

using namespace sufcast;

namespace {

void check_fit_invariants(const DataPanel& x, const FactorFit& fit) {
  const double t = static_cast<double>(x.num_periods());
  const int k = fit.num_factors;
  CHECK(max_abs(fit.factors.transpose() * fit.factors / t - Matrix::Identity(k, k)) < 1e-8);
  const Matrix bb = fit.loadings.transpose() * fit.loadings;
  const double scale = bb.diagonal().maxCoeff();
  Matrix off = bb;
  off.diagonal().setZero();
  CHECK(max_abs(off) < 1e-8 * scale);
  CHECK(max_abs(fit.loadings - x.predictors * fit.factors / t) < 1e-10 * std::max(1.0, max_abs(fit.loadings)));
  for (Eigen::Index j = 0; j + 1 < fit.eigenvalues.size(); ++j) CHECK(fit.eigenvalues(j) >= fit.eigenvalues(j + 1));
  CHECK(fit.eigenvalues.minCoeff() >= -1e-10);
}

}  // namespace

TEST_CASE("center_panel removes row means and keeps the target") {
  DataPanel p;
  p.predictors.resize(2, 3);
  p.predictors << 1, 2, 3, 5, 5, 5;
  p.target = Vector::LinSpaced(3, 1, 3);
  const DataPanel c = center_panel(p);
  CHECK(c.centered);
  CHECK(c.predictors(0, 0) == doctest::Approx(-1));
  CHECK(c.predictors(0, 1) == doctest::Approx(0).epsilon(1e-15));
  CHECK(c.predictors(0, 2) == doctest::Approx(1));
  CHECK(c.predictors.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.target == p.target);
}

TEST_CASE("center_panel is idempotent bit for bit") {
  DataPanel p;
  p.predictors.resize(1, 3);
  p.predictors << -1, 0, 1;
  p.target = Vector::Zero(3);
  const DataPanel c = center_panel(p);
  CHECK(c.predictors == p.predictors);
  CHECK(c.centered);
  CHECK(center_panel(c).predictors == c.predictors);
}

TEST_CASE("center_panel rejects non-finite data and tiny panels") {
  DataPanel p;
  p.predictors = Matrix::Ones(2, 4);
  p.target = Vector::Zero(4);
  p.predictors(1, 2) = std::nan("");
  CHECK_THROWS_AS(center_panel(p), DataError);
  p.predictors = Matrix::Ones(2, 1);
  p.target = Vector::Zero(1);
  CHECK_THROWS_AS(center_panel(p), DataError);
}

TEST_CASE("rank-one noiseless panel is recovered exactly") {
  DataPanel p;
  Vector f(4);
  f << 1, 1, -1, -1;
  Vector b(2);
  b << 1, 2;
  p.predictors = b * f.transpose();
  p.target = Vector::Zero(4);
  const FactorFit fit = estimate_factors(p, 1);
  CHECK(oracle::signed_diff(fit.factors, f) < 1e-12);
  CHECK(oracle::signed_diff(fit.loadings, b) < 1e-12);
  CHECK(fit.eigenvalues(0) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(fit.loadings(1, 0) > 0);  // sign rule: largest loading positive

  const Matrix lambda = loading_pseudoinverse(fit);
  CHECK(max_abs(lambda - b.transpose() / b.squaredNorm()) < 1e-12);
  CHECK(max_abs(lambda * p.predictors - fit.factors.transpose()) < 1e-12);
}

TEST_CASE("factors match a power-iteration oracle on X'X") {
  const DataPanel x = center_panel(testing::factor_panel(5, 20, 2, 11));
  const FactorFit fit = estimate_factors(x, 2);
  const oracle::Eigenpairs e = oracle::power_iteration(x.predictors.transpose() * x.predictors, 2);
  CHECK(oracle::signed_diff(fit.factors, std::sqrt(20.0) * e.vectors) < 1e-6);
  CHECK(max_abs(fit.eigenvalues - e.values / 20.0) < 1e-8);
  check_fit_invariants(x, fit);
}

TEST_CASE("both Gram orientations give the same fit") {
  for (const auto& [p, t] : {std::pair<int, int>{40, 15}, {15, 40}}) {
    const DataPanel x = center_panel(testing::factor_panel(p, t, 3, 5));
    const FactorFit fit = estimate_factors(x, 3);
    check_fit_invariants(x, fit);
    const oracle::Eigenpairs e = oracle::jacobi(x.predictors.transpose() * x.predictors);
    CHECK(oracle::signed_diff(fit.factors, std::sqrt(double(t)) * e.vectors.leftCols(3)) < 1e-8);
  }
}

TEST_CASE("full-rank square panel is reconstructed") {
  DataPanel p;
  p.predictors = oracle::random_normal(6, 6, 3);
  p.target = Vector::Zero(6);
  const FactorFit fit = estimate_factors(p, 6);
  CHECK(max_abs(fit.loadings * fit.factors.transpose() - p.predictors) < 1e-8);
}

TEST_CASE("K beyond the rank names the rank") {
  DataPanel p;
  p.predictors = oracle::random_normal(6, 2, 1) * oracle::random_normal(2, 10, 2);
  p.target = Vector::Zero(10);
  try {
    estimate_factors(p, 3);
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("rank 2") != std::string::npos);
  }
  CHECK_THROWS_AS(estimate_factors(p, 0), ConfigError);
}

TEST_CASE("loading pseudo-inverse identities") {
  const DataPanel x = center_panel(testing::factor_panel(5, 20, 3, 21));
  const FactorFit fit = estimate_factors(x, 3);
  const Matrix lambda = loading_pseudoinverse(fit);
  CHECK(max_abs(lambda * fit.loadings - Matrix::Identity(3, 3)) < 1e-8);
  for (Eigen::Index t = 0; t < 20; ++t) {
    CHECK((lambda * x.predictors.col(t) - fit.factors.row(t).transpose()).cwiseAbs().maxCoeff() < 1e-8);
  }
  FactorFit bad = fit;
  bad.loadings.col(1).setZero();
  CHECK_THROWS_AS(loading_pseudoinverse(bad), NumericalError);
}

TEST_CASE("fits are deterministic") {
  const DataPanel x = center_panel(testing::factor_panel(30, 25, 3, 9));
  const FactorFit a = estimate_factors(x, 3);
  const FactorFit b = estimate_factors(x, 3);
  CHECK(a.factors == b.factors);
  CHECK(a.loadings == b.loadings);
}

TEST_CASE("eigenvalue ratio rule") {
  Vector eig(5);
  eig << 100, 50, 1, 0.5, 0.4;
  const FactorCountSelection s = select_num_factors_from_eigenvalues(eig, 4);
  CHECK(s.num_factors == 2);
  CHECK(s.ratios(0) == doctest::Approx(2));
  CHECK(s.ratios(1) == doctest::Approx(50));
  CHECK(s.ratios(2) == doctest::Approx(2));
  CHECK(s.ratios(3) == doctest::Approx(1.25));

  CHECK(select_num_factors_from_eigenvalues(Vector::Constant(5, 3.0), 4).num_factors == 1);

  Vector deficient(4);
  deficient << 10, 1, 0, 0;
  const FactorCountSelection d = select_num_factors_from_eigenvalues(deficient, 3);
  CHECK(d.num_factors == 2);
  CHECK_FALSE(d.warnings.empty());
}

TEST_CASE("noiseless three-factor panel selects K = 3") {
  SimConfig c = make_sim_config(Dgp::Semiparametric43, 60, 80, 4);
  c.idio_scale = 0.0;
  const SimDraw d = generate(c, 17);
  const DataPanel x = center_panel(d.panel);
  CHECK(select_num_factors(x, default_kmax(60, 80)).num_factors == 3);

  SimConfig lin = make_sim_config(Dgp::Linear41, 100, 100, 4);
  lin.idio_scale = 0.0;
  const DataPanel y = center_panel(generate(lin, 3).panel);
  CHECK(select_num_factors(y, 10).num_factors == 5);
}

TEST_CASE("default kmax") {
  CHECK(default_kmax(500, 500) == 20);
  CHECK(default_kmax(10, 200) == 5);
  CHECK(default_kmax(2, 3) == 1);
}

TEST_CASE("recursive extractor matches direct fits window by window") {
  for (const auto& [p, t] : {std::pair<int, int>{60, 80}, {300, 90}}) {
    const DataPanel raw = testing::factor_panel(p, t, 4, 31, 0.5);
    RecursiveFactorExtractor ex(raw.predictors, 4);
    for (Eigen::Index n = 40; n <= t; n += 7) {
      const FactorFit inc = ex.fit_window(n);
      const FactorFit direct = estimate_factors(center_panel(leading_window(raw, n)), 4);
      CHECK(max_abs(inc.factors - direct.factors) < 1e-7);
      CHECK(max_abs(inc.loadings - direct.loadings) < 1e-7);
      CHECK(max_abs(inc.eigenvalues - direct.eigenvalues) < 1e-8 * direct.eigenvalues(0));
      CHECK((ex.window_means() - raw.predictors.leftCols(n).rowwise().mean()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("linear algebra helpers") {
  const Matrix a = oracle::random_normal(5, 5, 2);
  const Matrix s = a * a.transpose();
  const SymmetricEigen e = sym_eigen_desc(s);
  const oracle::Eigenpairs j = oracle::jacobi(s);
  CHECK(max_abs(e.values - j.values) < 1e-8);
  CHECK(oracle::signed_diff(e.vectors, j.vectors) < 1e-8);

  CHECK(max_abs(inverse_sqrt_spd(s) * s * inverse_sqrt_spd(s) - Matrix::Identity(5, 5)) < 1e-8);
  CHECK(max_abs(sqrt_psd(s) * sqrt_psd(s) - s) < 1e-8);

  const Matrix q = orthonormal_basis(a.leftCols(2));
  CHECK(max_abs(q.transpose() * q - Matrix::Identity(2, 2)) < 1e-12);
  CHECK(largest_principal_angle(q, a.leftCols(2)) < 1e-7);

  const Matrix rot = procrustes_rotation(a, a * orthonormal_basis(oracle::random_normal(5, 5, 8)));
  CHECK(max_abs(rot.transpose() * rot - Matrix::Identity(5, 5)) < 1e-10);
}
