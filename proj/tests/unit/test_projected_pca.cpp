#include <doctest.h>

#include "helpers.hpp"
#include "sufcast/factors.hpp"
#include "sufcast/sieve.hpp"

using namespace sufcast;

TEST_CASE("linear B-splines on three points are hat functions") {
  Matrix z(3, 1);
  z << 0, 0.5, 1;
  const SieveBasis s = build_sieve_basis(z, 2, 1);
  CHECK(s.design.cols() == 2);
  CHECK(s.design(0, 0) == doctest::Approx(1));
  CHECK(s.design(1, 0) == doctest::Approx(0.5));
  CHECK(s.design(2, 1) == doctest::Approx(1));
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(s.design.row(i).sum() == doctest::Approx(1));
}

TEST_CASE("cubic basis is a partition of unity") {
  const Matrix z = oracle::random_normal(200, 1, 4);
  const SieveBasis s = build_sieve_basis(z, 6);
  CHECK(s.design.cols() == 6);
  for (Eigen::Index i = 0; i < 200; ++i) CHECK(s.design.row(i).sum() == doctest::Approx(1).epsilon(1e-12));
  CHECK(s.design.minCoeff() >= 0.0);
  const Vector outside = bspline_basis(s.knots[0], 3, 100.0);
  CHECK(outside.sum() == doctest::Approx(1));
}

TEST_CASE("two covariates give two contiguous blocks") {
  const Matrix z = oracle::random_normal(80, 2, 5);
  const SieveBasis s = build_sieve_basis(z, 5);
  REQUIRE(s.design.cols() == 10);
  const SieveBasis first = build_sieve_basis(z.leftCols(1), 5);
  const SieveBasis second = build_sieve_basis(z.rightCols(1), 5);
  CHECK(max_abs(s.design.leftCols(5) - first.design) == 0.0);
  CHECK(max_abs(s.design.rightCols(5) - second.design) == 0.0);
  const Matrix g = s.design.transpose() * s.design;
  CHECK(max_abs(g - g.transpose()) < 1e-12 * max_abs(g));
  CHECK(oracle::jacobi(g).values.minCoeff() > -1e-10);
}

TEST_CASE("degenerate covariates and preconditions") {
  CHECK_THROWS_AS(build_sieve_basis(Matrix::Constant(50, 1, 2.0), 4), DataError);
  CHECK_THROWS_AS(build_sieve_basis(oracle::random_normal(8, 1, 1), 8), ConfigError);  // p <= J d
  CHECK_THROWS_AS(build_sieve_basis(oracle::random_normal(50, 1, 1), 3, 3), ConfigError);  // J < degree + 1

  Matrix tied(60, 1);
  for (Eigen::Index i = 0; i < 60; ++i) tied(i, 0) = i < 50 ? 0.0 : double(i);
  const SieveBasis s = build_sieve_basis(tied, 8);
  CHECK(s.basis_per_covariate[0] < 8);
  CHECK_FALSE(s.warnings.empty());
}

TEST_CASE("projection is a symmetric idempotent smoother") {
  const Matrix z = oracle::random_normal(120, 2, 7);
  const SieveBasis s = build_sieve_basis(z, 5);
  const Projector proj(s.design);
  const Matrix p = proj.matrix();
  CHECK(max_abs(p * p - p) < 1e-8);
  CHECK(max_abs(p - p.transpose()) < 1e-10);

  DataPanel x;
  x.predictors = oracle::random_normal(120, 30, 8);
  x.target = Vector::Zero(30);
  const DataPanel once = project_panel(x, s);
  CHECK(max_abs(proj.apply(once.predictors) - once.predictors) < 1e-8);

  // Range is fixed, orthogonal complement is annihilated.
  const Matrix in_range = s.design * oracle::random_normal(10, 30, 9);
  CHECK(max_abs(proj.apply(in_range) - in_range) < 1e-8);
  const Matrix orth = (Matrix::Identity(120, 120) - p) * oracle::random_normal(120, 30, 10);
  CHECK(max_abs(proj.apply(orth)) < 1e-8);
}

TEST_CASE("rank-deficient designs warn") {
  Matrix d = oracle::random_normal(40, 3, 2);
  d.col(2) = d.col(0) + d.col(1);
  const Projector proj(d);
  CHECK(proj.rank() == 2);
  CHECK_FALSE(proj.warnings().empty());
}

TEST_CASE("identity projection reduces to plain PCA") {
  const DataPanel x = center_panel(testing::factor_panel(40, 30, 3, 12));
  DataPanel same = x;
  same.predictors = Projector::identity(40).apply(x.predictors);
  const FactorFit a = estimate_factors(x, 3);
  const FactorFit b = estimate_factors(same, 3);
  CHECK(max_abs(a.factors - b.factors) < 1e-10);
}

TEST_CASE("noiseless semiparametric panel: projected factors span the truth") {
  SimConfig c = make_sim_config(Dgp::Semiparametric43, 200, 60, 2);
  c.idio_scale = 0.0;
  const SimDraw d = generate(c, 5);
  const SieveBasis s = build_sieve_basis(d.truth.covariates, 4);
  const FactorFit fit = projected_factors(center_panel(d.panel), s, 3);
  const Matrix truth = d.truth.factors.rowwise() - d.truth.factors.colwise().mean();
  CHECK(largest_principal_angle(fit.factors, truth) < 1e-6);
  const double t = 60.0;
  CHECK(max_abs(fit.factors.transpose() * fit.factors / t - Matrix::Identity(3, 3)) < 1e-8);
}

TEST_CASE("default basis count") {
  CHECK(default_num_basis(100) == 4);
  CHECK(default_num_basis(100000) == 18);
  CHECK(default_num_basis(10, 1) == 2);
}
