#include <cmath>
#include <vector>

#include <doctest.h>

#include "saa/linalg.hpp"
#include "saa/rng.hpp"
#include "saa/stats.hpp"

using namespace saa;

TEST_CASE("linear solve with partial pivoting") {
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  a(1, 1) = 3.0;
  const auto x = linalg::solve(a, {5.0, 10.0});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(3.0));

  Matrix singular(2, 2);
  singular(0, 0) = 1.0;
  singular(0, 1) = 2.0;
  singular(1, 0) = 2.0;
  singular(1, 1) = 4.0;
  CHECK_THROWS_AS(linalg::solve(singular, {1.0, 2.0}), SingularDesign);
}

TEST_CASE("ols recovers exact linear relationships") {
  // y = 3 + 2 x1 - x2
  Matrix x(6, 2);
  std::vector<double> y(6);
  Rng rng(5);
  for (std::size_t i = 0; i < 6; ++i) {
    x(i, 0) = rng.normal();
    x(i, 1) = rng.normal();
    y[i] = 3.0 + 2.0 * x(i, 0) - x(i, 1);
  }
  const auto beta = linalg::ols(x, y);
  CHECK(beta[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(beta[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(beta[2] == doctest::Approx(-1.0).epsilon(1e-10));

  // constant column collinear with the intercept
  Matrix bad(6, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    bad(i, 0) = 1.5;
    bad(i, 1) = static_cast<double>(i);
  }
  CHECK_THROWS_AS(linalg::ols(bad, y), SingularDesign);
}

TEST_CASE("symmetric eigendecomposition reconstructs the input") {
  Rng rng(6);
  for (int rep = 0; rep < 5; ++rep) {
    const std::size_t n = 2 + rng.below(4);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        a(i, j) = rng.normal();
        a(j, i) = a(i, j);
      }
    }
    const linalg::SymEig eig = linalg::sym_eigen(a);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          s += eig.vectors(i, k) * eig.values[k] * eig.vectors(j, k);
        }
        CHECK(s == doctest::Approx(a(i, j)).epsilon(1e-9));
      }
    }
    for (std::size_t k = 1; k < n; ++k) CHECK(eig.values[k - 1] <= eig.values[k]);
  }
}

TEST_CASE("psd cholesky handles identity, semidefinite, and indefinite input") {
  Matrix eye(2, 2);
  eye(0, 0) = eye(1, 1) = 1.0;
  const Matrix l = linalg::cholesky_psd(eye);
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(1.0));
  CHECK(l(1, 0) == doctest::Approx(0.0));

  Matrix zero(2, 2, 0.0);
  const Matrix lz = linalg::cholesky_psd(zero);
  for (double v : lz.data()) CHECK(v == 0.0);

  Matrix indefinite(2, 2);
  indefinite(0, 0) = 1.0;
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(linalg::cholesky_psd(indefinite), DegenerateInput);
}

TEST_CASE("eigenvalue clipping repairs non-psd predictions") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = a(1, 0) = 0.0;
  a(1, 1) = -0.01;
  bool repaired = false;
  const Matrix fixed = linalg::clip_to_psd(a, &repaired);
  CHECK(repaired);
  CHECK(fixed(1, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fixed(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("summary statistics match hand computations") {
  const std::vector<double> pair = {-1.0, 1.0};
  const stats::SummaryStats s = stats::summarize(pair);
  CHECK(s.mean == doctest::Approx(0.0));
  CHECK(s.stddev == doctest::Approx(1.0));
  CHECK(s.skewness == doctest::Approx(0.0));
  CHECK(s.kurtosis == doctest::Approx(1.0));

  const std::vector<double> flat = {0.02, 0.02};
  const stats::SummaryStats f = stats::summarize(flat);
  CHECK(f.mean == doctest::Approx(0.02));
  CHECK(f.stddev == doctest::Approx(0.0));
  CHECK_FALSE(f.has_shape);
}

TEST_CASE("gaussian sample kurtosis approaches three") {
  Rng rng(7);
  std::vector<double> draws(100000);
  for (double& v : draws) v = rng.normal();
  const stats::SummaryStats s = stats::summarize(draws);
  CHECK(std::fabs(s.kurtosis - 3.0) < 0.1);
  CHECK(std::fabs(s.mean) < 0.02);
}

TEST_CASE("student t two-sided p against frozen references") {
  // scipy.stats.t.sf checked values
  CHECK(stats::student_t_p_two_sided(0.6621221919717306, 4) ==
        doctest::Approx(0.5440932944606414).epsilon(1e-10));
  CHECK(stats::student_t_p_two_sided(0.652, 4) ==
        doctest::Approx(0.5499688926432967).epsilon(1e-10));
  CHECK(stats::student_t_p_two_sided(2.086, 20) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(stats::student_t_p_two_sided(0.0, 10) == doctest::Approx(1.0));
}

TEST_CASE("paired t test behavior") {
  const std::vector<double> a = {0.1, 0.2, 0.3, 0.4};

  SUBCASE("identical series") {
    const auto r = stats::mean_difference_test(a, a);
    CHECK(r.t_stat == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(r.stars.empty());
  }

  SUBCASE("constant offset is degenerate") {
    std::vector<double> b = a;
    for (double& v : b) v += 0.05;
    CHECK_THROWS_AS(stats::mean_difference_test(a, b), DegenerateInput);
  }

  SUBCASE("planted gap is detected with high power") {
    // 0.5 sigma_d mean gap over 240 paired months
    int detected = 0;
    for (int seed = 0; seed < 100; ++seed) {
      Rng rng(1000 + seed);
      std::vector<double> x(240), y(240);
      for (int i = 0; i < 240; ++i) {
        y[i] = rng.normal();
        x[i] = y[i] + 0.5 + rng.normal();  // paired diff ~ N(0.5, 1)
      }
      if (stats::mean_difference_test(x, y).p_value < 0.01) ++detected;
    }
    CHECK(detected >= 99);
  }
}

TEST_CASE("pearson correlation with exact-t p value") {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  const std::vector<double> y = {4, 1, 5, 3, 2, 6};
  const auto c = stats::pearson(x, y);
  CHECK(c.r == doctest::Approx(0.3142857142857143).epsilon(1e-12));
  CHECK(c.p_value == doctest::Approx(0.5440932944606414).epsilon(1e-9));
}
