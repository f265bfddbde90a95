#include <cmath>
#include <vector>

#include <doctest.h>

#include "saa/benchmarks.hpp"
#include "saa/linalg.hpp"
#include "test_helpers.hpp"

using namespace saa;
using ratios::Kind;
using ratios::RatioSpec;

TEST_CASE("monthly moments from daily returns") {
  AlignedDataset data;
  data.asset_names = {"a", "b"};
  data.variable_names = {"z"};

  SUBCASE("constant month has zero covariance") {
    AlignedPair pair;
    pair.state = {0.0};
    pair.month_returns = Matrix(3, 2);
    for (std::size_t d = 0; d < 3; ++d) {
      pair.month_returns(d, 0) = 0.02;
      pair.month_returns(d, 1) = -0.01;
    }
    data.month_keys = {{2000, 1}};
    data.pairs = {pair};
    const benchmarks::MomentSeries moments = benchmarks::monthly_moments(data);
    CHECK(moments.means(0, 0) == doctest::Approx(0.02));
    CHECK(moments.means(0, 1) == doctest::Approx(-0.01));
    for (double v : moments.covs[0].data()) CHECK(v == doctest::Approx(0.0));
    CHECK(moments.months[0] == YearMonth{2000, 2});
  }

  SUBCASE("two-day single pair variance") {
    AlignedPair pair;
    pair.state = {0.0};
    pair.month_returns = Matrix(2, 2);
    pair.month_returns(0, 0) = 0.01;
    pair.month_returns(1, 0) = 0.03;
    pair.month_returns(0, 1) = 0.0;
    pair.month_returns(1, 1) = 0.0;
    data.month_keys = {{2000, 1}};
    data.pairs = {pair};
    const benchmarks::MomentSeries moments = benchmarks::monthly_moments(data);
    CHECK(moments.means(0, 0) == doctest::Approx(0.02));
    CHECK(moments.covs[0](0, 0) == doctest::Approx(0.0001));
  }

  SUBCASE("anti-correlated assets") {
    AlignedPair pair;
    pair.state = {0.0};
    pair.month_returns = Matrix(4, 2);
    const double seq[4] = {0.01, -0.01, 0.02, -0.02};
    for (std::size_t d = 0; d < 4; ++d) {
      pair.month_returns(d, 0) = seq[d];
      pair.month_returns(d, 1) = -seq[d];
    }
    data.month_keys = {{2000, 1}};
    data.pairs = {pair};
    const benchmarks::MomentSeries moments = benchmarks::monthly_moments(data);
    const Matrix& cov = moments.covs[0];
    CHECK(cov(0, 1) == doctest::Approx(-std::sqrt(cov(0, 0) * cov(1, 1))));
  }
}

TEST_CASE("ar1 fitting") {
  SUBCASE("unit-slope ramp") {
    const std::vector<double> ramp = {0, 1, 2, 3, 4, 5};
    const benchmarks::Ar1Fit fit = benchmarks::fit_ar1(ramp);
    CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(benchmarks::predict_ar1(fit, 5.0) == doctest::Approx(6.0).epsilon(1e-9));
  }

  SUBCASE("decay without intercept") {
    std::vector<double> series = {1.0};
    for (int i = 0; i < 6; ++i) series.push_back(0.5 * series.back());
    const benchmarks::Ar1Fit fit = benchmarks::fit_ar1(series);
    CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-10));
  }

  SUBCASE("constant series degrades gracefully") {
    const std::vector<double> flat = {2.5, 2.5, 2.5, 2.5};
    const benchmarks::Ar1Fit fit = benchmarks::fit_ar1(flat);
    CHECK(fit.slope == 0.0);
    CHECK(fit.intercept == doctest::Approx(2.5));
  }
}

TEST_CASE("factor model recovers linear moments and repairs covariance") {
  Rng rng(81);
  const std::size_t t_len = 40, m = 3;
  Matrix states(t_len, m);
  for (double& v : states.data()) v = rng.normal();

  // plant exact linear maps for the mean and covariance entries
  benchmarks::MomentSeries moments;
  moments.means = Matrix(t_len, 2);
  for (std::size_t t = 0; t < t_len; ++t) {
    moments.months.push_back(YearMonth::from_index(t));
    moments.means(t, 0) = 0.01 + 0.002 * states(t, 0) - 0.001 * states(t, 2);
    moments.means(t, 1) = -0.005 + 0.004 * states(t, 1);
    Matrix cov(2, 2);
    cov(0, 0) = 0.0004 + 0.0001 * states(t, 0);
    cov(1, 1) = 0.0002;
    cov(0, 1) = cov(1, 0) = 0.00005 * states(t, 1);
    moments.covs.push_back(cov);
  }

  const benchmarks::FactorFit fit = benchmarks::fit_moment_factor_model(moments, states);
  CHECK(fit.mean_coeffs[0][0] == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(fit.mean_coeffs[0][1] == doctest::Approx(0.002).epsilon(1e-9));
  CHECK(fit.mean_coeffs[0][3] == doctest::Approx(-0.001).epsilon(1e-9));
  CHECK(fit.mean_coeffs[1][2] == doctest::Approx(0.004).epsilon(1e-9));

  SUBCASE("prediction at a state vector") {
    const std::vector<double> z = {1.0, -1.0, 0.5};
    const benchmarks::PredictedMoments pm = benchmarks::predict_factor_moments(fit, z);
    CHECK(pm.mean[0] == doctest::Approx(0.01 + 0.002 - 0.0005).epsilon(1e-9));
    CHECK_FALSE(pm.repaired);
  }

  SUBCASE("negative predicted variance is clipped with the repair flag") {
    // extreme state drives the planted variance line negative
    const std::vector<double> z = {-50.0, 0.0, 0.0};
    const benchmarks::PredictedMoments pm = benchmarks::predict_factor_moments(fit, z);
    CHECK(pm.repaired);
    linalg::SymEig eig = linalg::sym_eigen(pm.cov);
    CHECK(eig.values.front() >= -1e-12);
  }

  SUBCASE("collinear states are singular") {
    Matrix collinear(t_len, 2);
    for (std::size_t t = 0; t < t_len; ++t) {
      collinear(t, 0) = 1.0;  // constant column duplicates the intercept
      collinear(t, 1) = states(t, 1);
    }
    CHECK_THROWS_AS(benchmarks::fit_moment_factor_model(moments, collinear), SingularDesign);
  }
}

TEST_CASE("return simulation") {
  SUBCASE("zero covariance returns the daily mean exactly") {
    Matrix cov(2, 2, 0.0);
    const Matrix sim = benchmarks::simulate_returns(std::vector<double>{0.021, -0.021}, cov,
                                                    21, 5);
    CHECK(sim.rows() == 21);
    for (std::size_t d = 0; d < sim.rows(); ++d) {
      CHECK(sim(d, 0) == doctest::Approx(0.001));
      CHECK(sim(d, 1) == doctest::Approx(-0.001));
    }
  }

  SUBCASE("bit-identical across runs") {
    Matrix cov(2, 2, 0.0);
    cov(0, 0) = cov(1, 1) = 0.0004;
    cov(0, 1) = cov(1, 0) = 0.0001;
    const Matrix a = benchmarks::simulate_pooled(std::vector<double>{0.01, 0.0}, cov, 21, 3, 9);
    const Matrix b = benchmarks::simulate_pooled(std::vector<double>{0.01, 0.0}, cov, 21, 3, 9);
    CHECK(a.data() == b.data());
    CHECK(a.rows() == 63);
  }

  SUBCASE("large-sample mean within four standard errors") {
    Matrix cov(2, 2, 0.0);
    cov(0, 0) = cov(1, 1) = 1.0;
    const int days = 100000;
    const Matrix sim =
        benchmarks::simulate_returns(std::vector<double>{0.0, 0.0}, cov, days, 11);
    for (std::size_t a = 0; a < 2; ++a) {
      double mean = 0.0;
      for (std::size_t d = 0; d < sim.rows(); ++d) mean += sim(d, a);
      mean /= static_cast<double>(days);
      const double se = std::sqrt(1.0 / days) / std::sqrt(static_cast<double>(days));
      CHECK(std::fabs(mean) < 4.0 * se);
    }
  }

  SUBCASE("indefinite covariance is rejected") {
    Matrix cov(2, 2, 0.0);
    cov(0, 0) = 1.0;
    cov(1, 1) = -1.0;
    CHECK_THROWS_AS(
        benchmarks::simulate_returns(std::vector<double>{0.0, 0.0}, cov, 21, 5),
        DegenerateInput);
  }
}

TEST_CASE("grid optimization") {
  Rng rng(83);

  SUBCASE("dominant asset takes full weight") {
    // asset 2 is asset 1 shifted down: stochastically dominated
    Matrix sim(300, 2);
    for (std::size_t d = 0; d < sim.rows(); ++d) {
      sim(d, 0) = 0.001 + 0.01 * rng.normal();
      sim(d, 1) = sim(d, 0) - 0.0005;
    }
    const auto w = benchmarks::optimize_weights_grid(RatioSpec{Kind::sharpe}, sim);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(0.0));
  }

  SUBCASE("identical assets tie to equal weights") {
    Matrix sim(100, 2);
    for (std::size_t d = 0; d < sim.rows(); ++d) {
      sim(d, 0) = 0.01 * rng.normal();
      sim(d, 1) = sim(d, 0);
    }
    const auto w = benchmarks::optimize_weights_grid(RatioSpec{Kind::sharpe}, sim);
    CHECK(w[0] == doctest::Approx(0.5));
  }

  SUBCASE("coarse optimum sits within 0.001 of a 10x finer sweep") {
    for (int rep = 0; rep < 5; ++rep) {
      Matrix sim(400, 2);
      const double drift1 = 0.0005 * rng.normal();
      const double drift2 = 0.0005 * rng.normal();
      for (std::size_t d = 0; d < sim.rows(); ++d) {
        sim(d, 0) = drift1 + 0.01 * rng.normal();
        sim(d, 1) = drift2 + 0.008 * rng.normal();
      }
      const auto coarse = benchmarks::optimize_weights_grid(RatioSpec{Kind::sharpe}, sim);

      double best_value = -1e300, best_x = 0.0;
      for (int g = 0; g <= 10000; ++g) {
        const double x = static_cast<double>(g) / 10000.0;
        std::vector<double> r(sim.rows());
        for (std::size_t d = 0; d < sim.rows(); ++d) {
          r[d] = x * sim(d, 0) + (1.0 - x) * sim(d, 1);
        }
        const double v = ratios::evaluate(RatioSpec{Kind::sharpe}, r).value;
        if (v > best_value) {
          best_value = v;
          best_x = x;
        }
      }
      CHECK(std::fabs(coarse[0] - best_x) <= 0.001 + 1e-12);
    }
  }

  SUBCASE("three assets stay long-only on the frontier sweep") {
    Matrix sim(500, 3);
    for (std::size_t d = 0; d < sim.rows(); ++d) {
      sim(d, 0) = 0.0008 + 0.01 * rng.normal();
      sim(d, 1) = 0.0002 + 0.012 * rng.normal();
      sim(d, 2) = -0.0001 + 0.009 * rng.normal();
    }
    const auto w = benchmarks::optimize_weights_grid(RatioSpec{Kind::sharpe}, sim);
    REQUIRE(w.size() == 3);
    double sum = 0.0;
    for (double v : w) {
      CHECK(v >= -1e-12);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("crra utility") {
  CHECK(benchmarks::crra_utility(0.0, 5.0) == doctest::Approx(-0.25));
  CHECK(benchmarks::crra_utility(0.1, 5.0) ==
        doctest::Approx(std::pow(1.1, -4.0) / -4.0).epsilon(1e-12));
  CHECK(benchmarks::crra_utility(0.1, 5.0) == doctest::Approx(-0.170753).epsilon(1e-5));
  CHECK(std::isfinite(benchmarks::crra_utility(0.01, 100.0)));
  CHECK_THROWS_AS(benchmarks::crra_utility(-1.0, 5.0), NumericFailure);
  CHECK_THROWS_AS(benchmarks::crra_utility(0.0, 1.0), ConfigError);
}

TEST_CASE("parametric policy") {
  SUBCASE("intercept-only fit matches a brute-force grid") {
    Rng rng(85);
    auto data = helpers::random_dataset(rng, 24, 21, 2, 2, 0.01);
    // make asset 1 better on average so the optimum is interior or corner
    for (auto& pair : data.pairs) {
      for (std::size_t d = 0; d < pair.month_returns.rows(); ++d) {
        pair.month_returns(d, 0) += 0.0006;
        pair.month_returns(d, 1) -= 0.0006;
      }
    }
    const benchmarks::ParametricPolicy policy =
        benchmarks::fit_parametric_policy(data, 5.0, 31, true);

    double best_u = -1e300, best_x = 0.0;
    for (int g = 0; g <= 1000; ++g) {
      const double x = static_cast<double>(g) / 1000.0;
      double total = 0.0;
      for (const auto& pair : data.pairs) {
        double u = 0.0;
        for (std::size_t d = 0; d < pair.month_returns.rows(); ++d) {
          u += benchmarks::crra_utility(
              x * pair.month_returns(d, 0) + (1.0 - x) * pair.month_returns(d, 1), 5.0);
        }
        total += u / static_cast<double>(pair.month_returns.rows());
      }
      total /= static_cast<double>(data.size());
      if (total > best_u) {
        best_u = total;
        best_x = x;
      }
    }
    CHECK(std::fabs(std::min(1.0, std::max(0.0, policy.theta0)) - best_x) <= 0.002);
  }

  SUBCASE("planted data: fitted policy beats every static preset in sample") {
    const auto planted = helpers::planted(87, 36, 0);
    const benchmarks::ParametricPolicy policy =
        benchmarks::fit_parametric_policy(planted.train, 5.0, 33);
    const double fitted = benchmarks::policy_mean_utility(policy, planted.train);
    for (double pct : {0.20, 0.60, 0.80}) {
      benchmarks::ParametricPolicy fixed;
      fixed.gamma = 5.0;
      fixed.theta0 = pct;
      fixed.theta.assign(planted.train.variables(), 0.0);
      CHECK(fitted >= benchmarks::policy_mean_utility(fixed, planted.train) - 1e-12);
    }
  }

  SUBCASE("zero state maps to the clipped intercept") {
    benchmarks::ParametricPolicy policy;
    policy.theta0 = 1.7;
    policy.theta = {0.5, -0.5};
    const auto w = benchmarks::apply_parametric_policy(policy, std::vector<double>{0.0, 0.0});
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 0.0);
  }
}

TEST_CASE("static weights") {
  const auto w = benchmarks::static_weights(0.60);
  CHECK(w[0] == doctest::Approx(0.6));
  CHECK(w[1] == doctest::Approx(0.4));
  CHECK(benchmarks::static_weights(0.0)[1] == 1.0);
  CHECK(benchmarks::static_weights(1.0)[0] == 1.0);
  CHECK_THROWS_AS(benchmarks::static_weights(1.2), ConfigError);
}
