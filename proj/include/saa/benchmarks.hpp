#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "saa/data_io.hpp"
#include "saa/parallel.hpp"
#include "saa/ratios.hpp"
#include "saa/types.hpp"

namespace saa::benchmarks {

// Monthly mean vectors and covariance matrices estimated from daily returns.
struct MomentSeries {
  std::vector<YearMonth> months;
  Matrix means;              // T x N
  std::vector<Matrix> covs;  // T entries, each N x N population covariance

  std::size_t size() const { return months.size(); }
};

MomentSeries monthly_moments(const AlignedDataset& data);

struct Ar1Fit {
  double intercept = 0.0;
  double slope = 0.0;
};

// OLS of y_t on (1, y_{t-1}); a constant series degrades to
// slope 0 / intercept = the constant.
Ar1Fit fit_ar1(std::span<const double> series);
double predict_ar1(const Ar1Fit& fit, double last_value);

// Per-moment regressions on the state variables: one row of (1 + M)
// coefficients for each mean component and each lower-triangular
// covariance entry.
struct FactorFit {
  std::size_t assets = 0;
  std::size_t states = 0;
  std::vector<std::vector<double>> mean_coeffs;  // N rows
  std::vector<std::vector<double>> cov_coeffs;   // N(N+1)/2 rows, row-major lower triangle
};

FactorFit fit_moment_factor_model(const MomentSeries& moments, const Matrix& states);

struct PredictedMoments {
  std::vector<double> mean;
  Matrix cov;
  bool repaired = false;  // eigenvalue clipping changed the prediction
};

PredictedMoments predict_factor_moments(const FactorFit& fit, std::span<const double> z);

// AR(1) applied to every scalar moment series independently.
struct VarMomentFit {
  std::size_t assets = 0;
  std::vector<Ar1Fit> mean_fits;  // N
  std::vector<Ar1Fit> cov_fits;   // N(N+1)/2 lower triangle
};

VarMomentFit fit_var_moments(const MomentSeries& moments);
PredictedMoments predict_var_moments(const VarMomentFit& fit,
                                     std::span<const double> last_mean,
                                     const Matrix& last_cov);

// days x N draws from N(mean/days, cov/days) via the lower-triangular
// factor of the covariance; bit-identical given the seed.
Matrix simulate_returns(std::span<const double> mean_monthly, const Matrix& cov_monthly,
                        int days, std::uint64_t seed);

// Pooled sample for ratio maximization: days * paths rows at the same
// daily scaling.
Matrix simulate_pooled(std::span<const double> mean_monthly, const Matrix& cov_monthly,
                       int days, int paths, std::uint64_t seed);

// Ratio maximization over the footnote-21 sweep: a 1001-point weight grid
// for two assets, or 1001 frontier target returns solved long-only for more.
// Ties go to the candidate closest to equal weights, then the lowest index.
std::vector<double> optimize_weights_grid(const ratios::RatioSpec& spec, const Matrix& simulated,
                                          exec::Mode mode = exec::default_mode());

// (1 + r)^(1 - gamma) / (1 - gamma)
double crra_utility(double r, double gamma);

// Clipped linear policy x_t = clip(theta0 + theta' z_t, 0, 1) fitted by
// maximizing average CRRA utility.
struct ParametricPolicy {
  double theta0 = 0.5;
  std::vector<double> theta;
  double gamma = 5.0;
};

ParametricPolicy fit_parametric_policy(const AlignedDataset& data, double gamma,
                                       std::uint64_t seed, bool intercept_only = false);
std::vector<double> apply_parametric_policy(const ParametricPolicy& policy,
                                            std::span<const double> z);
double policy_mean_utility(const ParametricPolicy& policy, const AlignedDataset& data);

std::vector<double> static_weights(double stock_pct);

}  // namespace saa::benchmarks
