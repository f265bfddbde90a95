#include "saa/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "saa/linalg.hpp"
#include "saa/rng.hpp"

namespace saa::benchmarks {

MomentSeries monthly_moments(const AlignedDataset& data) {
  if (data.size() == 0) throw InsufficientData("monthly_moments: empty dataset");
  const std::size_t n = data.assets();

  MomentSeries out;
  out.means = Matrix(data.size(), n);
  out.covs.reserve(data.size());
  for (std::size_t t = 0; t < data.size(); ++t) {
    const Matrix& rets = data.pairs[t].month_returns;
    const std::size_t days = rets.rows();
    if (days < 2) throw InsufficientData("monthly_moments: month with fewer than 2 days");
    out.months.push_back(data.return_month(t));

    std::vector<double> mu(n, 0.0);
    for (std::size_t d = 0; d < days; ++d) {
      for (std::size_t a = 0; a < n; ++a) mu[a] += rets(d, a);
    }
    for (std::size_t a = 0; a < n; ++a) {
      mu[a] /= static_cast<double>(days);
      out.means(t, a) = mu[a];
    }

    Matrix cov(n, n, 0.0);
    for (std::size_t d = 0; d < days; ++d) {
      for (std::size_t a = 0; a < n; ++a) {
        const double da = rets(d, a) - mu[a];
        for (std::size_t b = a; b < n; ++b) {
          cov(a, b) += da * (rets(d, b) - mu[b]);
        }
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        cov(a, b) /= static_cast<double>(days);
        cov(b, a) = cov(a, b);
      }
    }
    out.covs.push_back(std::move(cov));
  }
  return out;
}

Ar1Fit fit_ar1(std::span<const double> series) {
  if (series.size() < 3) throw InsufficientData("fit_ar1: need length >= 3");
  const std::size_t t_len = series.size() - 1;

  double mx = 0.0, my = 0.0;
  for (std::size_t t = 0; t < t_len; ++t) {
    mx += series[t];
    my += series[t + 1];
  }
  mx /= static_cast<double>(t_len);
  my /= static_cast<double>(t_len);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < t_len; ++t) {
    sxx += (series[t] - mx) * (series[t] - mx);
    sxy += (series[t] - mx) * (series[t + 1] - my);
  }

  Ar1Fit fit;
  if (sxx <= 0.0) {
    // zero-variance regressor
    fit.slope = 0.0;
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double predict_ar1(const Ar1Fit& fit, double last_value) {
  return fit.intercept + fit.slope * last_value;
}

namespace {

std::size_t tri_size(std::size_t n) { return n * (n + 1) / 2; }

// row-major lower triangle walk: (0,0), (1,0), (1,1), (2,0), ...
std::pair<std::size_t, std::size_t> tri_entry(std::size_t flat) {
  std::size_t i = 0;
  while (tri_size(i + 1) <= flat) ++i;
  return {i, flat - tri_size(i)};
}

Matrix repair_cov(const Matrix& cov, bool* repaired) {
  return linalg::clip_to_psd(cov, repaired);
}

}  // namespace

FactorFit fit_moment_factor_model(const MomentSeries& moments, const Matrix& states) {
  const std::size_t t_len = moments.size();
  const std::size_t n = moments.means.cols();
  const std::size_t m = states.cols();
  if (states.rows() != t_len) {
    throw MisalignedDates("fit_moment_factor_model: moment and state months differ");
  }
  if (t_len <= m + 1) throw InsufficientData("fit_moment_factor_model: need T > M + 1");

  FactorFit fit;
  fit.assets = n;
  fit.states = m;

  std::vector<double> y(t_len);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t t = 0; t < t_len; ++t) y[t] = moments.means(t, a);
    fit.mean_coeffs.push_back(linalg::ols(states, y));
  }
  for (std::size_t flat = 0; flat < tri_size(n); ++flat) {
    const auto [i, j] = tri_entry(flat);
    for (std::size_t t = 0; t < t_len; ++t) y[t] = moments.covs[t](i, j);
    fit.cov_coeffs.push_back(linalg::ols(states, y));
  }
  return fit;
}

PredictedMoments predict_factor_moments(const FactorFit& fit, std::span<const double> z) {
  if (z.size() != fit.states) {
    throw DegenerateInput("predict_factor_moments: state dimension mismatch");
  }
  const auto apply = [&](const std::vector<double>& coeffs) {
    double v = coeffs[0];
    for (std::size_t j = 0; j < fit.states; ++j) v += coeffs[j + 1] * z[j];
    return v;
  };

  PredictedMoments out;
  out.mean.resize(fit.assets);
  for (std::size_t a = 0; a < fit.assets; ++a) out.mean[a] = apply(fit.mean_coeffs[a]);

  Matrix cov(fit.assets, fit.assets, 0.0);
  for (std::size_t flat = 0; flat < tri_size(fit.assets); ++flat) {
    const auto [i, j] = tri_entry(flat);
    cov(i, j) = apply(fit.cov_coeffs[flat]);
    cov(j, i) = cov(i, j);
  }
  out.cov = repair_cov(cov, &out.repaired);
  return out;
}

VarMomentFit fit_var_moments(const MomentSeries& moments) {
  const std::size_t n = moments.means.cols();
  VarMomentFit fit;
  fit.assets = n;

  std::vector<double> y(moments.size());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t t = 0; t < moments.size(); ++t) y[t] = moments.means(t, a);
    fit.mean_fits.push_back(fit_ar1(y));
  }
  for (std::size_t flat = 0; flat < tri_size(n); ++flat) {
    const auto [i, j] = tri_entry(flat);
    for (std::size_t t = 0; t < moments.size(); ++t) y[t] = moments.covs[t](i, j);
    fit.cov_fits.push_back(fit_ar1(y));
  }
  return fit;
}

PredictedMoments predict_var_moments(const VarMomentFit& fit,
                                     std::span<const double> last_mean,
                                     const Matrix& last_cov) {
  PredictedMoments out;
  out.mean.resize(fit.assets);
  for (std::size_t a = 0; a < fit.assets; ++a) {
    out.mean[a] = predict_ar1(fit.mean_fits[a], last_mean[a]);
  }
  Matrix cov(fit.assets, fit.assets, 0.0);
  for (std::size_t flat = 0; flat < tri_size(fit.assets); ++flat) {
    const auto [i, j] = tri_entry(flat);
    cov(i, j) = predict_ar1(fit.cov_fits[flat], last_cov(i, j));
    cov(j, i) = cov(i, j);
  }
  out.cov = repair_cov(cov, &out.repaired);
  return out;
}

Matrix simulate_pooled(std::span<const double> mean_monthly, const Matrix& cov_monthly,
                       int days, int paths, std::uint64_t seed) {
  if (days < 1 || paths < 1) throw ConfigError("simulate: days and paths must be positive");
  const std::size_t n = mean_monthly.size();
  if (cov_monthly.rows() != n || cov_monthly.cols() != n) {
    throw DegenerateInput("simulate: covariance shape mismatch");
  }

  const double day_count = static_cast<double>(days);
  Matrix daily_cov(n, n);
  for (std::size_t i = 0; i < n * n; ++i) {
    daily_cov.data()[i] = cov_monthly.data()[i] / day_count;
  }
  const Matrix factor = linalg::cholesky_psd(daily_cov);

  Rng rng(seed);
  const std::size_t rows = static_cast<std::size_t>(days) * static_cast<std::size_t>(paths);
  Matrix out(rows, n);
  std::vector<double> shock(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < n; ++j) shock[j] = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
      double v = mean_monthly[i] / day_count;
      for (std::size_t j = 0; j <= i; ++j) v += factor(i, j) * shock[j];
      out(r, i) = v;
    }
  }
  return out;
}

Matrix simulate_returns(std::span<const double> mean_monthly, const Matrix& cov_monthly,
                        int days, std::uint64_t seed) {
  return simulate_pooled(mean_monthly, cov_monthly, days, 1, seed);
}

namespace {

struct Candidate {
  std::vector<double> weights;
  double distance_to_equal;
};

// Equality-constrained min-variance weights on the active support for a
// target mean; negative weights are dropped one at a time (most negative
// first) until the solution is long-only.
std::vector<double> frontier_point(const std::vector<double>& mu, const Matrix& cov,
                                   double target) {
  const std::size_t n = mu.size();
  std::vector<bool> active(n, true);
  std::size_t active_count = n;

  while (active_count >= 1) {
    // KKT system over active assets: [2C A'; A 0] [w; lam] = [0; b]
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      if (active[i]) ids.push_back(i);
    }
    const std::size_t k = ids.size();
    if (k == 1) {
      std::vector<double> w(n, 0.0);
      w[ids[0]] = 1.0;
      return w;
    }

    Matrix sys(k + 2, k + 2, 0.0);
    std::vector<double> rhs(k + 2, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) sys(i, j) = 2.0 * cov(ids[i], ids[j]);
      sys(i, i) += 1e-10;  // ridge keeps singular covariances solvable
      sys(i, k) = 1.0;
      sys(i, k + 1) = mu[ids[i]];
      sys(k, i) = 1.0;
      sys(k + 1, i) = mu[ids[i]];
    }
    rhs[k] = 1.0;
    rhs[k + 1] = target;

    std::vector<double> sol;
    try {
      sol = linalg::solve(sys, rhs);
    } catch (const SingularDesign&) {
      return {};  // infeasible target on this support
    }

    double most_negative = -1e-12;
    std::size_t drop = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (sol[i] < most_negative) {
        most_negative = sol[i];
        drop = i;
      }
    }
    if (drop == k) {
      std::vector<double> w(n, 0.0);
      for (std::size_t i = 0; i < k; ++i) w[ids[i]] = std::max(sol[i], 0.0);
      double s = 0.0;
      for (double v : w) s += v;
      if (s <= 0.0) return {};
      for (double& v : w) v /= s;
      return w;
    }
    active[ids[drop]] = false;
    --active_count;
  }
  return {};
}

std::vector<std::vector<double>> grid_candidates(const Matrix& simulated) {
  const std::size_t n = simulated.cols();
  std::vector<std::vector<double>> candidates;
  constexpr int kPoints = 1001;

  if (n == 2) {
    candidates.reserve(kPoints);
    for (int g = 0; g < kPoints; ++g) {
      const double x = static_cast<double>(g) / (kPoints - 1);
      candidates.push_back({x, 1.0 - x});
    }
    return candidates;
  }

  // frontier sweep for n > 2
  const std::size_t rows = simulated.rows();
  std::vector<double> mu(n, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t a = 0; a < n; ++a) mu[a] += simulated(r, a);
  }
  for (double& v : mu) v /= static_cast<double>(rows);
  Matrix cov(n, n, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        cov(a, b) += (simulated(r, a) - mu[a]) * (simulated(r, b) - mu[b]);
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      cov(a, b) /= static_cast<double>(rows);
      cov(b, a) = cov(a, b);
    }
  }

  const double lo = *std::min_element(mu.begin(), mu.end());
  const double hi = *std::max_element(mu.begin(), mu.end());
  candidates.reserve(kPoints);
  for (int g = 0; g < kPoints; ++g) {
    const double target = lo + (hi - lo) * static_cast<double>(g) / (kPoints - 1);
    auto w = frontier_point(mu, cov, target);
    if (!w.empty()) candidates.push_back(std::move(w));
  }
  return candidates;
}

}  // namespace

std::vector<double> optimize_weights_grid(const ratios::RatioSpec& spec, const Matrix& simulated,
                                          exec::Mode mode) {
  const std::size_t rows = simulated.rows();
  const std::size_t n = simulated.cols();
  if (rows < 2 || n < 2) throw InsufficientData("optimize_weights_grid: need >= 2 rows, assets");

  const auto candidates = grid_candidates(simulated);
  const std::size_t count = candidates.size();
  std::vector<double> values(count, -std::numeric_limits<double>::infinity());
  std::vector<char> valid(count, 0);

  const auto eval_candidate = [&](std::size_t c) {
    std::vector<double> portfolio(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += candidates[c][a] * simulated(r, a);
      portfolio[r] = s;
    }
    try {
      const double v = ratios::evaluate(spec, portfolio).value;
      if (std::isfinite(v)) {
        values[c] = v;
        valid[c] = 1;
      }
    } catch (const DegenerateRisk&) {
      valid[c] = 0;
    }
  };

  if (mode == exec::Mode::serial) {
    for (std::size_t c = 0; c < count; ++c) eval_candidate(c);
  } else {
#pragma omp parallel for schedule(static)
    for (long c = 0; c < static_cast<long>(count); ++c) {
      eval_candidate(static_cast<std::size_t>(c));
    }
  }

  double top = -std::numeric_limits<double>::infinity();
  bool any_valid = false;
  for (std::size_t c = 0; c < count; ++c) {
    if (valid[c]) {
      any_valid = true;
      top = std::max(top, values[c]);
    }
  }
  if (!any_valid) {
    throw DegenerateRisk("optimize_weights_grid: every candidate had a zero denominator");
  }

  // candidates within rounding noise of the top value count as tied; the
  // identical-assets case differs only in the last ulp across the sweep
  const double tie_band = 1e-12 * std::max(1.0, std::abs(top));
  const double equal = 1.0 / static_cast<double>(n);
  std::size_t best = count;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < count; ++c) {
    if (!valid[c] || values[c] < top - tie_band) continue;
    double dist = 0.0;
    for (double w : candidates[c]) dist += (w - equal) * (w - equal);
    if (dist < best_distance - 1e-15) {
      best = c;
      best_distance = dist;
    }
  }
  return candidates[best];
}

double crra_utility(double r, double gamma) {
  if (gamma <= 0.0 || gamma == 1.0) throw ConfigError("crra gamma must be positive and != 1");
  if (!(1.0 + r > 0.0)) throw NumericFailure("crra_utility: wealth would be non-positive");
  return std::pow(1.0 + r, 1.0 - gamma) / (1.0 - gamma);
}

namespace {

double clip01(double x) { return std::min(1.0, std::max(0.0, x)); }

struct PolicyGrad {
  double utility;
  double d_theta0;
  std::vector<double> d_theta;
};

PolicyGrad policy_utility_and_gradient(const ParametricPolicy& policy,
                                       const AlignedDataset& data) {
  const std::size_t t_len = data.size();
  const std::size_t m = policy.theta.size();
  PolicyGrad out{0.0, 0.0, std::vector<double>(m, 0.0)};

  for (std::size_t t = 0; t < t_len; ++t) {
    const AlignedPair& pair = data.pairs[t];
    double lin = policy.theta0;
    for (std::size_t j = 0; j < m; ++j) lin += policy.theta[j] * pair.state[j];
    const double x = clip01(lin);
    const bool interior = lin > 0.0 && lin < 1.0;

    const Matrix& rets = pair.month_returns;
    const std::size_t days = rets.rows();
    double u_sum = 0.0;
    double du_dx = 0.0;
    for (std::size_t d = 0; d < days; ++d) {
      const double r = x * rets(d, 0) + (1.0 - x) * rets(d, 1);
      u_sum += crra_utility(r, policy.gamma);
      if (interior) {
        du_dx += std::pow(1.0 + r, -policy.gamma) * (rets(d, 0) - rets(d, 1));
      }
    }
    u_sum /= static_cast<double>(days);
    du_dx /= static_cast<double>(days);

    out.utility += u_sum;
    if (interior) {
      out.d_theta0 += du_dx;
      for (std::size_t j = 0; j < m; ++j) out.d_theta[j] += du_dx * pair.state[j];
    }
  }

  const double scale = 1.0 / static_cast<double>(t_len);
  out.utility *= scale;
  out.d_theta0 *= scale;
  for (double& g : out.d_theta) g *= scale;
  return out;
}

}  // namespace

ParametricPolicy fit_parametric_policy(const AlignedDataset& data, double gamma,
                                       std::uint64_t seed, bool intercept_only) {
  if (data.assets() != 2) throw ConfigError("fit_parametric_policy: needs exactly two assets");
  if (data.size() < 3) throw InsufficientData("fit_parametric_policy: too few months");

  constexpr int kRestarts = 10;
  constexpr int kIters = 600;

  // The utility surface is nearly quadratic in x with curvature about
  // gamma * E[(R1 - R2)^2]; scaling the ascent step by its inverse makes the
  // effective step O(1) in weight units regardless of the return scale.
  double spread_sq = 0.0;
  std::size_t day_count = 0;
  for (const auto& pair : data.pairs) {
    for (std::size_t d = 0; d < pair.month_returns.rows(); ++d) {
      const double diff = pair.month_returns(d, 0) - pair.month_returns(d, 1);
      spread_sq += diff * diff;
      ++day_count;
    }
  }
  spread_sq /= static_cast<double>(day_count);
  const double base_step = 1.0 / std::max(gamma * spread_sq, 1e-12);

  const std::size_t m = intercept_only ? 0 : data.variables();
  ParametricPolicy best;
  double best_utility = -std::numeric_limits<double>::infinity();

  // intercept-only fits see empty state vectors
  AlignedDataset reduced;
  if (intercept_only) {
    reduced = data;
    for (auto& pair : reduced.pairs) pair.state.clear();
  }
  const AlignedDataset* fit_data = intercept_only ? &reduced : &data;

  for (int restart = 0; restart < kRestarts; ++restart) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(restart)));
    ParametricPolicy policy;
    policy.gamma = gamma;
    policy.theta0 = rng.uniform(0.0, 1.0);
    policy.theta.resize(m);
    for (double& v : policy.theta) v = rng.uniform(-1.0, 1.0);

    double prev = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kIters; ++iter) {
      const PolicyGrad pg = policy_utility_and_gradient(policy, *fit_data);
      if (!std::isfinite(pg.utility)) {
        throw NumericFailure("fit_parametric_policy: utility diverged");
      }
      if (iter > 0 && std::abs(pg.utility - prev) < 1e-15 * std::abs(prev)) break;
      prev = pg.utility;

      const double step = base_step / (1.0 + 0.05 * iter);
      policy.theta0 += step * pg.d_theta0;
      for (std::size_t j = 0; j < m; ++j) policy.theta[j] += step * pg.d_theta[j];
    }

    const double utility = policy_utility_and_gradient(policy, *fit_data).utility;
    if (utility > best_utility) {
      best_utility = utility;
      best = policy;
    }
  }
  if (intercept_only) best.theta.assign(data.variables(), 0.0);
  return best;
}

std::vector<double> apply_parametric_policy(const ParametricPolicy& policy,
                                            std::span<const double> z) {
  double lin = policy.theta0;
  for (std::size_t j = 0; j < policy.theta.size() && j < z.size(); ++j) {
    lin += policy.theta[j] * z[j];
  }
  const double x = clip01(lin);
  return {x, 1.0 - x};
}

double policy_mean_utility(const ParametricPolicy& policy, const AlignedDataset& data) {
  double total = 0.0;
  for (std::size_t t = 0; t < data.size(); ++t) {
    const AlignedPair& pair = data.pairs[t];
    const auto w = apply_parametric_policy(policy, pair.state);
    const Matrix& rets = pair.month_returns;
    double u = 0.0;
    for (std::size_t d = 0; d < rets.rows(); ++d) {
      u += crra_utility(w[0] * rets(d, 0) + w[1] * rets(d, 1), policy.gamma);
    }
    total += u / static_cast<double>(rets.rows());
  }
  return total / static_cast<double>(data.size());
}

std::vector<double> static_weights(double stock_pct) {
  if (stock_pct < 0.0 || stock_pct > 1.0) {
    throw ConfigError("static_weights: fraction must lie in [0, 1]");
  }
  return {stock_pct, 1.0 - stock_pct};
}

}  // namespace saa::benchmarks
