#include "saa/ratios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace saa::ratios {

std::string to_token(Kind kind) {
  switch (kind) {
    case Kind::sharpe: return "sharpe";
    case Kind::mad: return "mad";
    case Kind::minimax: return "minimax";
    case Kind::gini: return "gini";
    case Kind::cvar: return "cvar";
    case Kind::rachev: return "rachev";
  }
  return "sharpe";
}

Kind parse_token(const std::string& token) {
  for (Kind k : kAllKinds) {
    if (to_token(k) == token) return k;
  }
  throw ConfigError("unknown ratio token '" + token + "'");
}

void RatioSpec::validate() const {
  const bool needs_alpha = kind == Kind::cvar || kind == Kind::rachev;
  const bool needs_beta = kind == Kind::rachev;
  if (needs_alpha && !(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("ratio alpha must lie in (0,1)");
  }
  if (needs_beta && !(beta > 0.0 && beta < 1.0)) {
    throw ConfigError("ratio beta must lie in (0,1)");
  }
}

std::string RatioSpec::label() const {
  char buf[64];
  switch (kind) {
    case Kind::cvar:
      std::snprintf(buf, sizeof(buf), "cvar(%g)", alpha);
      return buf;
    case Kind::rachev:
      std::snprintf(buf, sizeof(buf), "rachev(%g,%g)", alpha, beta);
      return buf;
    default:
      return to_token(kind);
  }
}

std::size_t tail_count(double level, std::size_t d) {
  const double k = std::ceil(level * static_cast<double>(d) - 1e-9);
  if (k < 1.0) return 1;
  if (k > static_cast<double>(d)) return d;
  return static_cast<std::size_t>(k);
}

namespace {

void require_data(std::span<const double> r, std::size_t min_d, const char* who) {
  if (r.size() < min_d) {
    throw InsufficientData(std::string(who) + ": need at least " + std::to_string(min_d) +
                           " observations");
  }
}

// Indices of r in ascending (value, index) order; the strict total order
// makes tail membership deterministic under ties.
std::vector<std::size_t> ascending_order(std::span<const double> r) {
  std::vector<std::size_t> idx(r.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (r[a] != r[b]) return r[a] < r[b];
    return a < b;
  });
  return idx;
}

double vec_mean(std::span<const double> r) {
  double s = 0.0;
  for (double v : r) s += v;
  return s / static_cast<double>(r.size());
}

struct RewardRisk {
  double reward;
  double risk;
};

RewardRisk reward_risk(const RatioSpec& spec, std::span<const double> r) {
  const std::size_t d = r.size();
  const double m = vec_mean(r);
  switch (spec.kind) {
    case Kind::sharpe: {
      double ss = 0.0;
      for (double v : r) ss += (v - m) * (v - m);
      return {m, std::sqrt(ss / static_cast<double>(d))};
    }
    case Kind::mad: {
      double s = 0.0;
      for (double v : r) s += std::abs(v - m);
      return {m, s / static_cast<double>(d)};
    }
    case Kind::minimax: {
      return {m, -*std::min_element(r.begin(), r.end())};
    }
    case Kind::gini: {
      // GMD via the order-statistic identity; risk is GMD / 2.
      auto idx = ascending_order(r);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        s += (2.0 * static_cast<double>(k) - static_cast<double>(d) + 1.0) * r[idx[k]];
      }
      const double gmd = 2.0 * s / (static_cast<double>(d) * static_cast<double>(d - 1));
      return {m, 0.5 * gmd};
    }
    case Kind::cvar: {
      return {m, expected_tail_loss(r, spec.alpha)};
    }
    case Kind::rachev: {
      return {upper_tail_mean(r, spec.beta), expected_tail_loss(r, spec.alpha)};
    }
  }
  return {0.0, 0.0};
}

}  // namespace

double empirical_var(std::span<const double> r, double level) {
  require_data(r, 1, "empirical_var");
  const std::size_t k = tail_count(level, r.size());
  std::vector<double> v(r.begin(), r.end());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return -v[k - 1];
}

double expected_tail_loss(std::span<const double> r, double level) {
  require_data(r, 1, "expected_tail_loss");
  const std::size_t k = tail_count(level, r.size());
  std::vector<double> v(r.begin(), r.end());
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += v[i];
  return -s / static_cast<double>(k);
}

double upper_tail_mean(std::span<const double> r, double level) {
  require_data(r, 1, "upper_tail_mean");
  const std::size_t d = r.size();
  std::size_t u = tail_count(1.0 - level, d);
  if (u < 1) u = 1;
  std::vector<double> v(r.begin(), r.end());
  std::nth_element(v.begin(), v.begin() + (d - u), v.end());
  double s = 0.0;
  for (std::size_t i = d - u; i < d; ++i) s += v[i];
  return s / static_cast<double>(u);
}

RatioValue evaluate(const RatioSpec& spec, std::span<const double> r) {
  require_data(r, 2, "evaluate");
  spec.validate();
  for (double v : r) {
    if (!std::isfinite(v)) throw NonFiniteInput("evaluate: non-finite return");
  }

  const RewardRisk rr = reward_risk(spec, r);
  if (rr.risk == 0.0) {
    throw DegenerateRisk("ratio " + spec.label() + " has exactly zero risk denominator");
  }
  RatioValue out;
  out.reward = rr.reward;
  out.risk = rr.risk;
  out.value = rr.reward / rr.risk;
  out.degenerate = rr.risk < 0.0;
  return out;
}

std::vector<double> gradient_wrt_returns(const RatioSpec& spec, std::span<const double> r) {
  require_data(r, 2, "gradient_wrt_returns");
  spec.validate();
  const std::size_t d = r.size();
  const double dn = static_cast<double>(d);
  const RewardRisk rr = reward_risk(spec, r);
  if (rr.risk == 0.0) {
    throw DegenerateRisk("gradient undefined: zero risk denominator for " + spec.label());
  }
  const double risk = rr.risk;
  const double reward = rr.reward;
  const double m = vec_mean(r);

  // d(reward/risk)/dr = d_reward/(risk) - reward * d_risk / risk^2
  std::vector<double> grad(d, 0.0);
  const double inv_risk = 1.0 / risk;
  const double rwr2 = reward / (risk * risk);

  switch (spec.kind) {
    case Kind::sharpe: {
      // d_risk/dr_i = (r_i - m) / (d * risk)
      for (std::size_t i = 0; i < d; ++i) {
        grad[i] = inv_risk / dn - rwr2 * (r[i] - m) / (dn * risk);
      }
      break;
    }
    case Kind::mad: {
      double sign_sum = 0.0;
      for (double v : r) {
        sign_sum += (v > m) - (v < m);
      }
      for (std::size_t i = 0; i < d; ++i) {
        const double sgn = (r[i] > m) - (r[i] < m);
        const double d_risk = (sgn - sign_sum / dn) / dn;
        grad[i] = inv_risk / dn - rwr2 * d_risk;
      }
      break;
    }
    case Kind::minimax: {
      std::size_t argmin = 0;
      for (std::size_t i = 1; i < d; ++i) {
        if (r[i] < r[argmin]) argmin = i;
      }
      for (std::size_t i = 0; i < d; ++i) grad[i] = inv_risk / dn;
      grad[argmin] += rwr2;  // d_risk/dr_argmin = -1
      break;
    }
    case Kind::gini: {
      // d GMD / dr_i = 2/(d(d-1)) * [#(r_j < r_i) - #(r_j > r_i)], sign(0)=0
      auto idx = ascending_order(r);
      std::vector<double> net(d, 0.0);
      for (std::size_t pos = 0; pos < d; ++pos) {
        const std::size_t i = idx[pos];
        std::size_t below = 0, above = 0;
        for (std::size_t j = 0; j < d; ++j) {
          if (j == i) continue;
          if (r[j] < r[i]) ++below;
          else if (r[j] > r[i]) ++above;
        }
        net[i] = static_cast<double>(below) - static_cast<double>(above);
      }
      const double scale = 1.0 / (dn * (dn - 1.0));  // half of the GMD factor
      for (std::size_t i = 0; i < d; ++i) {
        grad[i] = inv_risk / dn - rwr2 * scale * net[i];
      }
      break;
    }
    case Kind::cvar:
    case Kind::rachev: {
      auto idx = ascending_order(r);
      const std::size_t k = tail_count(spec.alpha, d);
      std::vector<bool> in_lower(d, false);
      for (std::size_t i = 0; i < k; ++i) in_lower[idx[i]] = true;

      if (spec.kind == Kind::cvar) {
        for (std::size_t i = 0; i < d; ++i) {
          const double d_risk = in_lower[i] ? -1.0 / static_cast<double>(k) : 0.0;
          grad[i] = inv_risk / dn - rwr2 * d_risk;
        }
      } else {
        std::size_t u = tail_count(1.0 - spec.beta, d);
        if (u < 1) u = 1;
        std::vector<bool> in_upper(d, false);
        for (std::size_t i = d - u; i < d; ++i) in_upper[idx[i]] = true;
        for (std::size_t i = 0; i < d; ++i) {
          const double d_reward = in_upper[i] ? 1.0 / static_cast<double>(u) : 0.0;
          const double d_risk = in_lower[i] ? -1.0 / static_cast<double>(k) : 0.0;
          grad[i] = d_reward * inv_risk - rwr2 * d_risk;
        }
      }
      break;
    }
  }
  return grad;
}

std::vector<RatioValue> evaluate_many(const RatioSpec& spec,
                                      const std::vector<std::vector<double>>& series,
                                      exec::Mode mode) {
  std::vector<RatioValue> out(series.size());
  if (mode == exec::Mode::serial) {
    for (std::size_t t = 0; t < series.size(); ++t) {
      out[t] = evaluate(spec, series[t]);
    }
    return out;
  }

  std::exception_ptr error;
#pragma omp parallel for schedule(static)
  for (long t = 0; t < static_cast<long>(series.size()); ++t) {
    try {
      out[t] = evaluate(spec, series[t]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace saa::ratios
