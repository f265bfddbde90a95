#include "saa/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "saa/rng.hpp"

namespace saa::backtest {

RollingSchedule build_schedule(const std::vector<YearMonth>& months, std::size_t train_len,
                               std::size_t test_len) {
  if (train_len < 1 || test_len < 1) throw ConfigError("schedule lengths must be positive");
  RollingSchedule schedule;
  schedule.train_len = train_len;
  schedule.test_len = test_len;

  for (std::size_t start = 0; start + train_len + test_len <= months.size();
       start += test_len) {
    Window w;
    w.train_begin = start;
    w.train_end = start + train_len;
    w.test_begin = w.train_end;
    w.test_end = w.test_begin + test_len;
    w.train_start = months[w.train_begin];
    w.train_stop = months[w.train_end - 1];
    w.test_start = months[w.test_begin];
    w.test_stop = months[w.test_end - 1];
    schedule.windows.push_back(w);
  }
  if (schedule.windows.empty()) {
    throw InsufficientData("build_schedule: not enough months for one train+test window");
  }
  return schedule;
}

namespace {

// Appends one test month scored against realized returns.
void push_month(BacktestReport& report, const AlignedDataset& data, std::size_t t,
                std::size_t window_index, std::vector<double> weights, bool renormalized,
                const ratios::RatioSpec& spec) {
  const Matrix& rets = data.pairs[t].month_returns;
  const std::size_t days = rets.rows();
  const std::size_t n = rets.cols();

  std::vector<double> daily(days);
  double wealth = 1.0;
  double mean_daily = 0.0;
  for (std::size_t d = 0; d < days; ++d) {
    double r = 0.0;
    for (std::size_t a = 0; a < n; ++a) r += weights[a] * rets(d, a);
    daily[d] = r;
    wealth *= 1.0 + r;
    mean_daily += r;
  }
  mean_daily /= static_cast<double>(days);

  const ratios::RatioValue value = ratios::evaluate(spec, daily);

  report.months.push_back(data.return_month(t));
  report.weights.push_back(std::move(weights));
  report.daily_returns.push_back(std::move(daily));
  report.mean_daily_return.push_back(mean_daily);
  report.monthly_return.push_back(wealth - 1.0);
  report.ratio_values.push_back(value.value);
  report.degenerate.push_back(value.degenerate);
  report.renormalized.push_back(renormalized);
  report.window_of_month.push_back(window_index);
}

using WeightFn =
    std::function<std::pair<std::vector<double>, bool>(std::size_t t)>;  // weights, renormalized

void run_window_tests(BacktestReport& report, const AlignedDataset& data, const Window& window,
                      std::size_t window_index, const ratios::RatioSpec& spec,
                      const WeightFn& weigh) {
  for (std::size_t t = window.test_begin; t < window.test_end; ++t) {
    auto [w, renorm] = weigh(t);
    push_month(report, data, t, window_index, std::move(w), renorm, spec);
  }
}

void check_schedule(const RollingSchedule& schedule, const AlignedDataset& data) {
  if (schedule.windows.empty()) throw InsufficientData("empty schedule");
  if (schedule.windows.back().test_end > data.size()) {
    throw InsufficientData("schedule extends past the aligned dataset");
  }
}

}  // namespace

BacktestReport run_ann(const RollingSchedule& schedule, const AlignedDataset& data,
                       const ratios::RatioSpec& spec, const BacktestSettings& settings) {
  check_schedule(schedule, data);

  BacktestReport report;
  report.method = "ann";
  report.spec = spec;

  for (std::size_t wi = 0; wi < schedule.windows.size(); ++wi) {
    const Window& window = schedule.windows[wi];
    AlignedDataset train_raw = data.slice(window.train_begin, window.train_end);

    // standardize states on the training window only
    StateSeries train_states;
    train_states.months = train_raw.month_keys;
    train_states.variable_names = train_raw.variable_names;
    train_states.values = Matrix(train_raw.size(), train_raw.variables());
    for (std::size_t t = 0; t < train_raw.size(); ++t) {
      for (std::size_t j = 0; j < train_raw.variables(); ++j) {
        train_states.values(t, j) = train_raw.pairs[t].state[j];
      }
    }
    auto [std_states, stats] = standardize_states(train_states);
    AlignedDataset train_std = train_raw;
    for (std::size_t t = 0; t < train_std.size(); ++t) {
      for (std::size_t j = 0; j < train_std.variables(); ++j) {
        train_std.pairs[t].state[j] = std_states.values(t, j);
      }
    }

    training::TrainConfig window_config = settings.train;
    window_config.seed = settings.train.seed + wi * 1000003ULL;

    network::NetworkShape shape = settings.shape;
    shape.inputs = data.variables();
    shape.assets = data.assets();
    if (window_config.hidden_grid.size() > 1) {
      shape.hidden = training::cross_validate(train_std, spec, shape, window_config);
      window_config.hidden_grid = {shape.hidden};
    } else {
      shape.hidden = window_config.hidden_grid[0];
    }

    const training::TrainedModel model =
        training::train(train_std, stats, spec, shape, window_config);

    run_window_tests(report, data, window, wi, spec, [&](std::size_t t) {
      training::Prediction p = training::predict_weights(model, data.pairs[t].state,
                                                         window_config.constraint_tol);
      return std::make_pair(std::move(p.weights), p.renormalized);
    });
  }
  return report;
}

BacktestReport run_benchmark(const RollingSchedule& schedule, const AlignedDataset& data,
                             const ratios::RatioSpec& spec, const std::string& method,
                             std::uint64_t seed, const BacktestSettings& settings) {
  check_schedule(schedule, data);

  BacktestReport report;
  report.method = method;
  report.spec = spec;

  const bool is_static = method.rfind("static:", 0) == 0;
  double static_pct = 0.0;
  if (is_static) {
    try {
      static_pct = std::stod(method.substr(7));
    } catch (const std::exception&) {
      throw ConfigError("bad static benchmark token '" + method + "'");
    }
    if (static_pct > 1.0) static_pct /= 100.0;  // accept static:60 as 60%
  } else if (method != "var" && method != "factor" && method != "parametric") {
    throw ConfigError("unknown benchmark selector '" + method + "'");
  }

  for (std::size_t wi = 0; wi < schedule.windows.size(); ++wi) {
    const Window& window = schedule.windows[wi];
    const AlignedDataset train_raw = data.slice(window.train_begin, window.train_end);

    if (is_static) {
      const auto w = benchmarks::static_weights(static_pct);
      run_window_tests(report, data, window, wi, spec,
                       [&](std::size_t) { return std::make_pair(w, false); });
      continue;
    }

    StateSeries train_states;
    train_states.months = train_raw.month_keys;
    train_states.variable_names = train_raw.variable_names;
    train_states.values = Matrix(train_raw.size(), train_raw.variables());
    for (std::size_t t = 0; t < train_raw.size(); ++t) {
      for (std::size_t j = 0; j < train_raw.variables(); ++j) {
        train_states.values(t, j) = train_raw.pairs[t].state[j];
      }
    }
    auto [std_states, stats] = standardize_states(train_states);

    if (method == "parametric") {
      AlignedDataset train_std = train_raw;
      for (std::size_t t = 0; t < train_std.size(); ++t) {
        for (std::size_t j = 0; j < train_std.variables(); ++j) {
          train_std.pairs[t].state[j] = std_states.values(t, j);
        }
      }
      const benchmarks::ParametricPolicy policy = benchmarks::fit_parametric_policy(
          train_std, settings.crra_gamma, Rng::derive(seed, wi));
      run_window_tests(report, data, window, wi, spec, [&](std::size_t t) {
        const auto z = standardize_vector(data.pairs[t].state, stats);
        return std::make_pair(benchmarks::apply_parametric_policy(policy, z), false);
      });
      continue;
    }

    const benchmarks::MomentSeries moments = benchmarks::monthly_moments(train_raw);

    if (method == "var") {
      const benchmarks::VarMomentFit fit = benchmarks::fit_var_moments(moments);
      // realized moments of the month preceding each test month feed the
      // one-step forecast; the full-sample series supplies them without
      // look-ahead (pair t-1's returns are known when month t begins)
      const benchmarks::MomentSeries all_moments = benchmarks::monthly_moments(data);
      run_window_tests(report, data, window, wi, spec, [&](std::size_t t) {
        const std::size_t prev = t - 1;
        std::vector<double> last_mean(data.assets());
        for (std::size_t a = 0; a < data.assets(); ++a) {
          last_mean[a] = all_moments.means(prev, a);
        }
        const benchmarks::PredictedMoments pm =
            benchmarks::predict_var_moments(fit, last_mean, all_moments.covs[prev]);
        const Matrix sim = benchmarks::simulate_pooled(
            pm.mean, pm.cov, settings.sim_days, settings.sim_paths,
            Rng::derive(seed, 1000 + t));
        return std::make_pair(benchmarks::optimize_weights_grid(spec, sim), false);
      });
      continue;
    }

    // factor model on standardized states
    const benchmarks::FactorFit fit =
        benchmarks::fit_moment_factor_model(moments, std_states.values);
    run_window_tests(report, data, window, wi, spec, [&](std::size_t t) {
      const auto z = standardize_vector(data.pairs[t].state, stats);
      const benchmarks::PredictedMoments pm = benchmarks::predict_factor_moments(fit, z);
      const Matrix sim = benchmarks::simulate_pooled(
          pm.mean, pm.cov, settings.sim_days, settings.sim_paths, Rng::derive(seed, 1000 + t));
      return std::make_pair(benchmarks::optimize_weights_grid(spec, sim), false);
    });
  }
  return report;
}

stats::SummaryStats summarize(const BacktestReport& report,
                              const std::optional<MonthRange>& range) {
  std::vector<double> values;
  for (std::size_t i = 0; i < report.months.size(); ++i) {
    if (range && (report.months[i] < range->begin || range->end < report.months[i])) continue;
    values.push_back(report.ratio_values[i]);
  }
  if (values.size() < 2) throw InsufficientData("summarize: fewer than 2 months in range");
  return stats::summarize(values);
}

namespace {

std::size_t kind_position(ratios::Kind kind) {
  for (std::size_t i = 0; i < std::size(ratios::kAllKinds); ++i) {
    if (ratios::kAllKinds[i] == kind) return i;
  }
  return 0;
}

}  // namespace

RankingReport ranking_from_panels(const std::vector<double>& mean_returns,
                                  const std::vector<int>& frequencies) {
  const std::size_t k = std::size(ratios::kAllKinds);
  if (mean_returns.size() != k || frequencies.size() != k) {
    throw InsufficientData("ranking_from_panels: need one entry per ratio kind");
  }

  RankingReport out;
  out.kinds.assign(std::begin(ratios::kAllKinds), std::end(ratios::kAllKinds));
  out.mean_monthly_return = mean_returns;
  out.frequency = frequencies;
  out.rank_by_return.resize(k);
  out.rank_by_frequency.resize(k);

  // panel (a): descending mean return; ties broken by higher frequency,
  // then canonical order
  std::vector<std::size_t> by_return(k);
  for (std::size_t i = 0; i < k; ++i) by_return[i] = i;
  std::sort(by_return.begin(), by_return.end(), [&](std::size_t a, std::size_t b) {
    if (mean_returns[a] != mean_returns[b]) return mean_returns[a] > mean_returns[b];
    if (frequencies[a] != frequencies[b]) return frequencies[a] > frequencies[b];
    return a < b;
  });
  for (std::size_t pos = 0; pos < k; ++pos) {
    out.rank_by_return[by_return[pos]] = static_cast<int>(pos) + 1;
  }

  // panel (b): descending frequency; ties in canonical order
  std::vector<std::size_t> by_freq(k);
  for (std::size_t i = 0; i < k; ++i) by_freq[i] = i;
  std::sort(by_freq.begin(), by_freq.end(), [&](std::size_t a, std::size_t b) {
    if (frequencies[a] != frequencies[b]) return frequencies[a] > frequencies[b];
    return a < b;
  });
  for (std::size_t pos = 0; pos < k; ++pos) {
    out.rank_by_frequency[by_freq[pos]] = static_cast<int>(pos) + 1;
  }

  std::vector<double> xr(k), yr(k);
  for (std::size_t i = 0; i < k; ++i) {
    xr[i] = out.rank_by_return[i];
    yr[i] = out.rank_by_frequency[i];
  }
  const stats::Correlation corr = stats::pearson(xr, yr);
  out.correlation = corr.r;
  out.p_value = corr.p_value;
  return out;
}

RankingReport rank_ratios(const std::vector<BacktestReport>& reports) {
  if (reports.empty()) throw InsufficientData("rank_ratios: no reports");
  const std::size_t t_len = reports.front().months.size();
  for (const auto& r : reports) {
    if (r.months != reports.front().months) {
      throw InsufficientData("rank_ratios: reports cover different months");
    }
  }
  if (t_len == 0) throw InsufficientData("rank_ratios: empty reports");

  const std::size_t k = std::size(ratios::kAllKinds);
  std::vector<double> means(k, 0.0);
  std::vector<int> freq(k, 0);
  std::vector<bool> seen(k, false);

  std::vector<std::size_t> slot_of_report(reports.size());
  for (std::size_t ri = 0; ri < reports.size(); ++ri) {
    const std::size_t pos = kind_position(reports[ri].spec.kind);
    if (seen[pos]) throw InsufficientData("rank_ratios: duplicate ratio kind");
    seen[pos] = true;
    slot_of_report[ri] = pos;
    double s = 0.0;
    for (double v : reports[ri].monthly_return) s += v;
    means[pos] = s / static_cast<double>(t_len);
  }
  for (bool s : seen) {
    if (!s) throw InsufficientData("rank_ratios: need one report per ratio kind");
  }

  const auto timeline = best_ratio_timeline(reports);
  for (ratios::Kind kind : timeline) freq[kind_position(kind)] += 1;

  return ranking_from_panels(means, freq);
}

std::vector<ratios::Kind> best_ratio_timeline(const std::vector<BacktestReport>& reports) {
  if (reports.empty()) return {};
  const std::size_t t_len = reports.front().months.size();

  // canonical evaluation order decides ties
  std::vector<std::size_t> order(reports.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kind_position(reports[a].spec.kind) < kind_position(reports[b].spec.kind);
  });

  std::vector<ratios::Kind> timeline(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    std::size_t best = order[0];
    for (std::size_t oi = 1; oi < order.size(); ++oi) {
      if (reports[order[oi]].monthly_return[t] > reports[best].monthly_return[t]) {
        best = order[oi];
      }
    }
    timeline[t] = reports[best].spec.kind;
  }
  return timeline;
}

}  // namespace saa::backtest
