#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "saa/benchmarks.hpp"
#include "saa/data_io.hpp"
#include "saa/ratios.hpp"
#include "saa/stats.hpp"
#include "saa/training.hpp"
#include "saa/types.hpp"

namespace saa::backtest {

struct Window {
  std::size_t train_begin = 0;  // indices into the aligned month sequence
  std::size_t train_end = 0;    // exclusive
  std::size_t test_begin = 0;
  std::size_t test_end = 0;     // exclusive
  YearMonth train_start;
  YearMonth train_stop;
  YearMonth test_start;
  YearMonth test_stop;
};

struct RollingSchedule {
  std::vector<Window> windows;
  std::size_t train_len = 156;
  std::size_t test_len = 60;
};

// First window starts at the first month; windows advance by test_len;
// trailing partial test windows are dropped.
RollingSchedule build_schedule(const std::vector<YearMonth>& months, std::size_t train_len,
                               std::size_t test_len);

struct BacktestReport {
  std::string method;  // "ann", "var", "factor", "parametric", "static:<pct>"
  ratios::RatioSpec spec;
  std::vector<YearMonth> months;  // return months of the test pairs
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> daily_returns;
  std::vector<double> mean_daily_return;
  std::vector<double> monthly_return;  // compounded within the month
  std::vector<double> ratio_values;
  std::vector<bool> degenerate;
  std::vector<bool> renormalized;
  std::vector<std::size_t> window_of_month;
};

struct BacktestSettings {
  network::NetworkShape shape;
  training::TrainConfig train;
  int sim_days = 21;
  int sim_paths = 200;
  double crra_gamma = 5.0;
};

// Walk-forward training and out-of-sample evaluation (per window: train on
// the training months, then map each test month's state to weights and score
// against realized returns).
BacktestReport run_ann(const RollingSchedule& schedule, const AlignedDataset& data,
                       const ratios::RatioSpec& spec, const BacktestSettings& settings);

// Same walk-forward evaluation with one of the traditional methods supplying
// the weights. Selector tokens: var | factor | parametric | static:<pct>.
BacktestReport run_benchmark(const RollingSchedule& schedule, const AlignedDataset& data,
                             const ratios::RatioSpec& spec, const std::string& method,
                             std::uint64_t seed, const BacktestSettings& settings);

struct MonthRange {
  YearMonth begin;
  YearMonth end;  // inclusive
};

stats::SummaryStats summarize(const BacktestReport& report,
                              const std::optional<MonthRange>& range = {});

struct RankingReport {
  std::vector<ratios::Kind> kinds;          // canonical order
  std::vector<double> mean_monthly_return;  // per kind
  std::vector<int> frequency;               // months won, per kind
  std::vector<int> rank_by_return;          // 1 = best
  std::vector<int> rank_by_frequency;
  double correlation = 0.0;
  double p_value = 1.0;
};

// Ranks from precomputed panel data; mean-return ties are broken by higher
// frequency, then canonical order (panel (b) already implies a frequency
// order). Exposed so published panel values can be fed directly.
RankingReport ranking_from_panels(const std::vector<double>& mean_returns,
                                  const std::vector<int>& frequencies);

// Panel (a): mean compounded monthly return per spec. Panel (b): months in
// which each spec's portfolio return was highest (ties to the canonical
// first). Reports must cover identical months.
RankingReport rank_ratios(const std::vector<BacktestReport>& reports);

std::vector<ratios::Kind> best_ratio_timeline(const std::vector<BacktestReport>& reports);

}  // namespace saa::backtest
