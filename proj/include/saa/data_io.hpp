#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saa/types.hpp"

namespace saa {

// Dated daily simple returns for N assets.
struct ReturnPanel {
  std::vector<Date> dates;              // strictly increasing
  std::vector<std::string> asset_names; // size N >= 2
  Matrix returns;                       // D x N, every entry finite and > -1

  std::size_t days() const { return dates.size(); }
  std::size_t assets() const { return asset_names.size(); }
  void validate() const;
};

// Monthly observations of M state variables.
struct StateSeries {
  std::vector<YearMonth> months;           // consecutive calendar months
  std::vector<std::string> variable_names; // size M >= 1
  Matrix values;                           // T x M, finite

  std::size_t size() const { return months.size(); }
  std::size_t variables() const { return variable_names.size(); }
  void validate() const;
};

// One (z_t, R_{t+1}) pair: the state observed at the end of month t and the
// daily returns of the following calendar month.
struct AlignedPair {
  std::vector<double> state;  // length M
  Matrix month_returns;       // D_{t+1} x N, D_{t+1} >= 2
};

struct AlignedDataset {
  std::vector<YearMonth> month_keys;  // month of the state observation
  std::vector<AlignedPair> pairs;
  std::vector<std::string> asset_names;
  std::vector<std::string> variable_names;

  std::size_t size() const { return pairs.size(); }
  std::size_t assets() const { return asset_names.size(); }
  std::size_t variables() const { return variable_names.size(); }

  // Month of the returns side of pair t, i.e. month_keys[t] + 1.
  YearMonth return_month(std::size_t t) const { return month_keys[t].next(); }

  AlignedDataset slice(std::size_t begin, std::size_t end) const;
};

// Per-column training-window moments used to (de)standardize states.
struct StandardizationStats {
  std::vector<double> means;
  std::vector<double> stddevs;  // population, all > 0
};

ReturnPanel load_returns_csv(const std::string& path);
StateSeries load_states_csv(const std::string& path);
void write_returns_csv(const ReturnPanel& panel, const std::string& path);
void write_states_csv(const StateSeries& states, const std::string& path);

// Builds the four predictor series used throughout: default spread
// (BAA - AAA), term spread (10y - 1y), log dividend yield with D/P in
// percent before the log, and the log of price over its trailing 12-month
// mean. All five inputs must share the same consecutive month grid; the
// output starts after 12 months of history.
struct YieldSeries {
  std::vector<double> baa;
  std::vector<double> aaa;
  std::vector<double> y10;
  std::vector<double> y1;
};

StateSeries compute_state_variables(const std::vector<YearMonth>& months,
                                    std::span<const double> index_levels,
                                    std::span<const double> dividends12m,
                                    const YieldSeries& yields);

AlignedDataset align_months(const ReturnPanel& panel, const StateSeries& states);

// Standardize columns to zero mean / unit stddev. Without stats, the moments
// are computed from the input (training window) and returned for reuse.
std::pair<StateSeries, StandardizationStats> standardize_states(
    const StateSeries& states, const std::optional<StandardizationStats>& stats = {});

std::vector<double> standardize_vector(std::span<const double> raw,
                                       const StandardizationStats& stats);

// Two-asset regime panel: the sign of state variable 1 in month t decides
// which asset carries mean_high (vs mean_low) in month t+1; the other
// noise_vars state variables are independent N(0,1) noise.
struct SyntheticConfig {
  int months = 396;
  int days_per_month = 21;
  int noise_vars = 3;
  double mean_high = 0.01;   // monthly mean of the favored asset
  double mean_low = -0.01;   // monthly mean of the other asset
  double daily_vol = 0.008;  // per-asset daily stddev
};

std::pair<ReturnPanel, StateSeries> generate_synthetic(const SyntheticConfig& config,
                                                       std::uint64_t seed);

}  // namespace saa
