#include "saa/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "saa/rng.hpp"

namespace saa {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& field, const std::string& context) {
  const std::string t = trim(field);
  if (t.empty()) throw NonFiniteInput("empty numeric cell " + context);
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw NonFiniteInput("unparseable number '" + t + "' " + context);
  }
  if (used != t.size()) throw NonFiniteInput("trailing junk in number '" + t + "' " + context);
  if (!std::isfinite(v)) throw NonFiniteInput("non-finite value " + context);
  return v;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void ReturnPanel::validate() const {
  if (asset_names.size() < 2) throw InsufficientData("return panel needs N >= 2 assets");
  if (dates.empty()) throw InsufficientData("return panel needs D >= 1 rows");
  if (returns.rows() != dates.size() || returns.cols() != asset_names.size()) {
    throw InsufficientData("return panel shape mismatch");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw MisalignedDates("return dates not strictly increasing at " + dates[i].str());
    }
  }
  for (double v : returns.data()) {
    if (!std::isfinite(v) || v <= -1.0) {
      throw NonFiniteInput("returns must be finite and > -1");
    }
  }
}

void StateSeries::validate() const {
  if (variable_names.empty()) throw InsufficientData("state series needs M >= 1 variables");
  if (months.empty()) throw InsufficientData("state series is empty");
  if (values.rows() != months.size() || values.cols() != variable_names.size()) {
    throw InsufficientData("state series shape mismatch");
  }
  for (std::size_t i = 1; i < months.size(); ++i) {
    if (months[i].index() != months[i - 1].index() + 1) {
      throw MisalignedDates("state months not consecutive at " + months[i].str());
    }
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) throw NonFiniteInput("state values must be finite");
  }
}

ReturnPanel load_returns_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file.is_open()) throw DataError("cannot open returns file: " + path);

  std::string line;
  if (!std::getline(file, line)) throw InsufficientData("empty returns file: " + path);
  auto header = split_csv_line(line);
  if (header.size() < 3 || trim(header[0]) != "date") {
    throw DataError("returns header must be 'date,<asset>,...' in " + path);
  }

  ReturnPanel panel;
  for (std::size_t i = 1; i < header.size(); ++i) panel.asset_names.push_back(trim(header[i]));

  std::vector<double> flat;
  std::size_t row = 0;
  while (std::getline(file, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(header.size()) + " in " + path);
    }
    panel.dates.push_back(Date::parse(trim(fields[0])));
    for (std::size_t j = 1; j < fields.size(); ++j) {
      flat.push_back(parse_number(fields[j], "at row " + std::to_string(row) + " in " + path));
    }
  }
  if (panel.dates.empty()) throw InsufficientData("no return rows in " + path);

  // sort rows by date, then validate (catches duplicates)
  std::vector<std::size_t> order(panel.dates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return panel.dates[a] < panel.dates[b]; });

  const std::size_t n = panel.asset_names.size();
  panel.returns = Matrix(panel.dates.size(), n);
  std::vector<Date> sorted_dates(panel.dates.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_dates[i] = panel.dates[order[i]];
    for (std::size_t j = 0; j < n; ++j) panel.returns(i, j) = flat[order[i] * n + j];
  }
  panel.dates = std::move(sorted_dates);
  panel.validate();
  return panel;
}

StateSeries load_states_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file.is_open()) throw DataError("cannot open states file: " + path);

  std::string line;
  if (!std::getline(file, line)) throw InsufficientData("empty states file: " + path);
  auto header = split_csv_line(line);
  if (header.size() < 2 || trim(header[0]) != "month") {
    throw DataError("states header must be 'month,<var>,...' in " + path);
  }

  StateSeries states;
  for (std::size_t i = 1; i < header.size(); ++i) states.variable_names.push_back(trim(header[i]));

  std::vector<double> flat;
  std::size_t row = 0;
  while (std::getline(file, line)) {
    if (trim(line).empty()) continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(header.size()) + " in " + path);
    }
    states.months.push_back(YearMonth::parse(trim(fields[0])));
    for (std::size_t j = 1; j < fields.size(); ++j) {
      flat.push_back(parse_number(fields[j], "at row " + std::to_string(row) + " in " + path));
    }
  }
  if (states.months.empty()) throw InsufficientData("no state rows in " + path);

  const std::size_t m = states.variable_names.size();
  states.values = Matrix(states.months.size(), m);
  std::copy(flat.begin(), flat.end(), states.values.data().begin());
  states.validate();
  return states;
}

void write_returns_csv(const ReturnPanel& panel, const std::string& path) {
  std::ofstream file(path);
  if (!file.is_open()) throw DataError("cannot write " + path);
  file << "date";
  for (const auto& name : panel.asset_names) file << ',' << name;
  file << '\n';
  for (std::size_t i = 0; i < panel.days(); ++i) {
    file << panel.dates[i].str();
    for (std::size_t j = 0; j < panel.assets(); ++j) {
      file << ',' << format_number(panel.returns(i, j));
    }
    file << '\n';
  }
}

void write_states_csv(const StateSeries& states, const std::string& path) {
  std::ofstream file(path);
  if (!file.is_open()) throw DataError("cannot write " + path);
  file << "month";
  for (const auto& name : states.variable_names) file << ',' << name;
  file << '\n';
  for (std::size_t i = 0; i < states.size(); ++i) {
    file << states.months[i].str();
    for (std::size_t j = 0; j < states.variables(); ++j) {
      file << ',' << format_number(states.values(i, j));
    }
    file << '\n';
  }
}

StateSeries compute_state_variables(const std::vector<YearMonth>& months,
                                    std::span<const double> index_levels,
                                    std::span<const double> dividends12m,
                                    const YieldSeries& yields) {
  const std::size_t t_total = months.size();
  if (index_levels.size() != t_total || dividends12m.size() != t_total ||
      yields.baa.size() != t_total || yields.aaa.size() != t_total ||
      yields.y10.size() != t_total || yields.y1.size() != t_total) {
    throw MisalignedDates("compute_state_variables: input series lengths differ");
  }
  if (t_total < 13) {
    throw InsufficientData("compute_state_variables: need >= 12 months of history plus output");
  }
  for (std::size_t i = 1; i < t_total; ++i) {
    if (months[i].index() != months[i - 1].index() + 1) {
      throw MisalignedDates("compute_state_variables: months not consecutive");
    }
  }
  for (double p : index_levels) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw NonFiniteInput("compute_state_variables: index levels must be positive");
    }
  }

  StateSeries out;
  out.variable_names = {"default_spread", "term_spread", "dividend_yield", "trend"};
  const std::size_t first = 12;
  out.values = Matrix(t_total - first, 4);
  for (std::size_t t = first; t < t_total; ++t) {
    out.months.push_back(months[t]);
    const std::size_t r = t - first;
    out.values(r, 0) = yields.baa[t] - yields.aaa[t];
    out.values(r, 1) = yields.y10[t] - yields.y1[t];
    // D/P in percent before the log
    const double dp_pct = 100.0 * dividends12m[t] / index_levels[t];
    if (!(dp_pct > 0.0)) {
      throw NonFiniteInput("compute_state_variables: non-positive dividend-to-price at " +
                           months[t].str());
    }
    out.values(r, 2) = std::log(dp_pct);
    double trailing = 0.0;
    for (std::size_t k = t - 12; k < t; ++k) trailing += index_levels[k];
    trailing /= 12.0;
    out.values(r, 3) = std::log(index_levels[t] / trailing);
  }
  out.validate();
  return out;
}

AlignedDataset align_months(const ReturnPanel& panel, const StateSeries& states) {
  panel.validate();
  states.validate();

  // bucket return rows by calendar month
  std::vector<std::pair<int, std::vector<std::size_t>>> buckets;
  for (std::size_t i = 0; i < panel.days(); ++i) {
    const int idx = panel.dates[i].ym().index();
    if (buckets.empty() || buckets.back().first != idx) buckets.push_back({idx, {}});
    buckets.back().second.push_back(i);
  }

  AlignedDataset out;
  out.asset_names = panel.asset_names;
  out.variable_names = states.variable_names;
  const std::size_t n = panel.assets();

  for (std::size_t t = 0; t < states.size(); ++t) {
    const int want = states.months[t].index() + 1;
    const auto it = std::find_if(buckets.begin(), buckets.end(),
                                 [want](const auto& b) { return b.first == want; });
    if (it == buckets.end() || it->second.size() < 2) continue;

    AlignedPair pair;
    pair.state.resize(states.variables());
    for (std::size_t j = 0; j < states.variables(); ++j) pair.state[j] = states.values(t, j);
    pair.month_returns = Matrix(it->second.size(), n);
    for (std::size_t r = 0; r < it->second.size(); ++r) {
      for (std::size_t j = 0; j < n; ++j) {
        pair.month_returns(r, j) = panel.returns(it->second[r], j);
      }
    }
    out.month_keys.push_back(states.months[t]);
    out.pairs.push_back(std::move(pair));
  }

  if (out.pairs.empty()) {
    throw InsufficientData("align_months: no state month has a complete following return month");
  }
  return out;
}

AlignedDataset AlignedDataset::slice(std::size_t begin, std::size_t end) const {
  AlignedDataset out;
  out.asset_names = asset_names;
  out.variable_names = variable_names;
  out.month_keys.assign(month_keys.begin() + begin, month_keys.begin() + end);
  out.pairs.assign(pairs.begin() + begin, pairs.begin() + end);
  return out;
}

std::pair<StateSeries, StandardizationStats> standardize_states(
    const StateSeries& states, const std::optional<StandardizationStats>& stats_in) {
  states.validate();
  const std::size_t t_len = states.size();
  const std::size_t m = states.variables();

  StandardizationStats stats;
  if (stats_in) {
    if (stats_in->means.size() != m || stats_in->stddevs.size() != m) {
      throw DegenerateInput("standardize_states: stats dimension mismatch");
    }
    stats = *stats_in;
  } else {
    stats.means.resize(m);
    stats.stddevs.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < t_len; ++i) s += states.values(i, j);
      const double mu = s / static_cast<double>(t_len);
      double ss = 0.0;
      for (std::size_t i = 0; i < t_len; ++i) {
        const double d = states.values(i, j) - mu;
        ss += d * d;
      }
      const double sd = std::sqrt(ss / static_cast<double>(t_len));
      if (sd <= 0.0) {
        throw DegenerateInput("standardize_states: zero-variance column '" +
                              states.variable_names[j] + "'");
      }
      stats.means[j] = mu;
      stats.stddevs[j] = sd;
    }
  }

  StateSeries out = states;
  for (std::size_t i = 0; i < t_len; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.values(i, j) = (states.values(i, j) - stats.means[j]) / stats.stddevs[j];
    }
  }
  return {std::move(out), std::move(stats)};
}

std::vector<double> standardize_vector(std::span<const double> raw,
                                       const StandardizationStats& stats) {
  if (raw.size() != stats.means.size()) {
    throw DegenerateInput("standardize_vector: dimension mismatch");
  }
  std::vector<double> z(raw.size());
  for (std::size_t j = 0; j < raw.size(); ++j) {
    z[j] = (raw[j] - stats.means[j]) / stats.stddevs[j];
  }
  return z;
}

std::pair<ReturnPanel, StateSeries> generate_synthetic(const SyntheticConfig& config,
                                                       std::uint64_t seed) {
  if (config.months < 1 || config.days_per_month < 2 || config.noise_vars < 0 ||
      config.daily_vol < 0.0) {
    throw ConfigError("generate_synthetic: invalid config");
  }

  Rng rng(seed);
  const int t_total = config.months;
  const int m = 1 + config.noise_vars;
  const YearMonth start{1986, 1};

  StateSeries states;
  states.variable_names.push_back("signal");
  for (int j = 1; j < m; ++j) states.variable_names.push_back("noise" + std::to_string(j));
  states.values = Matrix(t_total, m);
  for (int t = 0; t < t_total; ++t) {
    states.months.push_back(YearMonth::from_index(start.index() + t));
    for (int j = 0; j < m; ++j) states.values(t, j) = rng.normal();
  }

  // Returns for month t+1 follow the regime set by signal_t. Daily means are
  // the monthly means divided by the day count.
  ReturnPanel panel;
  panel.asset_names = {"asset1", "asset2"};
  panel.returns = Matrix(static_cast<std::size_t>(t_total) * config.days_per_month, 2);
  std::size_t row = 0;
  for (int t = 0; t < t_total; ++t) {
    const YearMonth rm = YearMonth::from_index(start.index() + t + 1);
    const bool asset1_high = states.values(t, 0) > 0.0;
    const double mu1 = (asset1_high ? config.mean_high : config.mean_low) / config.days_per_month;
    const double mu2 = (asset1_high ? config.mean_low : config.mean_high) / config.days_per_month;
    for (int d = 0; d < config.days_per_month; ++d, ++row) {
      panel.dates.push_back(Date{rm.year, rm.month, d + 1});
      panel.returns(row, 0) = mu1 + config.daily_vol * rng.normal();
      panel.returns(row, 1) = mu2 + config.daily_vol * rng.normal();
    }
  }

  panel.validate();
  states.validate();
  return {std::move(panel), std::move(states)};
}

}  // namespace saa
