#include "saa/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "saa/interpret.hpp"
#include "saa/parallel.hpp"
#include "saa/rng.hpp"

namespace saa::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file.is_open()) throw DataError("cannot write " + path.string());
  file << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file.is_open()) throw DataError("cannot read " + path.string());
  std::stringstream ss;
  ss << file.rdbuf();
  return ss.str();
}

std::string sanitize(const std::string& token) {
  std::string out = token;
  for (char& c : out) {
    if (c == ':' || c == '.') c = '_';
  }
  return out;
}

json spec_to_json(const ratios::RatioSpec& spec) {
  return json{{"kind", ratios::to_token(spec.kind)}, {"alpha", spec.alpha},
              {"beta", spec.beta}};
}

ratios::RatioSpec spec_from_json(const json& doc) {
  ratios::RatioSpec spec;
  spec.kind = ratios::parse_token(doc.at("kind").get<std::string>());
  spec.alpha = doc.at("alpha").get<double>();
  spec.beta = doc.at("beta").get<double>();
  return spec;
}

json stats_to_json(const StandardizationStats& stats) {
  return json{{"means", stats.means}, {"stddevs", stats.stddevs}};
}

StandardizationStats stats_from_json(const json& doc) {
  StandardizationStats stats;
  stats.means = doc.at("means").get<std::vector<double>>();
  stats.stddevs = doc.at("stddevs").get<std::vector<double>>();
  return stats;
}

struct WindowedModel {
  training::TrainedModel model;
  std::size_t window_index = 0;
};

// Standardize one training slice in place and return the stats.
StandardizationStats standardize_slice(AlignedDataset& slice) {
  StateSeries states;
  states.months = slice.month_keys;
  states.variable_names = slice.variable_names;
  states.values = Matrix(slice.size(), slice.variables());
  for (std::size_t t = 0; t < slice.size(); ++t) {
    for (std::size_t j = 0; j < slice.variables(); ++j) {
      states.values(t, j) = slice.pairs[t].state[j];
    }
  }
  auto [standardized, stats] = standardize_states(states);
  for (std::size_t t = 0; t < slice.size(); ++t) {
    for (std::size_t j = 0; j < slice.variables(); ++j) {
      slice.pairs[t].state[j] = standardized.values(t, j);
    }
  }
  return stats;
}

WindowedModel train_window(const AlignedDataset& data, const backtest::Window& window,
                           std::size_t window_index, const ratios::RatioSpec& spec,
                           const config::RunConfig& config) {
  AlignedDataset train_slice = data.slice(window.train_begin, window.train_end);
  const StandardizationStats stats = standardize_slice(train_slice);

  training::TrainConfig train_config = config.train;
  train_config.hidden_grid = config.hidden_grid;
  train_config.seed = config.seed + window_index * 1000003ULL;

  network::NetworkShape shape;
  shape.inputs = data.variables();
  shape.assets = data.assets();
  shape.mode = config.output_mode;
  if (train_config.hidden_grid.size() > 1) {
    shape.hidden = training::cross_validate(train_slice, spec, shape, train_config);
    train_config.hidden_grid = {shape.hidden};
  } else {
    shape.hidden = train_config.hidden_grid[0];
  }

  WindowedModel out;
  out.model = training::train(train_slice, stats, spec, shape, train_config);
  out.window_index = window_index;
  return out;
}

json model_to_json_doc(const WindowedModel& wm, const backtest::Window& window,
                       const config::RunConfig& config) {
  json doc;
  doc["kind"] = "statealloc-model";
  doc["spec"] = spec_to_json(wm.model.spec);
  doc["window"] = {{"index", wm.window_index},
                   {"train_start", window.train_start.str()},
                   {"train_stop", window.train_stop.str()},
                   {"test_start", window.test_start.str()},
                   {"test_stop", window.test_stop.str()}};
  doc["network"] = json::parse(network::to_json(wm.model.params));
  doc["stats"] = stats_to_json(wm.model.stats);
  doc["train_config"] = {{"gamma0", config.train.gamma0},
                         {"max_iters", config.train.max_iters},
                         {"patience", config.train.patience},
                         {"improvement_tol", config.train.improvement_tol},
                         {"constraint_tol", config.train.constraint_tol},
                         {"hidden", wm.model.params.shape.hidden},
                         {"seed", config.seed + wm.window_index * 1000003ULL}};
  doc["objective_trace"] = wm.model.objective_trace;
  doc["converged"] = wm.model.converged;
  return doc;
}

training::TrainedModel model_from_json_doc(const json& doc, std::size_t* window_index) {
  training::TrainedModel model;
  model.spec = spec_from_json(doc.at("spec"));
  model.params = network::params_from_json(doc.at("network").dump());
  model.stats = stats_from_json(doc.at("stats"));
  model.objective_trace = doc.at("objective_trace").get<std::vector<double>>();
  model.converged = doc.at("converged").get<bool>();
  if (window_index) *window_index = doc.at("window").at("index").get<std::size_t>();
  return model;
}

}  // namespace

AlignedDataset load_dataset(const config::RunConfig& config, bool echo_synthetic) {
  config.validate();
  ReturnPanel panel;
  StateSeries states;
  if (config.synthetic) {
    auto generated = generate_synthetic(config.synthetic_config, config.seed);
    panel = std::move(generated.first);
    states = std::move(generated.second);
    if (echo_synthetic) {
      const fs::path out(config.out_dir);
      fs::create_directories(out);
      write_returns_csv(panel, (out / "synthetic_returns.csv").string());
      write_states_csv(states, (out / "synthetic_states.csv").string());
    }
  } else {
    panel = load_returns_csv(config.returns_path);
    states = load_states_csv(config.states_path);
  }
  return align_months(panel, states);
}

backtest::BacktestSettings settings_from(const config::RunConfig& config) {
  backtest::BacktestSettings settings;
  settings.shape.mode = config.output_mode;
  settings.shape.hidden = config.hidden_grid[0];
  settings.train = config.train;
  settings.train.hidden_grid = config.hidden_grid;
  settings.train.seed = config.seed;
  settings.sim_days = config.sim_days;
  settings.sim_paths = config.sim_paths;
  settings.crra_gamma = config.crra_gamma;
  return settings;
}

std::string model_file_name(const ratios::RatioSpec& spec, std::size_t window_index) {
  return "model_" + ratios::to_token(spec.kind) + "_w" + std::to_string(window_index) + ".json";
}

std::string report_file_name(const std::string& method, const ratios::RatioSpec& spec) {
  return "report_" + sanitize(method) + "_" + ratios::to_token(spec.kind) + ".json";
}

void cmd_train(const config::RunConfig& config) {
  if (config.threads) exec::set_threads(config.threads);
  const AlignedDataset data = load_dataset(config);
  const backtest::RollingSchedule schedule =
      backtest::build_schedule(data.month_keys, config.train_len, config.test_len);

  const fs::path models_dir = fs::path(config.out_dir) / "models";
  for (ratios::Kind kind : config.ratio_kinds) {
    const ratios::RatioSpec spec = config.spec_for(kind);
    for (std::size_t wi = 0; wi < schedule.windows.size(); ++wi) {
      const WindowedModel wm = train_window(data, schedule.windows[wi], wi, spec, config);
      const json doc = model_to_json_doc(wm, schedule.windows[wi], config);
      write_text(models_dir / model_file_name(spec, wi), doc.dump(2) + "\n");
    }
  }
}

std::string report_to_json(const backtest::BacktestReport& report) {
  json doc;
  doc["kind"] = "statealloc-report";
  doc["method"] = report.method;
  doc["spec"] = spec_to_json(report.spec);
  json months = json::array();
  for (const auto& m : report.months) months.push_back(m.str());
  doc["months"] = std::move(months);
  doc["weights"] = report.weights;
  doc["daily_returns"] = report.daily_returns;
  doc["mean_daily_return"] = report.mean_daily_return;
  doc["monthly_return"] = report.monthly_return;
  doc["ratio_values"] = report.ratio_values;
  doc["degenerate"] = report.degenerate;
  doc["renormalized"] = report.renormalized;
  doc["window_of_month"] = report.window_of_month;

  const auto summary_json = [](const std::vector<double>& values) {
    const stats::SummaryStats s = stats::summarize(values);
    json out{{"mean", s.mean}, {"stddev", s.stddev}};
    if (s.has_shape) {
      out["skewness"] = s.skewness;
      out["kurtosis"] = s.kurtosis;
    } else {
      out["skewness"] = nullptr;
      out["kurtosis"] = nullptr;
    }
    return out;
  };
  doc["summary"] = summary_json(report.ratio_values);

  json subperiods = json::array();
  const std::size_t n_windows =
      report.window_of_month.empty()
          ? 0
          : *std::max_element(report.window_of_month.begin(), report.window_of_month.end()) + 1;
  for (std::size_t wi = 0; wi < n_windows; ++wi) {
    std::vector<double> values;
    std::string first, last;
    for (std::size_t t = 0; t < report.months.size(); ++t) {
      if (report.window_of_month[t] != wi) continue;
      if (values.empty()) first = report.months[t].str();
      last = report.months[t].str();
      values.push_back(report.ratio_values[t]);
    }
    if (values.size() < 2) continue;
    json sub = summary_json(values);
    sub["window"] = wi;
    sub["from"] = first;
    sub["to"] = last;
    subperiods.push_back(std::move(sub));
  }
  doc["subperiod_summaries"] = std::move(subperiods);
  return doc.dump(2) + "\n";
}

backtest::BacktestReport report_from_json(const std::string& text) {
  const json doc = json::parse(text);
  backtest::BacktestReport report;
  report.method = doc.at("method").get<std::string>();
  report.spec = spec_from_json(doc.at("spec"));
  for (const auto& m : doc.at("months")) {
    report.months.push_back(YearMonth::parse(m.get<std::string>()));
  }
  report.weights = doc.at("weights").get<std::vector<std::vector<double>>>();
  report.daily_returns = doc.at("daily_returns").get<std::vector<std::vector<double>>>();
  report.mean_daily_return = doc.at("mean_daily_return").get<std::vector<double>>();
  report.monthly_return = doc.at("monthly_return").get<std::vector<double>>();
  report.ratio_values = doc.at("ratio_values").get<std::vector<double>>();
  report.degenerate = doc.at("degenerate").get<std::vector<bool>>();
  report.renormalized = doc.at("renormalized").get<std::vector<bool>>();
  report.window_of_month = doc.at("window_of_month").get<std::vector<std::size_t>>();
  return report;
}

namespace {

void write_reports_and_tables(const std::vector<backtest::BacktestReport>& reports,
                              const config::RunConfig& config, bool write_report_files) {
  const fs::path out(config.out_dir);
  fs::create_directories(out);

  if (write_report_files) {
    for (const auto& report : reports) {
      write_text(out / "reports" / report_file_name(report.method, report.spec),
                 report_to_json(report));
    }
  }

  // ratio_timeseries.csv: one row per month x method x spec
  {
    std::string csv = "month,method,spec,ratio_value,degenerate\n";
    for (const auto& report : reports) {
      for (std::size_t t = 0; t < report.months.size(); ++t) {
        csv += report.months[t].str() + "," + report.method + "," +
               ratios::to_token(report.spec.kind) + "," + fmt(report.ratio_values[t]) + "," +
               (report.degenerate[t] ? "1" : "0") + "\n";
      }
    }
    write_text(out / "ratio_timeseries.csv", csv);
  }

  // weights_timeseries.csv
  {
    std::string csv = "month,method,spec";
    const std::size_t n = reports.empty() ? 0 : reports.front().weights.front().size();
    for (std::size_t a = 0; a < n; ++a) csv += ",w" + std::to_string(a + 1);
    csv += "\n";
    for (const auto& report : reports) {
      for (std::size_t t = 0; t < report.months.size(); ++t) {
        csv += report.months[t].str() + "," + report.method + "," +
               ratios::to_token(report.spec.kind);
        for (double w : report.weights[t]) csv += "," + fmt(w);
        csv += "\n";
      }
    }
    write_text(out / "weights_timeseries.csv", csv);
  }

  // summary per spec: ANN versus each benchmark, stars against the best one
  std::map<std::string, std::vector<const backtest::BacktestReport*>> by_spec;
  for (const auto& report : reports) {
    by_spec[ratios::to_token(report.spec.kind)].push_back(&report);
  }

  std::string summary_csv = "spec,method,mean,stddev,skewness,kurtosis,stars,p_value\n";
  std::string summary_txt;
  for (const auto& [spec_token, group] : by_spec) {
    const backtest::BacktestReport* ann = nullptr;
    const backtest::BacktestReport* best_bench = nullptr;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (const auto* report : group) {
      if (report->method == "ann") {
        ann = report;
        continue;
      }
      const double m = stats::mean(report->ratio_values);
      if (m > best_mean) {
        best_mean = m;
        best_bench = report;
      }
    }

    std::string stars;
    double p_value = std::numeric_limits<double>::quiet_NaN();
    if (ann && best_bench) {
      try {
        const stats::PairedTest test =
            stats::mean_difference_test(ann->ratio_values, best_bench->ratio_values);
        stars = test.stars;
        p_value = test.p_value;
      } catch (const DegenerateInput&) {
        stars = "";
      }
    }

    summary_txt += "Panel: " + spec_token + "\n";
    summary_txt += "  method        mean      stddev    skew      kurt\n";
    for (const auto* report : group) {
      const stats::SummaryStats s = stats::summarize(report->ratio_values);
      char line[160];
      std::snprintf(line, sizeof(line), "  %-12s %9.4f %9.4f %9.4f %9.4f%s\n",
                    report->method.c_str(), s.mean, s.stddev, s.skewness, s.kurtosis,
                    report->method == "ann" && !stars.empty() ? (" " + stars).c_str() : "");
      summary_txt += line;

      summary_csv += spec_token + "," + report->method + "," + fmt(s.mean) + "," +
                     fmt(s.stddev) + "," + (s.has_shape ? fmt(s.skewness) : "") + "," +
                     (s.has_shape ? fmt(s.kurtosis) : "") + ",";
      if (report->method == "ann") {
        summary_csv += stars + "," + (std::isnan(p_value) ? "" : fmt(p_value));
      } else {
        summary_csv += ",";
      }
      summary_csv += "\n";
    }
    if (best_bench) {
      summary_txt += "  stars: ann vs best benchmark (" + best_bench->method + ")";
      if (!std::isnan(p_value)) summary_txt += ", p = " + fmt(p_value);
      summary_txt += stars.empty() ? " (not significant at 10%)\n" : " " + stars + "\n";
    }
    summary_txt += "\n";
  }
  write_text(out / "summary.csv", summary_csv);
  write_text(out / "summary.txt", summary_txt);

  // Table-5-style ranking and the best-ratio timeline need the ANN report of
  // every ratio kind
  std::vector<backtest::BacktestReport> ann_reports;
  for (const auto& report : reports) {
    if (report.method == "ann") ann_reports.push_back(report);
  }
  if (ann_reports.size() == std::size(ratios::kAllKinds)) {
    const backtest::RankingReport ranking = backtest::rank_ratios(ann_reports);
    std::string csv = "spec,mean_monthly_return_pct,frequency,rank_by_return,rank_by_frequency\n";
    for (std::size_t i = 0; i < ranking.kinds.size(); ++i) {
      csv += ratios::to_token(ranking.kinds[i]) + "," +
             fmt(100.0 * ranking.mean_monthly_return[i]) + "," +
             std::to_string(ranking.frequency[i]) + "," +
             std::to_string(ranking.rank_by_return[i]) + "," +
             std::to_string(ranking.rank_by_frequency[i]) + "\n";
    }
    csv += "# rank correlation," + fmt(ranking.correlation) + ",p," + fmt(ranking.p_value) + "\n";
    write_text(out / "ranking.csv", csv);

    const auto timeline = backtest::best_ratio_timeline(ann_reports);
    std::string best_csv = "month,best_spec\n";
    for (std::size_t t = 0; t < timeline.size(); ++t) {
      best_csv += ann_reports.front().months[t].str() + "," + ratios::to_token(timeline[t]) + "\n";
    }
    write_text(out / "best_ratio.csv", best_csv);
  }
}

}  // namespace

void cmd_backtest(const config::RunConfig& config) {
  if (config.threads) exec::set_threads(config.threads);
  const AlignedDataset data = load_dataset(config);
  const backtest::RollingSchedule schedule =
      backtest::build_schedule(data.month_keys, config.train_len, config.test_len);
  const backtest::BacktestSettings settings = settings_from(config);

  std::vector<backtest::BacktestReport> reports;
  for (ratios::Kind kind : config.ratio_kinds) {
    const ratios::RatioSpec spec = config.spec_for(kind);
    reports.push_back(backtest::run_ann(schedule, data, spec, settings));
    for (const std::string& method : config.benchmark_selectors) {
      reports.push_back(
          backtest::run_benchmark(schedule, data, spec, method, config.seed, settings));
    }
  }
  write_reports_and_tables(reports, config, true);
}

void cmd_interpret(const config::RunConfig& config) {
  if (config.threads) exec::set_threads(config.threads);
  const AlignedDataset data = load_dataset(config, false);
  const backtest::RollingSchedule schedule =
      backtest::build_schedule(data.month_keys, config.train_len, config.test_len);

  const fs::path models_dir = fs::path(config.out_dir) / "models";
  const fs::path out(config.out_dir);

  const bool want_cw = config.interpret_method == "cw";
  const bool want_pi = config.interpret_method == "pi";

  std::string importance_csv = "method,spec,window,test_start,test_stop,variable,ri,rank\n";
  std::string sensitivity_csv = "spec,window,test_start,test_stop,variable,shift_multiplier,pct_change\n";

  for (ratios::Kind kind : config.ratio_kinds) {
    const ratios::RatioSpec spec = config.spec_for(kind);
    std::vector<std::vector<double>> window_ris;           // per window, per variable
    std::vector<std::vector<double>> window_curves;        // per window, variable x shift
    const std::size_t m = data.variables();

    for (std::size_t wi = 0; wi < schedule.windows.size(); ++wi) {
      const fs::path model_path = models_dir / model_file_name(spec, wi);
      if (!fs::exists(model_path)) {
        throw DataError("missing trained model " + model_path.string() +
                        " (run the train command first)");
      }
      const training::TrainedModel model =
          model_from_json_doc(json::parse(read_text(model_path)), nullptr);
      const backtest::Window& window = schedule.windows[wi];
      const AlignedDataset oos = data.slice(window.test_begin, window.test_end);
      const std::string label = "w" + std::to_string(wi);
      const std::string range = window.test_start.next().str() + "," + window.test_stop.next().str();

      if (want_cw || want_pi) {
        const interpret::ImportanceReport report =
            want_cw ? interpret::connection_weights(model.params)
                    : interpret::permutation_importance(model, oos, config.permutations,
                                                        Rng::derive(config.seed, 90001 + wi));
        window_ris.push_back(report.ri);
        std::vector<std::size_t> rank_of(m);
        for (std::size_t pos = 0; pos < m; ++pos) rank_of[report.ranking[pos]] = pos + 1;
        for (std::size_t v = 0; v < m; ++v) {
          importance_csv += report.method + "," + ratios::to_token(kind) + "," + label + "," +
                            range + "," + data.variable_names[v] + "," + fmt(report.ri[v]) +
                            "," + std::to_string(rank_of[v]) + "\n";
        }
      } else {
        std::vector<double> flat;
        for (std::size_t v = 0; v < m; ++v) {
          const interpret::SensitivityCurve curve = interpret::perturb_sensitivity(model, oos, v);
          for (std::size_t si = 0; si < curve.shifts.size(); ++si) {
            sensitivity_csv += ratios::to_token(kind) + "," + label + "," + range + "," +
                               data.variable_names[v] + "," +
                               std::to_string(curve.shifts[si]) + "," +
                               fmt(curve.pct_change[si]) + "\n";
            flat.push_back(curve.pct_change[si]);
          }
        }
        window_curves.push_back(std::move(flat));
      }
    }

    // Table-4-style "Average" rows across windows
    if (!window_ris.empty()) {
      std::vector<double> avg(m, 0.0);
      for (const auto& ris : window_ris) {
        for (std::size_t v = 0; v < m; ++v) avg[v] += ris[v];
      }
      for (double& v : avg) v /= static_cast<double>(window_ris.size());
      std::vector<double> key(m);
      for (std::size_t v = 0; v < m; ++v) key[v] = want_cw ? std::abs(avg[v]) : avg[v];
      std::vector<std::size_t> order(m);
      for (std::size_t v = 0; v < m; ++v) order[v] = v;
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
      std::vector<std::size_t> rank_of(m);
      for (std::size_t pos = 0; pos < m; ++pos) rank_of[order[pos]] = pos + 1;
      for (std::size_t v = 0; v < m; ++v) {
        importance_csv += std::string(want_cw ? "connection_weights" : "permutation") + "," +
                          ratios::to_token(kind) + ",average,,," + data.variable_names[v] +
                          "," + fmt(avg[v]) + "," + std::to_string(rank_of[v]) + "\n";
      }
    }
    if (!window_curves.empty()) {
      const std::size_t cols = window_curves.front().size();
      std::vector<double> avg(cols, 0.0);
      for (const auto& flat : window_curves) {
        for (std::size_t i = 0; i < cols; ++i) avg[i] += flat[i];
      }
      for (double& v : avg) v /= static_cast<double>(window_curves.size());
      static const int kShifts[] = {-3, -2, -1, 0, 1, 2, 3};
      for (std::size_t v = 0; v < m; ++v) {
        for (std::size_t si = 0; si < 7; ++si) {
          sensitivity_csv += ratios::to_token(kind) + ",average,,," + data.variable_names[v] +
                             "," + std::to_string(kShifts[si]) + "," + fmt(avg[v * 7 + si]) +
                             "\n";
        }
      }
    }
  }

  if (want_cw || want_pi) {
    write_text(out / "importance.csv", importance_csv);
  } else {
    write_text(out / "sensitivity.csv", sensitivity_csv);
  }
}

void cmd_report(const config::RunConfig& config) {
  const fs::path reports_dir = fs::path(config.out_dir) / "reports";
  if (!fs::exists(reports_dir)) {
    throw DataError("no reports directory under " + config.out_dir +
                    " (run the backtest command first)");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(reports_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no report files in " + reports_dir.string());

  std::vector<backtest::BacktestReport> reports;
  reports.reserve(files.size());
  for (const auto& file : files) reports.push_back(report_from_json(read_text(file)));
  write_reports_and_tables(reports, config, false);
}

}  // namespace saa::pipeline
