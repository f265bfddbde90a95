#include "saa/config.hpp"

#include <fstream>
#include <sstream>

namespace saa::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  }
}

long to_long(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_kv(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "run.seed") {
    config.seed = static_cast<std::uint64_t>(to_long(value, key));
  } else if (key == "run.out") {
    config.out_dir = value;
  } else if (key == "run.threads") {
    config.threads = static_cast<int>(to_long(value, key));
  } else if (key == "data.returns") {
    config.returns_path = value;
  } else if (key == "data.states") {
    config.states_path = value;
  } else if (key == "synthetic.enabled") {
    config.synthetic = value == "true" || value == "1";
  } else if (key == "synthetic.months") {
    config.synthetic = true;
    config.synthetic_config.months = static_cast<int>(to_long(value, key));
  } else if (key == "synthetic.days_per_month") {
    config.synthetic = true;
    config.synthetic_config.days_per_month = static_cast<int>(to_long(value, key));
  } else if (key == "synthetic.noise_vars") {
    config.synthetic = true;
    config.synthetic_config.noise_vars = static_cast<int>(to_long(value, key));
  } else if (key == "synthetic.mean_high") {
    config.synthetic = true;
    config.synthetic_config.mean_high = to_double(value, key);
  } else if (key == "synthetic.mean_low") {
    config.synthetic = true;
    config.synthetic_config.mean_low = to_double(value, key);
  } else if (key == "synthetic.daily_vol") {
    config.synthetic = true;
    config.synthetic_config.daily_vol = to_double(value, key);
  } else if (key == "schedule.train_len") {
    config.train_len = static_cast<std::size_t>(to_long(value, key));
  } else if (key == "schedule.test_len") {
    config.test_len = static_cast<std::size_t>(to_long(value, key));
  } else if (key == "ratio.kinds") {
    config.ratio_kinds.clear();
    for (const auto& token : split_list(value)) {
      config.ratio_kinds.push_back(ratios::parse_token(token));
    }
    if (config.ratio_kinds.empty()) throw ConfigError("ratio.kinds: empty list");
  } else if (key == "ratio.alpha") {
    config.alpha = to_double(value, key);
  } else if (key == "ratio.beta") {
    config.beta = to_double(value, key);
  } else if (key == "network.hidden_grid") {
    config.hidden_grid.clear();
    for (const auto& token : split_list(value)) {
      const long h = to_long(token, key);
      if (h < 1) throw ConfigError("network.hidden_grid: H must be >= 1");
      config.hidden_grid.push_back(static_cast<std::size_t>(h));
    }
    if (config.hidden_grid.empty()) throw ConfigError("network.hidden_grid: empty list");
  } else if (key == "network.output_mode") {
    config.output_mode = network::parse_output_mode(value);
  } else if (key == "train.gamma0") {
    config.train.gamma0 = to_double(value, key);
  } else if (key == "train.max_iters") {
    config.train.max_iters = static_cast<int>(to_long(value, key));
  } else if (key == "train.patience") {
    config.train.patience = static_cast<int>(to_long(value, key));
  } else if (key == "train.improvement_tol") {
    config.train.improvement_tol = to_double(value, key);
  } else if (key == "train.constraint_tol") {
    config.train.constraint_tol = to_double(value, key);
  } else if (key == "train.cv_folds") {
    config.train.cv_folds = static_cast<int>(to_long(value, key));
  } else if (key == "backtest.benchmarks") {
    config.benchmark_selectors = split_list(value);
  } else if (key == "backtest.sim_days") {
    config.sim_days = static_cast<int>(to_long(value, key));
  } else if (key == "backtest.sim_paths") {
    config.sim_paths = static_cast<int>(to_long(value, key));
  } else if (key == "backtest.crra_gamma") {
    config.crra_gamma = to_double(value, key);
  } else if (key == "interpret.method") {
    config.interpret_method = value;
  } else if (key == "interpret.permutations") {
    config.permutations = static_cast<int>(to_long(value, key));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file.is_open()) throw ConfigError("cannot open config file: " + path);

  RunConfig config;
  std::string line;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section == "synthetic") config.synthetic = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": key outside any section");
    }
    apply_kv(config, section + "." + key, value);
  }
  return config;
}

void RunConfig::validate() const {
  const bool has_paths = !returns_path.empty() || !states_path.empty();
  if (synthetic && has_paths) {
    throw ConfigError("config: choose either CSV data paths or the synthetic block, not both");
  }
  if (!synthetic && (returns_path.empty() || states_path.empty())) {
    throw ConfigError("config: need both data.returns and data.states, or a synthetic block");
  }
  if (train_len < 12) throw ConfigError("schedule.train_len must be >= 12");
  if (test_len < 1) throw ConfigError("schedule.test_len must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("ratio.alpha must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("ratio.beta must lie in (0,1)");
  if (sim_days < 1 || sim_paths < 1) throw ConfigError("backtest.sim_days/sim_paths must be >= 1");
  if (permutations < 1) throw ConfigError("interpret.permutations must be >= 1");
  if (interpret_method != "cw" && interpret_method != "pi" && interpret_method != "perturb") {
    throw ConfigError("interpret.method must be one of cw|pi|perturb");
  }

  training::TrainConfig check = train;
  check.hidden_grid = hidden_grid;
  check.validate();
}

}  // namespace saa::config
