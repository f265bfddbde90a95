#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saa/data_io.hpp"
#include "saa/network.hpp"
#include "saa/ratios.hpp"
#include "saa/training.hpp"

namespace saa::config {

// Everything a study needs, resolvable from the sectioned key-value config
// file plus command-line overrides. Exactly one of the CSV paths pair or the
// synthetic block may be active.
struct RunConfig {
  // [run]
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int threads = 0;  // 0 = runtime default

  // [data]
  std::string returns_path;
  std::string states_path;

  // [synthetic]
  bool synthetic = false;
  SyntheticConfig synthetic_config;

  // [schedule]
  std::size_t train_len = 156;
  std::size_t test_len = 60;

  // [ratio]
  std::vector<ratios::Kind> ratio_kinds = {ratios::Kind::sharpe};
  double alpha = 0.5;
  double beta = 0.99;

  // [network]
  std::vector<std::size_t> hidden_grid = {4};
  network::OutputMode output_mode = network::OutputMode::complement;

  // [train]
  training::TrainConfig train;

  // [backtest]
  std::vector<std::string> benchmark_selectors = {"var", "factor", "parametric",
                                                  "static:0.60"};
  int sim_days = 21;
  int sim_paths = 200;
  double crra_gamma = 5.0;

  // [interpret]
  std::string interpret_method = "pi";  // cw | pi | perturb
  int permutations = 100;

  ratios::RatioSpec spec_for(ratios::Kind kind) const {
    return ratios::RatioSpec{kind, alpha, beta};
  }
  void validate() const;  // throws ConfigError
};

// Apply one "section.key" assignment; throws ConfigError on unknown keys or
// unparseable values.
void apply_kv(RunConfig& config, const std::string& dotted_key, const std::string& value);

// INI-style file: [section] headers, key = value lines, '#'/';' comments.
RunConfig load_config_file(const std::string& path);

std::vector<std::string> split_list(const std::string& csv);

}  // namespace saa::config
