#pragma once

#include <string>
#include <vector>

#include "saa/backtest.hpp"
#include "saa/config.hpp"

namespace saa::pipeline {

// Load CSV data or generate the synthetic panel, then align states with
// the following month's returns. Synthetic inputs are echoed to
// <out>/synthetic_returns.csv and synthetic_states.csv for inspection.
AlignedDataset load_dataset(const config::RunConfig& config, bool echo_synthetic = true);

backtest::BacktestSettings settings_from(const config::RunConfig& config);

// Subcommand bodies shared by the CLI and the acceptance suite. All outputs
// land under config.out_dir and are byte-identical for identical configs.
void cmd_train(const config::RunConfig& config);
void cmd_backtest(const config::RunConfig& config);
void cmd_interpret(const config::RunConfig& config);
void cmd_report(const config::RunConfig& config);

// Serialized report round-trip (reports/report_<method>_<spec>.json).
std::string report_to_json(const backtest::BacktestReport& report);
backtest::BacktestReport report_from_json(const std::string& text);

std::string model_file_name(const ratios::RatioSpec& spec, std::size_t window_index);
std::string report_file_name(const std::string& method, const ratios::RatioSpec& spec);

}  // namespace saa::pipeline
