// Command-line front end: train networks, run walk-forward backtests against
// the traditional benchmarks, and emit interpretability tables. All
// randomness derives from one --seed, so re-running a command reproduces its
// output files byte for byte.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "saa/config.hpp"
#include "saa/pipeline.hpp"

namespace {

struct FlagValues {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // dotted key -> value
};

void add_shared_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--config", flags.config_path, "Config file (INI-style sections)");

  const auto kv = [&flags, cmd](const std::string& flag, const std::string& key,
                                const std::string& help) {
    auto* opt = cmd->add_option_function<std::string>(
        flag, [&flags, key](const std::string& value) { flags.overrides.push_back({key, value}); },
        help);
    opt->expected(1);
  };

  kv("--seed", "run.seed", "Global seed; one integer reproduces a whole study");
  kv("--out", "run.out", "Output directory");
  kv("--threads", "run.threads", "Worker threads (1 forces the serial paths)");
  kv("--returns", "data.returns", "Daily returns CSV (date,<asset>,...)");
  kv("--states", "data.states", "Monthly state CSV (month,<var>,...)");
  kv("--synthetic", "synthetic.enabled", "Use the synthetic regime panel (true/false)");
  kv("--synthetic-months", "synthetic.months", "Synthetic panel length in months");
  kv("--days-per-month", "synthetic.days_per_month", "Synthetic trading days per month");
  kv("--noise-vars", "synthetic.noise_vars", "Synthetic noise state variables");
  kv("--mean-high", "synthetic.mean_high", "Synthetic favored-asset monthly mean");
  kv("--mean-low", "synthetic.mean_low", "Synthetic other-asset monthly mean");
  kv("--daily-vol", "synthetic.daily_vol", "Synthetic per-asset daily volatility");
  kv("--train-len", "schedule.train_len", "Training window length in months");
  kv("--test-len", "schedule.test_len", "Test window length in months");
  kv("--ratio", "ratio.kinds", "Comma list of sharpe,mad,minimax,gini,cvar,rachev");
  kv("--alpha", "ratio.alpha", "Lower-tail fraction for cvar/rachev");
  kv("--beta", "ratio.beta", "Upper-tail fraction for rachev");
  kv("--hidden-grid", "network.hidden_grid", "Hidden widths, cross-validated when several");
  kv("--output-mode", "network.output_mode", "lagrangian | complement");
  kv("--gamma0", "train.gamma0", "Initial learning rate");
  kv("--max-iters", "train.max_iters", "Iteration cap");
  kv("--patience", "train.patience", "Iterations without improvement before stopping");
  kv("--improvement-tol", "train.improvement_tol", "Minimum improvement that resets patience");
  kv("--constraint-tol", "train.constraint_tol", "Budget-gap tolerance |x'e - 1|");
  kv("--cv-folds", "train.cv_folds", "Cross-validation folds");
  kv("--benchmarks", "backtest.benchmarks", "Comma list: var,factor,parametric,static:<pct>");
  kv("--sim-days", "backtest.sim_days", "Simulated days per month (benchmarks 1-2)");
  kv("--sim-paths", "backtest.sim_paths", "Simulated paths pooled per month");
  kv("--crra-gamma", "backtest.crra_gamma", "Risk aversion for the parametric benchmark");
  kv("--method", "interpret.method", "Interpretability method: cw | pi | perturb");
  kv("--permutations", "interpret.permutations", "Permutation repetitions (K)");
}

saa::config::RunConfig resolve(const FlagValues& flags) {
  saa::config::RunConfig config;
  if (!flags.config_path.empty()) {
    config = saa::config::load_config_file(flags.config_path);
  }
  for (const auto& [key, value] : flags.overrides) {
    saa::config::apply_kv(config, key, value);
  }
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"State-dependent asset allocation: ratio-maximizing network "
               "training, walk-forward backtests, and model interpretation"};
  app.require_subcommand(1);

  FlagValues train_flags, backtest_flags, interpret_flags, report_flags;
  auto* train_cmd = app.add_subcommand("train", "Train one network per rolling window");
  add_shared_flags(train_cmd, train_flags);
  auto* backtest_cmd =
      app.add_subcommand("backtest", "Walk-forward evaluation of the network and benchmarks");
  add_shared_flags(backtest_cmd, backtest_flags);
  auto* interpret_cmd =
      app.add_subcommand("interpret", "Variable importance and sensitivity of trained models");
  add_shared_flags(interpret_cmd, interpret_flags);
  auto* report_cmd =
      app.add_subcommand("report", "Regenerate summary tables from stored reports");
  add_shared_flags(report_cmd, report_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (train_cmd->parsed()) {
      saa::pipeline::cmd_train(resolve(train_flags));
    } else if (backtest_cmd->parsed()) {
      saa::pipeline::cmd_backtest(resolve(backtest_flags));
    } else if (interpret_cmd->parsed()) {
      saa::pipeline::cmd_interpret(resolve(interpret_flags));
    } else if (report_cmd->parsed()) {
      saa::pipeline::cmd_report(resolve(report_flags));
    }
  } catch (const saa::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
