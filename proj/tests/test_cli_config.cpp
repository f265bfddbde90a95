#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "saa/config.hpp"

using namespace saa;

namespace {

std::filesystem::path temp_config(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream file(path);
  file << content;
  return path;
}

}  // namespace

TEST_CASE("config file parsing") {
  const auto path = temp_config("saa_config_ok.ini",
                                "# study configuration\n"
                                "[run]\n"
                                "seed = 7\n"
                                "out = /tmp/saa_out\n"
                                "\n"
                                "[synthetic]\n"
                                "months = 120\n"
                                "daily_vol = 0.009  ; comment\n"
                                "\n"
                                "[schedule]\n"
                                "train_len = 60\n"
                                "test_len = 20\n"
                                "\n"
                                "[ratio]\n"
                                "kinds = sharpe,cvar\n"
                                "alpha = 0.5\n"
                                "\n"
                                "[network]\n"
                                "hidden_grid = 2,4,8\n"
                                "output_mode = lagrangian\n"
                                "\n"
                                "[train]\n"
                                "gamma0 = 0.25\n"
                                "\n"
                                "[backtest]\n"
                                "benchmarks = var,static:0.60\n");
  const config::RunConfig config = config::load_config_file(path.string());
  CHECK(config.seed == 7);
  CHECK(config.out_dir == "/tmp/saa_out");
  CHECK(config.synthetic);
  CHECK(config.synthetic_config.months == 120);
  CHECK(config.synthetic_config.daily_vol == doctest::Approx(0.009));
  CHECK(config.train_len == 60);
  CHECK(config.ratio_kinds.size() == 2);
  CHECK(config.ratio_kinds[1] == ratios::Kind::cvar);
  CHECK(config.hidden_grid == std::vector<std::size_t>{2, 4, 8});
  CHECK(config.output_mode == network::OutputMode::lagrangian);
  CHECK(config.train.gamma0 == doctest::Approx(0.25));
  CHECK(config.benchmark_selectors == std::vector<std::string>{"var", "static:0.60"});
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("config error paths") {
  SUBCASE("unknown key") {
    const auto path = temp_config("saa_config_badkey.ini", "[run]\nspeed = 9\n");
    CHECK_THROWS_AS(config::load_config_file(path.string()), ConfigError);
  }

  SUBCASE("bad number") {
    const auto path = temp_config("saa_config_badnum.ini", "[train]\ngamma0 = fast\n");
    CHECK_THROWS_AS(config::load_config_file(path.string()), ConfigError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(config::load_config_file("/nonexistent/config.ini"), ConfigError);
  }

  SUBCASE("key outside a section") {
    const auto path = temp_config("saa_config_nosect.ini", "seed = 2\n");
    CHECK_THROWS_AS(config::load_config_file(path.string()), ConfigError);
  }

  SUBCASE("both data paths and synthetic block") {
    config::RunConfig config;
    config.synthetic = true;
    config.returns_path = "a.csv";
    config.states_path = "b.csv";
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }

  SUBCASE("neither data nor synthetic") {
    config::RunConfig config;
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }

  SUBCASE("unknown ratio token") {
    config::RunConfig config;
    CHECK_THROWS_AS(config::apply_kv(config, "ratio.kinds", "sharpe,sortino"), ConfigError);
  }

  SUBCASE("unknown interpret method") {
    config::RunConfig config;
    config.synthetic = true;
    config.interpret_method = "shap";
    CHECK_THROWS_AS(config.validate(), ConfigError);
  }
}

TEST_CASE("flag-style overrides win over file values") {
  const auto path = temp_config("saa_config_base.ini",
                                "[run]\nseed = 7\n[synthetic]\nmonths = 120\n");
  config::RunConfig config = config::load_config_file(path.string());
  config::apply_kv(config, "run.seed", "99");
  config::apply_kv(config, "ratio.kinds", "gini");
  CHECK(config.seed == 99);
  CHECK(config.ratio_kinds == std::vector<ratios::Kind>{ratios::Kind::gini});
}
