#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "saa/data_io.hpp"
#include "saa/rng.hpp"

using namespace saa;

namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream file(path, std::ios::binary);
  file << content;
  return path;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace

TEST_CASE("returns csv loading") {
  SUBCASE("zero matrix round trip") {
    const auto path = temp_file("saa_rets_ok.csv",
                                "date,a,b\n"
                                "2000-01-03,0,0\n"
                                "2000-01-04,0,0\n"
                                "2000-01-05,0,0\n");
    const ReturnPanel panel = load_returns_csv(path.string());
    CHECK(panel.days() == 3);
    CHECK(panel.assets() == 2);
    for (double v : panel.returns.data()) CHECK(v == 0.0);
  }

  SUBCASE("return below -100% is rejected") {
    const auto path = temp_file("saa_rets_neg.csv",
                                "date,a,b\n"
                                "2000-01-03,-1.5,0\n");
    CHECK_THROWS_AS(load_returns_csv(path.string()), NonFiniteInput);
  }

  SUBCASE("duplicate dates are rejected") {
    const auto path = temp_file("saa_rets_dup.csv",
                                "date,a,b\n"
                                "2000-01-04,0.01,0\n"
                                "2000-01-04,0.02,0\n");
    CHECK_THROWS_AS(load_returns_csv(path.string()), MisalignedDates);
  }

  SUBCASE("unsorted rows are sorted by date") {
    const auto path = temp_file("saa_rets_unsorted.csv",
                                "date,a,b\n"
                                "2000-01-05,0.02,0\n"
                                "2000-01-04,0.01,0\n");
    const ReturnPanel panel = load_returns_csv(path.string());
    CHECK(panel.dates[0].day == 4);
    CHECK(panel.returns(0, 0) == doctest::Approx(0.01));
  }

  SUBCASE("single asset is insufficient") {
    const auto path = temp_file("saa_rets_one.csv", "date,a\n2000-01-03,0.01\n");
    CHECK_THROWS_AS(load_returns_csv(path.string()), DataError);
  }

  SUBCASE("missing file carries the path in the message") {
    try {
      load_returns_csv("/nonexistent/returns.csv");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("/nonexistent/returns.csv") != std::string::npos);
    }
  }
}

TEST_CASE("states csv loading") {
  SUBCASE("four consecutive months") {
    const auto path = temp_file("saa_states_ok.csv",
                                "month,v1,v2,v3,v4\n"
                                "1999-01,1,2,3,4\n"
                                "1999-02,1,2,3,4\n"
                                "1999-03,1,2,3,4\n"
                                "1999-04,1,2,3,4\n");
    const StateSeries states = load_states_csv(path.string());
    CHECK(states.size() == 4);
    CHECK(states.variables() == 4);
  }

  SUBCASE("a month gap is misaligned") {
    const auto path = temp_file("saa_states_gap.csv",
                                "month,v1\n"
                                "1999-01,1\n"
                                "1999-03,1\n");
    CHECK_THROWS_AS(load_states_csv(path.string()), MisalignedDates);
  }

  SUBCASE("nan cell is non-finite") {
    const auto path = temp_file("saa_states_nan.csv",
                                "month,v1\n"
                                "1999-01,nan\n");
    CHECK_THROWS_AS(load_states_csv(path.string()), NonFiniteInput);
  }
}

TEST_CASE("returns csv write/load round trip") {
  SyntheticConfig config;
  config.months = 5;
  config.days_per_month = 4;
  auto [panel, states] = generate_synthetic(config, 99);
  (void)states;

  const auto path = std::filesystem::temp_directory_path() / "saa_roundtrip.csv";
  write_returns_csv(panel, path.string());
  const ReturnPanel loaded = load_returns_csv(path.string());
  const auto path2 = std::filesystem::temp_directory_path() / "saa_roundtrip2.csv";
  write_returns_csv(loaded, path2.string());
  CHECK(slurp(path) == slurp(path2));

  CHECK(loaded.dates == panel.dates);
  for (std::size_t i = 0; i < panel.returns.data().size(); ++i) {
    CHECK(loaded.returns.data()[i] ==
          doctest::Approx(panel.returns.data()[i]).epsilon(1e-11));
  }
}

TEST_CASE("state variable construction") {
  // 13 flat months: trend is exactly zero in month 13
  std::vector<YearMonth> months;
  std::vector<double> level(13, 100.0), dividends(13, 4.0);
  YieldSeries yields;
  yields.baa.assign(13, 6.0);
  yields.aaa.assign(13, 5.0);
  yields.y10.assign(13, 4.0);
  yields.y1.assign(13, 3.5);
  for (int i = 0; i < 13; ++i) {
    months.push_back(YearMonth::from_index(YearMonth{2000, 1}.index() + i));
  }

  const StateSeries states = compute_state_variables(months, level, dividends, yields);
  CHECK(states.size() == 1);
  CHECK(states.months[0] == YearMonth{2001, 1});
  CHECK(states.values(0, 0) == doctest::Approx(1.0));  // default spread
  CHECK(states.values(0, 1) == doctest::Approx(0.5));  // term spread
  // D/P = 100 * 4 / 100 = 4 percent, then the log
  CHECK(states.values(0, 2) == doctest::Approx(std::log(4.0)));
  CHECK(states.values(0, 2) == doctest::Approx(1.386).epsilon(1e-3));
  CHECK(states.values(0, 3) == doctest::Approx(0.0));  // trend

  SUBCASE("too little history") {
    months.resize(12);
    level.resize(12);
    dividends.resize(12);
    yields.baa.resize(12);
    yields.aaa.resize(12);
    yields.y10.resize(12);
    yields.y1.resize(12);
    CHECK_THROWS_AS(compute_state_variables(months, level, dividends, yields),
                    InsufficientData);
  }
}

TEST_CASE("align_months pairs each state with the following month") {
  // states Jan-Mar, returns Feb-Apr -> 3 pairs
  StateSeries states;
  states.variable_names = {"v"};
  states.months = {{2000, 1}, {2000, 2}, {2000, 3}};
  states.values = Matrix(3, 1, 0.5);

  ReturnPanel panel;
  panel.asset_names = {"a", "b"};
  for (int m = 2; m <= 4; ++m) {
    panel.dates.push_back(Date{2000, m, 10});
    panel.dates.push_back(Date{2000, m, 11});
  }
  panel.returns = Matrix(6, 2, 0.01);

  const AlignedDataset aligned = align_months(panel, states);
  CHECK(aligned.size() == 3);
  CHECK(aligned.month_keys[0] == YearMonth{2000, 1});
  CHECK(aligned.return_month(0) == YearMonth{2000, 2});
  CHECK(aligned.pairs[0].month_returns.rows() == 2);

  SUBCASE("missing trailing month drops the pair") {
    ReturnPanel shorter = panel;
    shorter.dates.resize(4);
    shorter.returns = Matrix(4, 2, 0.01);
    const AlignedDataset two = align_months(shorter, states);
    CHECK(two.size() == 2);
  }

  SUBCASE("single-day months are rejected; none left raises") {
    ReturnPanel sparse;
    sparse.asset_names = {"a", "b"};
    sparse.dates = {Date{2000, 2, 10}, Date{2000, 3, 10}, Date{2000, 4, 10}};
    sparse.returns = Matrix(3, 2, 0.01);
    CHECK_THROWS_AS(align_months(sparse, states), InsufficientData);
  }
}

TEST_CASE("standardization") {
  StateSeries states;
  states.variable_names = {"v"};
  states.months = {{2000, 1}, {2000, 2}};
  states.values = Matrix(2, 1);
  states.values(0, 0) = 1.0;
  states.values(1, 0) = 3.0;

  auto [standardized, stats] = standardize_states(states);
  CHECK(stats.means[0] == doctest::Approx(2.0));
  CHECK(stats.stddevs[0] == doctest::Approx(1.0));
  CHECK(standardized.values(0, 0) == doctest::Approx(-1.0));
  CHECK(standardized.values(1, 0) == doctest::Approx(1.0));

  SUBCASE("idempotent with unit stats") {
    StandardizationStats unit;
    unit.means = {0.0};
    unit.stddevs = {1.0};
    auto [again, stats2] = standardize_states(standardized, unit);
    CHECK(again.values.data() == standardized.values.data());
    (void)stats2;
  }

  SUBCASE("in-place stats give zero mean unit stddev") {
    Rng rng(31);
    StateSeries wide;
    wide.variable_names = {"a", "b", "c"};
    wide.values = Matrix(40, 3);
    for (int i = 0; i < 40; ++i) {
      wide.months.push_back(YearMonth::from_index(YearMonth{1990, 1}.index() + i));
      for (int j = 0; j < 3; ++j) wide.values(i, j) = 5.0 * rng.normal() + j;
    }
    auto [z, st] = standardize_states(wide);
    (void)st;
    for (int j = 0; j < 3; ++j) {
      double mean = 0.0, var = 0.0;
      for (int i = 0; i < 40; ++i) mean += z.values(i, j);
      mean /= 40.0;
      for (int i = 0; i < 40; ++i) var += (z.values(i, j) - mean) * (z.values(i, j) - mean);
      var /= 40.0;
      CHECK(std::fabs(mean) < 1e-12);
      CHECK(std::fabs(std::sqrt(var) - 1.0) < 1e-12);
    }
  }

  SUBCASE("constant column is degenerate") {
    StateSeries constant;
    constant.variable_names = {"v"};
    constant.months = {{2000, 1}, {2000, 2}};
    constant.values = Matrix(2, 1, 7.0);
    CHECK_THROWS_AS(standardize_states(constant), DegenerateInput);
  }
}

TEST_CASE("synthetic generator") {
  SyntheticConfig config;
  config.months = 216;
  config.days_per_month = 21;

  auto [panel_a, states_a] = generate_synthetic(config, 7);
  auto [panel_b, states_b] = generate_synthetic(config, 7);
  CHECK(panel_a.returns.data() == panel_b.returns.data());
  CHECK(states_a.values.data() == states_b.values.data());
  CHECK(panel_a.days() == 4536);
  CHECK(states_a.size() == 216);
  CHECK(states_a.variables() == 4);

  auto [panel_c, states_c] = generate_synthetic(config, 8);
  (void)states_c;
  CHECK(panel_a.returns.data() != panel_c.returns.data());

  SUBCASE("regime sign sets the favored asset") {
    const AlignedDataset aligned = align_months(panel_a, states_a);
    double high_minus_low = 0.0;
    for (std::size_t t = 0; t < aligned.size(); ++t) {
      const bool first_high = aligned.pairs[t].state[0] > 0.0;
      const Matrix& rets = aligned.pairs[t].month_returns;
      double m1 = 0.0, m2 = 0.0;
      for (std::size_t d = 0; d < rets.rows(); ++d) {
        m1 += rets(d, 0);
        m2 += rets(d, 1);
      }
      high_minus_low += first_high ? m1 - m2 : m2 - m1;
    }
    high_minus_low /= static_cast<double>(aligned.size());
    // daily sums per month: expected gap is mean_high - mean_low = 0.02
    CHECK(high_minus_low > 0.01);
  }

  SUBCASE("zero regime gap leaves assets exchangeable") {
    SyntheticConfig flat = config;
    flat.months = 2000;
    flat.mean_high = 0.0;
    flat.mean_low = 0.0;
    auto [panel, states] = generate_synthetic(flat, 17);
    (void)states;
    double diff = 0.0;
    for (std::size_t d = 0; d < panel.days(); ++d) {
      diff += panel.returns(d, 0) - panel.returns(d, 1);
    }
    const std::size_t rows = panel.days();
    diff /= static_cast<double>(rows);
    // difference of two iid assets: se = vol * sqrt(2 / rows)
    const double se = flat.daily_vol * std::sqrt(2.0 / static_cast<double>(rows));
    CHECK(std::fabs(diff) < 3.0 * se);
  }
}
