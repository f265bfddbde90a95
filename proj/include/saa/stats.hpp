#pragma once

#include <span>
#include <string>
#include <vector>

#include "saa/types.hpp"

namespace saa::stats {

double mean(std::span<const double> x);
double pop_variance(std::span<const double> x);
double pop_stddev(std::span<const double> x);

// Mean / population stddev / population skewness m3/m2^1.5 / raw kurtosis
// m4/m2^2. Shape moments are only defined when the stddev is positive.
struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
  bool has_shape = false;
};

SummaryStats summarize(std::span<const double> x);

// Regularized incomplete beta I_x(a, b) via Lentz's continued fraction.
double incomplete_beta(double a, double b, double x);

// Two-sided p for a Student-t statistic.
double student_t_p_two_sided(double t, int df);

struct PairedTest {
  double t_stat = 0.0;
  double p_value = 1.0;
  std::string stars;  // "***" 1%, "**" 5%, "*" 10%
};

// Paired two-sided t-test on (a_i - b_i). Equal constant nonzero
// differences have no sampling variance and throw DegenerateInput.
PairedTest mean_difference_test(std::span<const double> a, std::span<const double> b);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
};

// Pearson correlation with the exact-t two-sided p (df = n - 2).
Correlation pearson(std::span<const double> x, std::span<const double> y);

}  // namespace saa::stats
