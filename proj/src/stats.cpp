#include "saa/stats.hpp"

#include <algorithm>
#include <cmath>

namespace saa::stats {

double mean(std::span<const double> x) {
  if (x.empty()) throw InsufficientData("mean: empty series");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double pop_variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double pop_stddev(std::span<const double> x) { return std::sqrt(pop_variance(x)); }

SummaryStats summarize(std::span<const double> x) {
  if (x.size() < 2) throw InsufficientData("summarize: need at least 2 points");
  SummaryStats out;
  out.mean = mean(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - out.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out.stddev = std::sqrt(m2);
  if (out.stddev > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
    out.has_shape = true;
  }
  return out;
}

namespace {

double beta_cont_fraction(double a, double b, double x) {
  // Lentz's algorithm for the continued fraction of I_x(a,b).
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cont_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double student_t_p_two_sided(double t, int df) {
  if (df < 1) throw DegenerateInput("student_t_p_two_sided: df < 1");
  const double nu = static_cast<double>(df);
  const double x = nu / (nu + t * t);
  return incomplete_beta(0.5 * nu, 0.5, x);
}

PairedTest mean_difference_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InsufficientData("mean_difference_test: unequal series lengths");
  }
  const std::size_t n = a.size();
  if (n < 3) throw InsufficientData("mean_difference_test: need >= 3 pairs");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double md = mean(d);
  double ss = 0.0;
  for (double v : d) ss += (v - md) * (v - md);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  PairedTest out;
  // a constant difference vector leaves only rounding residue in sd
  if (sd <= 1e-12 * std::abs(md)) {
    if (md == 0.0) {
      out.t_stat = 0.0;
      out.p_value = 1.0;
      return out;
    }
    throw DegenerateInput("mean_difference_test: zero-variance differences");
  }
  out.t_stat = md / (sd / std::sqrt(static_cast<double>(n)));
  out.p_value = student_t_p_two_sided(out.t_stat, static_cast<int>(n) - 1);
  if (out.p_value < 0.01) {
    out.stars = "***";
  } else if (out.p_value < 0.05) {
    out.stars = "**";
  } else if (out.p_value < 0.10) {
    out.stars = "*";
  }
  return out;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw InsufficientData("pearson: need >= 3 aligned points");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInput("pearson: zero-variance input");
  }
  Correlation out;
  out.r = sxy / std::sqrt(sxx * syy);
  const int df = static_cast<int>(x.size()) - 2;
  const double r2 = std::min(out.r * out.r, 1.0 - 1e-15);
  const double t = out.r * std::sqrt(df / (1.0 - r2));
  out.p_value = student_t_p_two_sided(t, df);
  return out;
}

}  // namespace saa::stats
