#pragma once

// Independent O(D^2) reference implementations of the six performance
// ratios: explicit double loops and naive selection sort, no code shared
// with src/ratios.cpp. Used as the oracle for equivalence checks.

#include <cmath>
#include <cstddef>
#include <vector>

namespace ref {

inline std::vector<double> selection_sort(std::vector<double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t lo = i;
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[j] < v[lo]) lo = j;
    }
    const double tmp = v[i];
    v[i] = v[lo];
    v[lo] = tmp;
  }
  return v;
}

inline double mean(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v;
  return s / static_cast<double>(r.size());
}

// ceil(level * d) with the same representation guard the spec rule needs,
// written independently.
inline std::size_t tail_k(double level, std::size_t d) {
  std::size_t k = 1;
  while (k < d && static_cast<double>(k) < level * static_cast<double>(d) - 1e-9) ++k;
  return k;
}

inline double sharpe(const std::vector<double>& r) {
  const double m = mean(r);
  double ss = 0.0;
  for (double v : r) ss += (v - m) * (v - m);
  return m / std::sqrt(ss / static_cast<double>(r.size()));
}

inline double mad(const std::vector<double>& r) {
  const double m = mean(r);
  double s = 0.0;
  for (double v : r) s += std::fabs(v - m);
  return m / (s / static_cast<double>(r.size()));
}

inline double minimax(const std::vector<double>& r) {
  double lo = r[0];
  for (double v : r) {
    if (v < lo) lo = v;
  }
  return mean(r) / (-lo);
}

inline double gini(const std::vector<double>& r) {
  const std::size_t d = r.size();
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j) s += std::fabs(r[i] - r[j]);
    }
  }
  const double gmd = s / (static_cast<double>(d) * static_cast<double>(d - 1));
  return mean(r) / (0.5 * gmd);
}

inline double etl(const std::vector<double>& r, double alpha) {
  const std::vector<double> sorted = selection_sort(r);
  const std::size_t k = tail_k(alpha, r.size());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += -sorted[i];
  return s / static_cast<double>(k);
}

inline double upper_mean(const std::vector<double>& r, double beta) {
  const std::vector<double> sorted = selection_sort(r);
  std::size_t u = tail_k(1.0 - beta, r.size());
  if (u < 1) u = 1;
  double s = 0.0;
  for (std::size_t i = sorted.size() - u; i < sorted.size(); ++i) s += sorted[i];
  return s / static_cast<double>(u);
}

inline double cvar(const std::vector<double>& r, double alpha) {
  return mean(r) / etl(r, alpha);
}

inline double rachev(const std::vector<double>& r, double alpha, double beta) {
  return upper_mean(r, beta) / etl(r, alpha);
}

}  // namespace ref
