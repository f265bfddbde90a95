#include "saa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace saa::linalg {

std::vector<double> solve(Matrix a, std::vector<double> b, double tol) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n || b.size() != n) {
    throw SingularDesign("solve: bad system dimensions");
  }
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::abs(v));
  const double pivot_floor = tol * std::max(scale, 1.0);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) <= pivot_floor) {
      throw SingularDesign("solve: singular system (pivot " + std::to_string(col) + ")");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

std::vector<double> ols(const Matrix& x, std::span<const double> y) {
  const std::size_t t = x.rows();
  const std::size_t k = x.cols() + 1;  // intercept first
  if (y.size() != t) throw SingularDesign("ols: row count mismatch");
  if (t < k) throw InsufficientData("ols: fewer observations than coefficients");

  Matrix xtx(k, k, 0.0);
  std::vector<double> xty(k, 0.0);
  for (std::size_t r = 0; r < t; ++r) {
    // design row = [1, x(r,0), ..., x(r,k-2)]
    for (std::size_t i = 0; i < k; ++i) {
      const double xi = (i == 0) ? 1.0 : x(r, i - 1);
      xty[i] += xi * y[r];
      for (std::size_t j = i; j < k; ++j) {
        const double xj = (j == 0) ? 1.0 : x(r, j - 1);
        xtx(i, j) += xi * xj;
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) xtx(i, j) = xtx(j, i);

  return solve(std::move(xtx), std::move(xty));
}

SymEig sym_eigen(Matrix a, int max_sweeps) {
  const std::size_t n = a.rows();
  Matrix v(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t_sign = theta >= 0.0 ? 1.0 : -1.0;
        const double t_val = t_sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t_val * t_val + 1.0);
        const double s = t_val * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj - s * aqj;
          a(q, j) = s * apj + c * aqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p), viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  SymEig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return out.values[l] < out.values[r]; });
  SymEig sorted;
  sorted.values.resize(n);
  sorted.vectors = Matrix(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    sorted.values[j] = out.values[order[j]];
    for (std::size_t i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
  }
  return sorted;
}

Matrix cholesky_psd(Matrix a, double tol) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
  const double floor = tol * std::max(scale, 1.0);

  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d < -floor) {
      throw DegenerateInput("cholesky_psd: matrix indefinite (diagonal " +
                            std::to_string(d) + ")");
    }
    if (d <= floor) {
      // semidefinite direction: zero column
      continue;
    }
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

Matrix clip_to_psd(const Matrix& a, bool* repaired, double tol) {
  const std::size_t n = a.rows();
  Matrix sym(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));

  SymEig eig = sym_eigen(sym);
  bool changed = false;
  for (double& lambda : eig.values) {
    if (lambda < 0.0) {
      if (lambda < -tol) changed = true;
      lambda = 0.0;
    }
  }
  Matrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        s += eig.vectors(i, k) * eig.values[k] * eig.vectors(j, k);
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  if (repaired) *repaired = changed;
  return out;
}

}  // namespace saa::linalg
