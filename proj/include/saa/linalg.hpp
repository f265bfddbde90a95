#pragma once

#include <span>
#include <vector>

#include "saa/types.hpp"

// Small dense solvers sized for this project (systems of order M+1 ~ 5,
// covariance matrices of order N <= ~8). Kept self-contained instead of
// pulling in a linear-algebra dependency; each routine is checked against
// brute-force oracles in tests/test_linalg.cpp.
namespace saa::linalg {

// Gaussian elimination with partial pivoting. Throws SingularDesign when a
// pivot falls below tol * max|a|.
std::vector<double> solve(Matrix a, std::vector<double> b, double tol = 1e-12);

// OLS coefficients for y ~ [1, x_1..x_k] via the normal equations.
// Rows of x are observations. Throws SingularDesign on collinear columns.
std::vector<double> ols(const Matrix& x, std::span<const double> y);

struct SymEig {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi rotations; input must be symmetric.
SymEig sym_eigen(Matrix a, int max_sweeps = 64);

// Lower-triangular factor L with A ~ L L'. Semidefinite pivots (<= tol)
// zero out their column; pivots below -tol throw DegenerateInput.
Matrix cholesky_psd(Matrix a, double tol = 1e-10);

// Symmetrize, clip negative eigenvalues to zero, reassemble. Sets *repaired
// when clipping changed anything beyond tol.
Matrix clip_to_psd(const Matrix& a, bool* repaired = nullptr, double tol = 1e-12);

}  // namespace saa::linalg
