#pragma once

#include <cstddef>
#include <vector>

#include "stackcap/errors.hpp"

namespace stackcap {

/// Solves the tridiagonal system with sub-diagonal `lower` (size n-1),
/// diagonal `diag` (size n) and super-diagonal `upper` (size n-1) by the
/// Thomas algorithm, overwriting `rhs` with the solution. Stable for the
/// diagonally dominant systems assembled in this project; throws
/// NumericError on a vanishing pivot.
inline void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                              const std::vector<double>& upper, std::vector<double>& rhs,
                              std::vector<double>& scratch) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  scratch.resize(n);
  double pivot = diag[0];
  if (pivot == 0.0) throw NumericError("solve_tridiagonal: zero pivot at row 0");
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    scratch[i] = upper[i - 1] / pivot;
    pivot = diag[i] - lower[i - 1] * scratch[i];
    if (pivot == 0.0) throw NumericError("solve_tridiagonal: zero pivot");
    rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

inline void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                              const std::vector<double>& upper, std::vector<double>& rhs) {
  std::vector<double> scratch;
  solve_tridiagonal(lower, diag, upper, rhs, scratch);
}

}  // namespace stackcap
