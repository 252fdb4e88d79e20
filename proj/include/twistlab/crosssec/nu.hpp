#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/tridiag.hpp"

namespace twistlab::crosssec {

// Lowest Neumann eigenvalue of -(1/4) d^2/dx^2 + mu(x) on an interval, with
// mu sampled on a uniform closed grid (endpoints included). The kinetic
// factor 1/4 is part of the model; pass quarter = false to solve with the
// plain Laplacian instead. Discretization: P1 stiffness plus a trapezoid
// lumped potential and mass, symmetrized to a tridiagonal standard problem.
// A constant potential is reproduced exactly, since constants are the
// discrete Neumann ground state.
inline double solve_nu(const std::vector<double>& mu_values, double length,
                       bool quarter = true) {
  const std::size_t n = mu_values.size();
  if (n < 2) throw BadInterval("solve_nu: need at least two samples");
  if (!(length > 0.0)) throw BadInterval("solve_nu: interval length must be positive");
  const double dx = length / static_cast<double>(n - 1);
  const double c = quarter ? 0.25 : 1.0;
  const double k = c / dx;

  std::vector<double> w(n, dx);
  w.front() = 0.5 * dx;
  w.back() = 0.5 * dx;

  speclin::Vector diag(n, 0.0), off(n - 1, -k);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    diag[i] += k;
    diag[i + 1] += k;
  }
  for (std::size_t i = 0; i < n; ++i) diag[i] += w[i] * mu_values[i];

  // Symmetrize the pencil (K, diag(w)) by W^{-1/2} on both sides.
  for (std::size_t i = 0; i < n; ++i) diag[i] /= w[i];
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] /= std::sqrt(w[i] * w[i + 1]);

  return speclin::tridiag_eigenvalue(diag, off, 0);
}

}  // namespace twistlab::crosssec
