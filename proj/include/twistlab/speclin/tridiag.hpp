#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/blas1.hpp"

namespace twistlab::speclin {

// Symmetric tridiagonal eigenvalues by Sturm-sequence bisection plus inverse
// iteration for vectors. This is the workhorse for the 1D operators and for
// the Lanczos Rayleigh-Ritz step; sizes stay in the thousands, where
// bisection is simple, robust, and plenty fast.

// Number of eigenvalues of T strictly below x (Sturm count with the usual
// pivot safeguard).
inline int sturm_count(const Vector& diag, const Vector& off, double x) {
  const std::size_t n = diag.size();
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double b2 = (i == 0) ? 0.0 : off[i - 1] * off[i - 1];
    q = diag[i] - x - b2 / q;
    // a zero pivot belongs to the negative count (LAPACK convention); the
    // substitute value also keeps the next division well defined
    if (q == 0.0) q = -1e-300;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (0-based) to absolute precision ~1e-15*scale.
inline double tridiag_eigenvalue(const Vector& diag, const Vector& off, int k) {
  const std::size_t n = diag.size();
  if (n == 0) throw DimensionMismatch("tridiag_eigenvalue: empty matrix");
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) +
               (i + 1 < n ? std::abs(off[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
  for (int it = 0; it < 200 && hi - lo > 1e-15 * scale; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sturm_count(diag, off, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Eigenvector by inverse iteration. Each solve uses a Givens QR sweep of
// (T - mu I), which is unconditionally stable on tridiagonals and leaves an
// upper factor with two superdiagonals.
inline Vector tridiag_eigenvector(const Vector& diag, const Vector& off,
                                  double lambda) {
  const std::size_t n = diag.size();
  double scale = 0.0;
  for (double d : diag) scale = std::max(scale, std::abs(d));
  for (double o : off) scale = std::max(scale, std::abs(o));
  if (scale == 0.0) scale = 1.0;
  const double mu = lambda + 1e-13 * scale;

  // factor once: R has diagonal r0, superdiagonals r1, r2; rotations (c,s)
  Vector r0(n), r1(n > 0 ? n - 1 : 0), r2(n > 1 ? n - 2 : 0);
  Vector cs(n > 0 ? n - 1 : 0), sn(n > 0 ? n - 1 : 0);
  {
    Vector d(n), e1(n > 0 ? n - 1 : 0), e2(n > 1 ? n - 2 : 0, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - mu;
    for (std::size_t i = 0; i + 1 < n; ++i) e1[i] = off[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double sub = off[i];
      double r = std::hypot(d[i], sub);
      if (r == 0.0) r = 1e-300;
      double c = d[i] / r, s = sub / r;
      cs[i] = c;
      sn[i] = s;
      r0[i] = r;
      // columns i+1 and i+2 of rows i and i+1
      double a = e1[i], b = d[i + 1];
      r1[i] = c * a + s * b;
      d[i + 1] = -s * a + c * b;
      if (i + 2 < n) {
        double p = e2[i], q = e1[i + 1];
        r2[i] = c * p + s * q;
        e1[i + 1] = -s * p + c * q;
      }
    }
    r0[n - 1] = (d[n - 1] == 0.0) ? 1e-300 : d[n - 1];
  }

  auto solve = [&](Vector& x) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      double a = x[i], b = x[i + 1];
      x[i] = cs[i] * a + sn[i] * b;
      x[i + 1] = -sn[i] * a + cs[i] * b;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x[ii];
      if (ii + 1 < n) s -= r1[ii] * x[ii + 1];
      if (ii + 2 < n) s -= r2[ii] * x[ii + 2];
      x[ii] = s / r0[ii];
    }
  };

  Vector x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  for (int pass = 0; pass < 3; ++pass) {
    solve(x);
    double nx = norm2(x);
    if (nx == 0.0 || !std::isfinite(nx))
      throw NotConverged("tridiag_eigenvector: degenerate iterate", 1.0);
    scal(1.0 / nx, x);
  }
  return x;
}

}  // namespace twistlab::speclin
