#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/blas1.hpp"

namespace twistlab::speclin {

// Small dense symmetric kernels used by the Rayleigh-Ritz steps of the
// iterative eigensolvers. These stay deliberately simple: the matrices here
// are tiny (block size squared) and robustness beats speed.

// Row-major dense symmetric eigendecomposition by cyclic Jacobi rotations.
// On return w holds ascending eigenvalues and v the corresponding
// eigenvectors as columns (v[i*n+j] = component i of eigenvector j).
inline void jacobi_eigh(std::vector<double> a, int n, std::vector<double>& w,
                        std::vector<double>& v) {
  const std::size_t N = static_cast<std::size_t>(n);
  v.assign(N * N, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * N + i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double e = a[static_cast<std::size_t>(i) * N + j];
        s += e * e;
      }
    return std::sqrt(2.0 * s);
  };
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) scale = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    if (off_norm() <= 1e-15 * scale * n) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a[static_cast<std::size_t>(p) * N + q];
        if (std::abs(apq) <= 1e-18 * scale) continue;
        double app = a[static_cast<std::size_t>(p) * N + p];
        double aqq = a[static_cast<std::size_t>(q) * N + q];
        double theta = (aqq - app) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a[static_cast<std::size_t>(k) * N + p];
          double akq = a[static_cast<std::size_t>(k) * N + q];
          a[static_cast<std::size_t>(k) * N + p] = c * akp - s * akq;
          a[static_cast<std::size_t>(k) * N + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a[static_cast<std::size_t>(p) * N + k];
          double aqk = a[static_cast<std::size_t>(q) * N + k];
          a[static_cast<std::size_t>(p) * N + k] = c * apk - s * aqk;
          a[static_cast<std::size_t>(q) * N + k] = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = v[static_cast<std::size_t>(k) * N + p];
          double vkq = v[static_cast<std::size_t>(k) * N + q];
          v[static_cast<std::size_t>(k) * N + p] = c * vkp - s * vkq;
          v[static_cast<std::size_t>(k) * N + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  w.resize(N);
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(N);
  for (int i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i) * N + i];
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return diag[static_cast<std::size_t>(i)] < diag[static_cast<std::size_t>(j)]; });
  std::vector<double> vs(N * N);
  for (std::size_t j = 0; j < N; ++j) {
    w[j] = diag[static_cast<std::size_t>(order[j])];
    for (std::size_t i = 0; i < N; ++i)
      vs[i * N + j] = v[i * N + static_cast<std::size_t>(order[j])];
  }
  v.swap(vs);
}

// In-place lower Cholesky of a row-major symmetric matrix. Returns false on
// a nonpositive pivot instead of throwing: the eigensolvers use failure as
// information (basis became degenerate, shift not below the spectrum, ...).
inline bool cholesky_factor(std::vector<double>& a, int n) {
  const std::size_t N = static_cast<std::size_t>(n);
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j) * N + j];
    for (int k = 0; k < j; ++k) {
      double l = a[static_cast<std::size_t>(j) * N + k];
      d -= l * l;
    }
    if (d <= 0.0 || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    a[static_cast<std::size_t>(j) * N + j] = d;
    for (int i = j + 1; i < n; ++i) {
      double s = a[static_cast<std::size_t>(i) * N + j];
      for (int k = 0; k < j; ++k)
        s -= a[static_cast<std::size_t>(i) * N + k] * a[static_cast<std::size_t>(j) * N + k];
      a[static_cast<std::size_t>(i) * N + j] = s / d;
    }
  }
  // zero the strict upper triangle so the factor can be used directly
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a[static_cast<std::size_t>(i) * N + j] = 0.0;
  return true;
}

// Solve L x = b (forward) and L' x = b (backward) for the factor above.
inline void cholesky_forward(const std::vector<double>& l, int n,
                             std::vector<double>& x) {
  const std::size_t N = static_cast<std::size_t>(n);
  for (int i = 0; i < n; ++i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i) * N + k] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * N + i];
  }
}

inline void cholesky_backward(const std::vector<double>& l, int n,
                              std::vector<double>& x) {
  const std::size_t N = static_cast<std::size_t>(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) s -= l[static_cast<std::size_t>(k) * N + i] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * N + i];
  }
}

// Generalized symmetric eigenproblem A x = lambda B x for small dense
// matrices via Cholesky reduction B = L L' and a Jacobi solve of
// inv(L) A inv(L'). Eigenvectors come out B-orthonormal. Returns false if B
// is not numerically positive definite.
inline bool dense_generalized_eigh(const std::vector<double>& a,
                                   std::vector<double> b, int n,
                                   std::vector<double>& w,
                                   std::vector<double>& v) {
  const std::size_t N = static_cast<std::size_t>(n);
  if (!cholesky_factor(b, n)) return false;

  // C = inv(L) A inv(L'): first Y = inv(L) A (column solves), then
  // C = Y inv(L') computed as row solves of L C' = Y'.
  std::vector<double> c(a);
  for (std::size_t j = 0; j < N; ++j) {
    std::vector<double> colv(N);
    for (std::size_t i = 0; i < N; ++i) colv[i] = c[i * N + j];
    cholesky_forward(b, n, colv);
    for (std::size_t i = 0; i < N; ++i) c[i * N + j] = colv[i];
  }
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<double> rowv(N);
    for (std::size_t j = 0; j < N; ++j) rowv[j] = c[i * N + j];
    cholesky_forward(b, n, rowv);
    for (std::size_t j = 0; j < N; ++j) c[i * N + j] = rowv[j];
  }
  // symmetrize against roundoff
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double m = 0.5 * (c[i * N + j] + c[j * N + i]);
      c[i * N + j] = c[j * N + i] = m;
    }

  jacobi_eigh(std::move(c), n, w, v);

  // back-transform columns: x = inv(L') y
  for (std::size_t j = 0; j < N; ++j) {
    std::vector<double> colv(N);
    for (std::size_t i = 0; i < N; ++i) colv[i] = v[i * N + j];
    cholesky_backward(b, n, colv);
    for (std::size_t i = 0; i < N; ++i) v[i * N + j] = colv[i];
  }
  return true;
}

}  // namespace twistlab::speclin
