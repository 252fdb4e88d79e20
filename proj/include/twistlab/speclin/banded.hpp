#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/blas1.hpp"
#include "twistlab/speclin/sparse.hpp"

namespace twistlab::speclin {

// Banded Cholesky of A - sigma*M, used as the inner solver for shift-invert
// when the bandwidth is economical (plane-ordered tube matrices have half
// bandwidth about the size of one cross-section plane). Packed lower-band
// storage: band[k*n + j] holds entry (j+k, j) for k = 0..hb.
//
// factor() returns false instead of throwing when a pivot is not positive:
// the caller uses that as a certificate that sigma is not below the lowest
// eigenvalue and retreats the shift.
struct BandedCholesky {
  std::size_t n = 0;
  std::size_t hb = 0;
  std::vector<double> band;

  static BandedCholesky build(const SparseSymMatrix& a, const SparseSymMatrix& m,
                              double sigma) {
    if (a.rows() != m.rows())
      throw DimensionMismatch("BandedCholesky: pencil size mismatch");
    BandedCholesky f;
    f.n = a.rows();
    f.hb = std::max(a.half_bandwidth(), m.half_bandwidth());
    f.band.assign((f.hb + 1) * f.n, 0.0);
    a.for_each([&](std::size_t i, std::size_t j, double v) {
      if (i >= j) f.band[(i - j) * f.n + j] += v;
    });
    m.for_each([&](std::size_t i, std::size_t j, double v) {
      if (i >= j) f.band[(i - j) * f.n + j] -= sigma * v;
    });
    return f;
  }

  bool factor() {
    for (std::size_t j = 0; j < n; ++j) {
      double d = band[j];
      if (!(d > 0.0) || !std::isfinite(d)) return false;
      d = std::sqrt(d);
      band[j] = d;
      std::size_t kb = std::min(hb, n - 1 - j);
      for (std::size_t k = 1; k <= kb; ++k) band[k * n + j] /= d;
      for (std::size_t i = 1; i <= kb; ++i) {
        double lij = band[i * n + j];
        if (lij == 0.0) continue;
        for (std::size_t k = i; k <= kb; ++k)
          band[(k - i) * n + (j + i)] -= band[k * n + j] * lij;
      }
    }
    return true;
  }

  // Solves (A - sigma*M) x = b in place after a successful factor().
  void solve(Vector& x) const {
    if (x.size() != n) throw DimensionMismatch("BandedCholesky::solve");
    for (std::size_t j = 0; j < n; ++j) {
      double s = x[j];
      std::size_t k0 = std::min(hb, j);
      for (std::size_t k = 1; k <= k0; ++k) s -= band[k * n + (j - k)] * x[j - k];
      x[j] = s / band[j];
    }
    for (std::size_t jj = n; jj-- > 0;) {
      double s = x[jj];
      std::size_t kb = std::min(hb, n - 1 - jj);
      for (std::size_t k = 1; k <= kb; ++k) s -= band[k * n + jj] * x[jj + k];
      x[jj] = s / band[jj];
    }
  }
};

}  // namespace twistlab::speclin
