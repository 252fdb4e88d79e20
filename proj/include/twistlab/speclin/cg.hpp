#pragma once

#include <cmath>
#include <string>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/blas1.hpp"
#include "twistlab/speclin/sparse.hpp"

namespace twistlab::speclin {

struct CgConfig {
  double shift = 0.0;  // solves (A - shift*I) x = b
  double tol = 1e-10;  // on ||r|| / ||b||
  int maxit = 20000;
};

struct CgStats {
  int iterations = 0;
  double residual = 0.0;
};

// Plain conjugate gradients with optional identity shift and Jacobi
// preconditioning. The caller promises A - shift*I is positive definite;
// a nonpositive curvature p'(A-shift)p flags the violation, as does a
// nonpositive shifted diagonal entry (which would also break the Jacobi
// scaling).
inline Vector conjugate_gradient(const SparseSymMatrix& A, const Vector& b,
                                 const CgConfig& cfg = {},
                                 CgStats* stats = nullptr) {
  if (static_cast<int>(b.size()) != A.n())
    throw DimensionMismatch("conjugate_gradient: rhs size mismatch");
  const std::size_t n = b.size();

  Vector dinv = A.diagonal();
  for (double& d : dinv) {
    double piv = d - cfg.shift;
    if (piv <= 0.0)
      throw IndefiniteDetected(
          "conjugate_gradient: nonpositive shifted diagonal entry");
    d = 1.0 / piv;
  }

  Vector x(n, 0.0);
  Vector r = b;
  Vector z(n), q(n);
  double bnorm = norm2(b);
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }

  for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
  Vector p = z;
  double rz = dot(r, z);

  int it = 0;
  double rel = 1.0;
  for (; it < cfg.maxit; ++it) {
    A.multiply(p, q);
    if (cfg.shift != 0.0) axpy(-cfg.shift, p, q);
    double pq = dot(p, q);
    if (pq <= 0.0)
      throw IndefiniteDetected(
          "conjugate_gradient: nonpositive curvature, shift is not below the "
          "spectrum");
    double alpha = rz / pq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    rel = norm2(r) / bnorm;
    if (rel <= cfg.tol) {
      ++it;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    double rz_next = dot(r, z);
    double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }

  if (stats) *stats = {it, rel};
  if (rel > cfg.tol)
    throw NotConverged("conjugate_gradient: max iterations reached", rel);
  return x;
}

}  // namespace twistlab::speclin
