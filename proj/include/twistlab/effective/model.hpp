#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/blas1.hpp"
#include "twistlab/speclin/eigensolve.hpp"
#include "twistlab/speclin/tridiag.hpp"
#include "twistlab/tube/profile.hpp"

namespace twistlab::effective {

enum class BoundaryKind { dirichlet, neumann };

// One-dimensional reduction of the thin twisted tube: the Schroedinger
// operator -d^2/dx1^2 + C * (alpha^2 eps^2 + 2 alpha beta eps) on the
// truncated line (-L1, L1). The coupling constant C is supplied by the
// caller (analytic value, quadrature estimate, or the lattice constant of a
// particular transverse grid), so the same model serves both the exact
// formulas and grid-consistent comparisons.
struct Effective1D {
  double C_omega = 0.0;
  tube::TwistProfile profile;  // carries beta, the profile shape, and a default alpha
  double L1 = 40.0;
  double dx = 1.0 / 64.0;
  BoundaryKind bc = BoundaryKind::dirichlet;

  void validate() const {
    if (C_omega < 0.0) throw InvalidConfig("Effective1D: coupling constant must be >= 0");
    if (!(L1 > 0.0)) throw InvalidConfig("Effective1D: domain half-length must be positive");
    if (!(dx > 0.0)) throw BadSpacing("Effective1D: spacing must be positive");
    if (std::lround(2.0 * L1 / dx) < 4)
      throw BadSpacing("Effective1D: fewer than four cells across the domain");
    profile.validate();
    if (profile.kind != tube::ProfileKind::zero && !(profile.support < L1))
      throw InvalidConfig("Effective1D: profile support must lie strictly inside (-L1, L1)");
  }

  double potential(double alpha, double x1) const {
    const double eps = profile.eps(x1);
    const double eps2 = eps * eps;
    return C_omega * (alpha * alpha * eps2 + 2.0 * alpha * profile.beta * eps);
  }
};

// Sign of the twist excess integral(theta_dot^2 - beta^2) from the closed
// form moments: alpha^2 * integral(eps^2) + 2 alpha beta * integral(eps).
// Negative values guarantee discrete spectrum below the threshold.
inline double discrete_condition(const tube::TwistProfile& p, double alpha) {
  return alpha * alpha * p.eps_sq_integral() + 2.0 * alpha * p.beta * p.eps_integral();
}

inline double discrete_condition(double beta, double alpha, tube::ProfileKind kind) {
  tube::TwistProfile p;
  switch (kind) {
    case tube::ProfileKind::zero:
      p = tube::TwistProfile::zero(beta);
      break;
    case tube::ProfileKind::indicator:
      p = tube::TwistProfile::indicator(beta, alpha);
      break;
    case tube::ProfileKind::tent:
      p = tube::TwistProfile::tent(beta, alpha);
      break;
    case tube::ProfileKind::tabulated:
      throw InvalidConfig("discrete_condition: tabulated profiles need explicit samples");
  }
  return discrete_condition(p, alpha);
}

// Independent check of the closed-form moments: composite two-point Gauss
// quadrature of theta_dot^2 - beta^2 over [-support, support]. Cells align
// with the profile breakpoints for even cell counts, so the rule is exact on
// the piecewise-quadratic integrand up to rounding.
inline double twist_excess_quadrature(const tube::TwistProfile& p, double alpha,
                                      std::size_t cells = 2048) {
  if (cells == 0) throw InvalidConfig("twist_excess_quadrature: need at least one cell");
  if (p.kind == tube::ProfileKind::zero) return 0.0;
  const double s = p.support;
  const double w = 2.0 * s / static_cast<double>(cells);
  const double off = 0.5 * w / std::numbers::sqrt3;
  double total = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double c = -s + (static_cast<double>(i) + 0.5) * w;
    for (double x : {c - off, c + off}) {
      const double eps = p.eps(x);
      const double eps2 = eps * eps;
      total += 0.5 * w * (alpha * alpha * eps2 + 2.0 * alpha * p.beta * eps);
    }
  }
  return total;
}

namespace detail {

// Symmetric tridiagonal pencil reduced to standard form, plus the data needed
// to map the eigenvector back to nodal values.
struct Tridiag1D {
  speclin::Vector x;     // node coordinates
  speclin::Vector main;  // symmetrized diagonal
  speclin::Vector off;   // symmetrized subdiagonal
  speclin::Vector si;    // inverse square roots of the quadrature weights
  speclin::Vector wq;    // quadrature weights
  double step = 0.0;
};

// Uniform closed grid from a to b; the last node is pinned to b exactly so
// strict comparisons against interval endpoints behave predictably.
inline speclin::Vector closed_nodes(double a, double b, std::size_t n, double step) {
  speclin::Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) * step + a;
  if (n > 1) x[n - 1] = b;
  return x;
}

// Dirichlet operator on the interior nodes of (-L1, L1): plain second
// difference plus the nodal potential, identity mass.
template <class PotFn>
inline Tridiag1D dirichlet_problem(double L1, double dx, PotFn&& pot) {
  const long cells = std::lround(2.0 * L1 / dx);
  if (cells < 4) throw BadSpacing("dirichlet_problem: fewer than four cells");
  const std::size_t n = static_cast<std::size_t>(cells - 1);
  const double a = -L1 + dx;
  const double b = L1 - dx;
  const double step = (n > 1) ? (b - a) / static_cast<double>(n - 1) : dx;
  Tridiag1D t;
  t.step = step;
  t.x = closed_nodes(a, b, n, step);
  t.main.resize(n);
  t.off.assign(n - 1, -1.0 / (step * step));
  t.si.assign(n, 1.0);
  t.wq.assign(n, step);
  for (std::size_t i = 0; i < n; ++i) t.main[i] = 2.0 / (step * step) + pot(t.x[i]);
  return t;
}

// Neumann form on the closed interval [a, b]: graph Laplacian stiffness over
// trapezoid weights with the potential integrated against the same weights,
// then symmetrized by the inverse square roots of the weights.
template <class PotFn>
inline Tridiag1D neumann_problem(double a, double b, double dx, PotFn&& pot) {
  if (!(dx > 0.0)) throw BadSpacing("neumann_problem: spacing must be positive");
  const long cells = std::lround((b - a) / dx);
  if (cells < 2) throw BadSpacing("neumann_problem: fewer than two cells");
  const std::size_t n = static_cast<std::size_t>(cells + 1);
  const double step = (b - a) / static_cast<double>(n - 1);
  Tridiag1D t;
  t.step = step;
  t.x = closed_nodes(a, b, n, step);
  t.wq.assign(n, step);
  t.wq[0] = 0.5 * step;
  t.wq[n - 1] = 0.5 * step;
  t.main.assign(n, 0.0);
  t.off.assign(n - 1, 0.0);
  const double inv = 1.0 / step;
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    if (i + 1 < n) m += inv;
    if (i > 0) m += inv;
    m += t.wq[i] * pot(t.x[i]);
    t.main[i] = m;
  }
  t.si.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.si[i] = 1.0 / std::sqrt(t.wq[i]);
  for (std::size_t i = 0; i < n; ++i) t.main[i] = (t.main[i] * t.si[i]) * t.si[i];
  for (std::size_t i = 0; i + 1 < n; ++i) t.off[i] = (-inv * t.si[i]) * t.si[i + 1];
  return t;
}

// Ground pair of the assembled problem. Bisection gives the eigenvalue to
// roughly 1e-15 times the Gershgorin scale; the vector comes from inverse
// iteration and is mapped back to nodal values with unit quadrature norm.
inline speclin::EigenResult ground_pair(const Tridiag1D& t) {
  const std::size_t n = t.main.size();
  speclin::EigenResult res;
  const double lambda = speclin::tridiag_eigenvalue(t.main, t.off, 0);
  speclin::Vector u = speclin::tridiag_eigenvector(t.main, t.off, lambda);
  double rn = 0.0;
  {
    speclin::Vector r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = t.main[i] * u[i] - lambda * u[i];
      if (i > 0) s += t.off[i - 1] * u[i - 1];
      if (i + 1 < n) s += t.off[i] * u[i + 1];
      r[i] = s;
    }
    rn = speclin::norm2(r);
  }
  speclin::Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = u[i] * t.si[i];
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) q += t.wq[i] * v[i] * v[i];
  if (q > 0.0) speclin::scal(1.0 / std::sqrt(q), v);
  double sum = 0.0;
  for (double c : v) sum += c;
  if (sum < 0.0) speclin::scal(-1.0, v);
  res.values.assign(1, lambda);
  res.vectors.assign(1, std::move(v));
  res.residuals.assign(1, rn);
  res.iterations = 0;
  res.converged = true;
  res.method = "sturm";
  return res;
}

}  // namespace detail

// Ground pair of the truncated 1D operator at the given coupling. The
// profile's own alpha field is ignored here so parameter sweeps do not have
// to copy the model. Eigenvectors are normalized to unit quadrature norm
// with nonnegative sum.
inline speclin::EigenResult solve_effective(const Effective1D& e, double alpha) {
  e.validate();
  auto pot = [&](double x) { return e.potential(alpha, x); };
  if (e.bc == BoundaryKind::dirichlet)
    return detail::ground_pair(detail::dirichlet_problem(e.L1, e.dx, pot));
  return detail::ground_pair(detail::neumann_problem(-e.L1, e.L1, e.dx, pot));
}

// Smallest eigenvalue of the Neumann Laplacian on (a, b) with a constant
// barrier of height alpha on the strictly interior window (ap, bp). As the
// barrier grows this climbs to min{(pi/(2(ap-a)))^2, (pi/(2(b-bp)))^2}, the
// ground energy of the deeper of the two side ramps.
inline double neumann_box_eigen(double a, double ap, double bp, double b, double alpha,
                                double dx = 1e-3) {
  if (!(a < ap && ap < bp && bp < b))
    throw BadInterval("neumann_box_eigen: need a < a' < b' < b");
  if (alpha < 0.0) throw InvalidConfig("neumann_box_eigen: barrier height must be >= 0");
  auto pot = [&](double x) { return (x > ap && x < bp) ? alpha : 0.0; };
  const detail::Tridiag1D t = detail::neumann_problem(a, b, dx, pot);
  return speclin::tridiag_eigenvalue(t.main, t.off, 0);
}

// Smallest eigenvalue of the model's operator restricted to (a, b) with
// Neumann ends and the true potential. These interval values bound the whole
// line problem from below when the intervals partition the domain.
inline double neumann_interval_eigen(const Effective1D& e, double alpha, double a, double b) {
  e.validate();
  if (!(a < b)) throw BadInterval("neumann_interval_eigen: need a < b");
  auto pot = [&](double x) { return e.potential(alpha, x); };
  const detail::Tridiag1D t = detail::neumann_problem(a, b, e.dx, pot);
  return speclin::tridiag_eigenvalue(t.main, t.off, 0);
}

}  // namespace twistlab::effective
