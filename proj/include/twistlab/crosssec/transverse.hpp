#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/crosssec/grid.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/speclin/eigensolve.hpp"
#include "twistlab/speclin/sparse.hpp"

namespace twistlab::crosssec {

using speclin::SparseSymMatrix;
using speclin::Triplet;
using speclin::Vector;

// Unweighted edge Laplacian of the mask: each interior edge contributes the
// squared difference, each cut edge (active node next to a ghost) adds one to
// the diagonal. Together with the h^2 identity mass this discretizes the
// Dirichlet integral; entries stay O(1) so eigenvalues of the pencil are the
// physical energies.
inline SparseSymMatrix assemble_stiffness(const CrossSectionGrid& g) {
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.m) * 6);
  for (int p = 0; p < g.m; ++p) {
    const auto& nb = g.nbr[static_cast<std::size_t>(p)];
    for (int dir : {0, 2}) {  // east and north: every interior edge once
      const int q = nb[static_cast<std::size_t>(dir)];
      if (q >= 0) {
        t.push_back({p, p, 1.0});
        t.push_back({q, q, 1.0});
        t.push_back({p, q, -1.0});
        t.push_back({q, p, -1.0});
      }
    }
    for (int dir = 0; dir < 4; ++dir) {
      if (nb[static_cast<std::size_t>(dir)] < 0) t.push_back({p, p, 1.0});
    }
  }
  return SparseSymMatrix::from_triplets(std::move(t), g.m);
}

// Centered-difference rows of the angular derivative x3*d2 - x2*d3 with the
// coefficients evaluated at the node. Slots follow the fixed order east,
// west, north, south; ghost contributions are dropped (the factor multiplies
// a zero boundary value).
struct AngularDerivative {
  std::vector<std::array<int, 4>> cols;
  std::vector<std::array<double, 4>> coef;

  Vector apply(const Vector& u) const {
    Vector out(cols.size(), 0.0);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      double s = 0.0;
      for (int slot = 0; slot < 4; ++slot) {
        const int q = cols[p][static_cast<std::size_t>(slot)];
        if (q >= 0) s += coef[p][static_cast<std::size_t>(slot)] * u[static_cast<std::size_t>(q)];
      }
      out[p] = s;
    }
    return out;
  }
};

inline AngularDerivative build_angular_rows(const CrossSectionGrid& g) {
  AngularDerivative rows;
  rows.cols.resize(static_cast<std::size_t>(g.m));
  rows.coef.resize(static_cast<std::size_t>(g.m));
  const double inv2h = 1.0 / (2.0 * g.h);
  for (int p = 0; p < g.m; ++p) {
    const auto& nb = g.nbr[static_cast<std::size_t>(p)];
    const double x2 = g.x2[static_cast<std::size_t>(p)];
    const double x3 = g.x3[static_cast<std::size_t>(p)];
    const std::array<double, 4> c{x3 * inv2h, -x3 * inv2h, -x2 * inv2h, x2 * inv2h};
    for (int slot = 0; slot < 4; ++slot) {
      rows.cols[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)] =
          nb[static_cast<std::size_t>(slot)];
      rows.coef[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)] =
          c[static_cast<std::size_t>(slot)];
    }
  }
  return rows;
}

// Quadratic form of the angular derivative: T = h^2 * G^T G assembled row by
// row, so the twist term of the energy is symmetric positive semidefinite by
// construction.
inline SparseSymMatrix assemble_ttau(const CrossSectionGrid& g) {
  const AngularDerivative rows = build_angular_rows(g);
  const double h2 = g.h * g.h;
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.m) * 16);
  for (int p = 0; p < g.m; ++p) {
    int q[4];
    double c[4];
    int cnt = 0;
    for (int slot = 0; slot < 4; ++slot) {
      const int col = rows.cols[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)];
      if (col >= 0) {
        q[cnt] = col;
        c[cnt] = rows.coef[static_cast<std::size_t>(p)][static_cast<std::size_t>(slot)];
        ++cnt;
      }
    }
    for (int i = 0; i < cnt; ++i)
      for (int j = 0; j < cnt; ++j) t.push_back({q[i], q[j], h2 * c[i] * c[j]});
  }
  return SparseSymMatrix::from_triplets(std::move(t), g.m);
}

// Angular derivative of a computed transverse ground state. For rotationally
// invariant shapes the continuum ground state is radial and the derivative
// vanishes identically; we return that identity exactly instead of a
// staircase finite difference, whose pointwise error is only O(h) at the
// boundary and would pollute every constant built from this field.
inline Vector ground_state_angular_field(const CrossSectionGrid& g, const Vector& chi) {
  if (g.shape.rotation_invariant()) return Vector(static_cast<std::size_t>(g.m), 0.0);
  return build_angular_rows(g).apply(chi);
}

// Coupling constant of the effective model: the squared L2 norm of the
// angular derivative of the beta = 0 ground state. Rectangles use a closed
// trapezoid quadrature: interior nodes carry the centered field at full
// weight, boundary lattice nodes carry the odd-reflection normal derivative
// at half weight (the tangential part vanishes on the edge and the corners
// contribute nothing). Plain interior sums miss an O(h) boundary strip and
// read several percent low. Staircase shapes keep the plain sum; nothing
// sharp is claimed for them off center.
inline double compute_C_omega(const CrossSectionGrid& g, const Vector& j1) {
  if (g.shape.rotation_invariant()) return 0.0;
  const AngularDerivative rows = build_angular_rows(g);
  const Vector gj = rows.apply(j1);
  const double h = g.h;
  double total = 0.0;
  for (double v : gj) total += v * v;
  total *= h * h;
  if (g.shape.kind != ShapeKind::rectangle) return total;

  const CrossSection& cs = g.shape;
  const int nx = static_cast<int>(std::lround(cs.width / h));
  const int ny = static_cast<int>(std::lround(cs.height / h));
  const double x0 = cs.offset[0] - 0.5 * cs.width;
  const double y0 = cs.offset[1] - 0.5 * cs.height;
  auto node = [&](int k, int l) { return (l - 1) * (nx - 1) + (k - 1); };
  double bd = 0.0;
  struct Side {
    int fixed, inner;
    double sgn;
  };
  for (int k = 1; k < nx; ++k) {  // bottom and top edges: normal along x3
    const double x2 = x0 + k * h;
    for (const Side s : {Side{0, 1, -1.0}, Side{ny, ny - 1, 1.0}}) {
      const double u_in = j1[static_cast<std::size_t>(node(k, s.inner))];
      const double dn = -u_in / h;
      const double fn = -x2 * s.sgn;
      bd += 0.5 * (fn * dn) * (fn * dn);
    }
  }
  for (int l = 1; l < ny; ++l) {  // left and right edges: normal along x2
    const double x3 = y0 + l * h;
    for (const Side s : {Side{0, 1, -1.0}, Side{nx, nx - 1, 1.0}}) {
      const double u_in = j1[static_cast<std::size_t>(node(s.inner, l))];
      const double dn = -u_in / h;
      const double fn = x3 * s.sgn;
      bd += 0.5 * (fn * dn) * (fn * dn);
    }
  }
  return total + h * h * bd;
}

struct TransverseGroundState {
  double beta = 0.0;
  double lambda1 = 0.0;  // ground energy of the twisted transverse form
  Vector chi;            // positive ground state, unit quadrature L2 norm
  double E1 = 0.0;       // untwisted ground energy
  Vector J1;             // untwisted ground state, same normalization
  double C_omega = 0.0;
  double a = 0.0;  // sup over the closure of |x'| from the rotation origin
  int iterations = 0;
  std::string method;
};

namespace detail {

inline void fix_sign_and_check(Vector& v) {
  double s = 0.0;
  for (double x : v) s += x;
  if (s < 0.0)
    for (double& x : v) x = -x;
  double mx = 0.0, mn = 0.0;
  for (double x : v) {
    mx = std::max(mx, x);
    mn = std::min(mn, x);
  }
  if (mn < -1e-8 * mx)
    throw NonPositiveGroundState("transverse ground state changes sign");
}

}  // namespace detail

inline TransverseGroundState solve_transverse(const CrossSectionGrid& g, double beta,
                                              const speclin::EigenOptions& base) {
  if (g.m <= 0) throw EmptyGrid("solve_transverse: empty grid");
  speclin::EigenOptions opts = base;
  opts.k = 1;
  opts.block = std::min(opts.block, g.m);

  const SparseSymMatrix a2 = assemble_stiffness(g);
  const SparseSymMatrix mass =
      speclin::diagonal_matrix(Vector(static_cast<std::size_t>(g.m), g.h * g.h));

  TransverseGroundState out;
  out.beta = beta;

  speclin::EigenResult base_res = speclin::smallest_eigenpairs(a2, &mass, opts);
  out.E1 = base_res.values[0];
  out.J1 = std::move(base_res.vectors[0]);
  detail::fix_sign_and_check(out.J1);
  out.iterations = base_res.iterations;
  out.method = base_res.method;

  if (beta == 0.0) {
    out.lambda1 = out.E1;
    out.chi = out.J1;
  } else {
    std::vector<Triplet> t;
    const SparseSymMatrix tt = assemble_ttau(g);
    t.reserve(a2.nnz() + tt.nnz());
    a2.for_each([&](int i, int j, double v) { t.push_back({i, j, v}); });
    const double b2 = beta * beta;
    tt.for_each([&](int i, int j, double v) { t.push_back({i, j, b2 * v}); });
    const SparseSymMatrix a = SparseSymMatrix::from_triplets(std::move(t), g.m);
    speclin::EigenResult res = speclin::smallest_eigenpairs(a, &mass, opts);
    out.lambda1 = res.values[0];
    out.chi = std::move(res.vectors[0]);
    detail::fix_sign_and_check(out.chi);
    out.iterations += res.iterations;
    out.method = res.method;
  }

  double node_r = 0.0;
  for (int p = 0; p < g.m; ++p)
    node_r = std::max(node_r, std::hypot(g.x2[static_cast<std::size_t>(p)],
                                         g.x3[static_cast<std::size_t>(p)]));
  out.a = std::max(node_r, g.shape.radius_bound());
  out.C_omega = compute_C_omega(g, out.J1);
  return out;
}

inline TransverseGroundState solve_transverse(const CrossSectionGrid& g, double beta,
                                              double tol = 1e-9) {
  speclin::EigenOptions opts;
  opts.tol = tol;
  return solve_transverse(g, beta, opts);
}

}  // namespace twistlab::crosssec
