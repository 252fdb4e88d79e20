#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "twistlab/crosssec/grid.hpp"
#include "twistlab/crosssec/transverse.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/speclin/eigensolve.hpp"
#include "twistlab/speclin/sparse.hpp"
#include "twistlab/tube/profile.hpp"

namespace twistlab::tube {

using speclin::SparseSymMatrix;
using speclin::Triplet;
using speclin::Vector;

// Truncated tube (-L, L) x omega with Dirichlet planes at both ends. The
// longitudinal lattice keeps the interior planes x1 = -L + j*h1; an optional
// interface cut duplicates the x1 = 0 plane into a left and a right copy with
// no edge between them, which turns the cut into a natural (Neumann) boundary
// for both halves.
struct TubeDiscretization {
  double L = 10.0;
  double h1 = 0.125;
  crosssec::CrossSectionGrid cross;
  bool interface_cut = false;
};

namespace detail {

// Count of h1-segments on (-L, L), throwing on anything the longitudinal
// lattice cannot represent. Interior planes number one less.
inline int validated_segments(double L, double h1) {
  if (!(h1 > 0.0)) throw BadSpacing("tube: plane spacing must be positive");
  if (!(L > 0.0)) throw InvalidConfig("tube: half-length must be positive");
  const double two_l = 2.0 * L;
  const long planes = std::lround(two_l / h1);
  if (std::abs(static_cast<double>(planes) * h1 - two_l) > 1e-9 * std::max(1.0, two_l))
    throw BadSpacing("tube: 2L must be an integer multiple of h1");
  if (planes < 2) throw EmptyGrid("tube: no interior plane between the end walls");
  return static_cast<int>(planes);
}

}  // namespace detail

inline TubeDiscretization make_tube(const crosssec::CrossSection& shape, double h,
                                    double L, double h1, bool interface_cut = false) {
  detail::validated_segments(L, h1);
  TubeDiscretization d;
  d.L = L;
  d.h1 = h1;
  d.cross = crosssec::build_grid(shape, h);
  d.interface_cut = interface_cut;
  return d;
}

struct AssembledTube {
  SparseSymMatrix A;  // quadratic form of the twisted energy
  SparseSymMatrix M;  // lumped mass, diag(wpl_j * h^2)
  SparseSymMatrix W;  // Hardy weight, M scaled by 1/(1 + x1^2)
  Vector mdiag;
  Vector wdiag;
  double lambda1_h = 0.0;  // transverse threshold at the asymptotic rate beta

  std::vector<double> x1;  // plane stations, the cut station appearing twice
  std::vector<int> side;   // 0 left of the cut, 1 right; all 0 without a cut
  std::vector<double> wpl; // plane quadrature weights (h1, halved at the cut)
  int np = 0;              // planes kept
  int m = 0;               // nodes per plane
  double h1 = 0.0;
  double L = 0.0;
  bool interface_cut = false;

  TwistProfile profile;
  crosssec::CrossSectionGrid grid;
  crosssec::TransverseGroundState cross_state;  // at beta, same lattice

  std::size_t n() const { return A.rows(); }
  int node(int plane, int c) const { return plane * m + c; }
};

namespace detail {

// Longitudinal derivative stencil of one plane: pairs (plane, coefficient).
// Interior planes use the centered difference over 2*h1. The Dirichlet end
// planes keep the centered stencil and simply drop the ghost arm, while an
// interface copy has no ghost value to lean on and falls back to the
// one-sided difference toward its own half.
inline void d1_stencil(int j, int np, const std::vector<int>& side, double h1,
                       std::pair<int, double> out[2], int& cnt) {
  const bool has_left = j > 0 && side[static_cast<std::size_t>(j - 1)] ==
                                     side[static_cast<std::size_t>(j)];
  const bool has_right = j + 1 < np && side[static_cast<std::size_t>(j + 1)] ==
                                           side[static_cast<std::size_t>(j)];
  cnt = 0;
  const double c2 = 0.5 / h1;
  if (has_left && has_right) {
    out[cnt++] = {j + 1, c2};
    out[cnt++] = {j - 1, -c2};
  } else if (!has_left && has_right) {
    if (j == 0) {
      out[cnt++] = {j + 1, c2};  // centered, ghost value is zero
    } else {
      out[cnt++] = {j + 1, 1.0 / h1};  // right copy of the cut
      out[cnt++] = {j, -1.0 / h1};
    }
  } else if (has_left && !has_right) {
    if (j == np - 1) {
      out[cnt++] = {j - 1, -c2};
    } else {
      out[cnt++] = {j, 1.0 / h1};  // left copy of the cut
      out[cnt++] = {j - 1, -1.0 / h1};
    }
  }
}

}  // namespace detail

inline AssembledTube assemble(const TubeDiscretization& d, const TwistProfile& prof,
                              const speclin::EigenOptions& eig = {}) {
  const int segments = detail::validated_segments(d.L, d.h1);

  int jmid = -1;
  if (d.interface_cut) {
    const long q = std::lround(d.L / d.h1);
    if (std::abs(static_cast<double>(q) * d.h1 - d.L) > 1e-9 * std::max(1.0, d.L))
      throw BadSpacing("tube: the interface cut needs a plane at x1 = 0");
    jmid = static_cast<int>(q);  // 1 <= jmid <= segments - 1 once planes >= 2
  }

  AssembledTube t;
  t.h1 = d.h1;
  t.L = d.L;
  t.interface_cut = d.interface_cut;
  t.profile = prof;
  t.grid = d.cross;
  t.m = d.cross.m;

  for (int j = 1; j <= segments - 1; ++j) {
    const double x = -d.L + static_cast<double>(j) * d.h1;
    if (d.interface_cut && j == jmid) {
      t.x1.push_back(x);
      t.side.push_back(0);
      t.wpl.push_back(0.5 * d.h1);
      t.x1.push_back(x);
      t.side.push_back(1);
      t.wpl.push_back(0.5 * d.h1);
    } else {
      t.x1.push_back(x);
      t.side.push_back(d.interface_cut && j > jmid ? 1 : 0);
      t.wpl.push_back(d.h1);
    }
  }
  t.np = static_cast<int>(t.x1.size());
  const int np = t.np;
  const int m = t.m;
  const int n = np * m;

  const SparseSymMatrix a2 = crosssec::assemble_stiffness(d.cross);
  const SparseSymMatrix tt = crosssec::assemble_ttau(d.cross);
  const crosssec::AngularDerivative gt = crosssec::build_angular_rows(d.cross);
  const double h2 = d.cross.h * d.cross.h;
  const double s1 = h2 / d.h1;

  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(np) * (a2.nnz() + tt.nnz() + 20 * static_cast<std::size_t>(m)));

  for (int j = 0; j < np; ++j) {
    const int off = j * m;
    const double w = t.wpl[static_cast<std::size_t>(j)];
    const double td = prof.theta_dot(t.x1[static_cast<std::size_t>(j)]);

    a2.for_each([&](int r, int c, double v) {
      trip.push_back({off + r, off + c, w * v});
    });
    if (td != 0.0) {
      const double wt = w * td * td;
      tt.for_each([&](int r, int c, double v) {
        trip.push_back({off + r, off + c, wt * v});
      });
    }
  }

  // longitudinal edges between consecutive same-side planes, plus the
  // Dirichlet ghost diagonals at the end walls
  for (int j = 0; j + 1 < np; ++j) {
    if (t.side[static_cast<std::size_t>(j)] != t.side[static_cast<std::size_t>(j + 1)])
      continue;
    for (int c = 0; c < m; ++c) {
      const int p = j * m + c;
      const int q = (j + 1) * m + c;
      trip.push_back({p, p, s1});
      trip.push_back({q, q, s1});
      trip.push_back({p, q, -s1});
      trip.push_back({q, p, -s1});
    }
  }
  if (np > 0) {
    for (int c = 0; c < m; ++c) {
      trip.push_back({c, c, s1});
      trip.push_back({(np - 1) * m + c, (np - 1) * m + c, s1});
    }
  }

  // mixed twist coupling: -2 * wpl * h^2 * theta_dot * (D1 psi, Gtau psi)
  std::pair<int, double> st[2];
  int cnt = 0;
  for (int j = 0; j < np; ++j) {
    const double td = prof.theta_dot(t.x1[static_cast<std::size_t>(j)]);
    const double lam = t.wpl[static_cast<std::size_t>(j)] * h2 * td;
    if (lam == 0.0) continue;
    detail::d1_stencil(j, np, t.side, d.h1, st, cnt);
    if (cnt == 0) continue;
    for (int c = 0; c < m; ++c) {
      const auto& gcols = gt.cols[static_cast<std::size_t>(c)];
      const auto& gcoef = gt.coef[static_cast<std::size_t>(c)];
      for (int k = 0; k < cnt; ++k) {
        const int rr = st[k].first * m + c;
        const double dv = st[k].second;
        for (int slot = 0; slot < 4; ++slot) {
          const int cc = gcols[static_cast<std::size_t>(slot)];
          if (cc < 0) continue;
          const double v = -lam * dv * gcoef[static_cast<std::size_t>(slot)];
          trip.push_back({rr, j * m + cc, v});
          trip.push_back({j * m + cc, rr, v});
        }
      }
    }
  }

  t.A = SparseSymMatrix::from_triplets(std::move(trip), n);

  t.mdiag.assign(static_cast<std::size_t>(n), 0.0);
  t.wdiag.assign(static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < np; ++j) {
    const double mw = t.wpl[static_cast<std::size_t>(j)] * h2;
    const double x = t.x1[static_cast<std::size_t>(j)];
    const double ww = mw / (1.0 + x * x);
    for (int c = 0; c < m; ++c) {
      t.mdiag[static_cast<std::size_t>(j * m + c)] = mw;
      t.wdiag[static_cast<std::size_t>(j * m + c)] = ww;
    }
  }
  t.M = speclin::diagonal_matrix(t.mdiag);
  t.W = speclin::diagonal_matrix(t.wdiag);

  t.cross_state = crosssec::solve_transverse(d.cross, prof.beta, eig);
  t.lambda1_h = t.cross_state.lambda1;
  return t;
}

}  // namespace twistlab::tube
