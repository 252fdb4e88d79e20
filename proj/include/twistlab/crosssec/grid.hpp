#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "twistlab/crosssec/shape.hpp"
#include "twistlab/errors.hpp"

namespace twistlab::crosssec {

// Masked five-point lattice over the cross-section. Node coordinates are stored
// relative to the rotation origin. A neighbor id of -1 marks a homogeneous
// Dirichlet ghost (the lattice point falls outside the shape).
struct CrossSectionGrid {
  double h = 0.0;
  int m = 0;
  std::vector<double> x2, x3;
  // Per node: {east(+x2), west(-x2), north(+x3), south(-x3)}, -1 for ghosts.
  std::vector<std::array<int, 4>> nbr;
  CrossSection shape;
};

namespace detail {

inline void check_connected(const CrossSectionGrid& g) {
  if (g.m == 0) throw EmptyGrid("build_grid: no interior node fits the shape");
  std::vector<char> seen(static_cast<std::size_t>(g.m), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int p = stack.back();
    stack.pop_back();
    for (int q : g.nbr[static_cast<std::size_t>(p)]) {
      if (q >= 0 && !seen[static_cast<std::size_t>(q)]) {
        seen[static_cast<std::size_t>(q)] = 1;
        ++reached;
        stack.push_back(q);
      }
    }
  }
  if (reached != g.m)
    throw DisconnectedGrid("build_grid: active nodes split into several components");
}

}  // namespace detail

// Rectangles align the lattice with the sides (corner anchored), so the
// Dirichlet boundary is met exactly; circular shapes get a staircase mask
// anchored at their center. Node order is row major with x3 as the outer
// index, which every assembly routine and oracle in this project relies on.
inline CrossSectionGrid build_grid(const CrossSection& cs, double h) {
  cs.validate();
  if (!(h > 0.0)) throw BadSpacing("build_grid: spacing must be positive");

  CrossSectionGrid g;
  g.h = h;
  g.shape = cs;

  if (cs.kind == ShapeKind::rectangle) {
    const double rx = cs.width / h;
    const double ry = cs.height / h;
    const int nx = static_cast<int>(std::lround(rx));
    const int ny = static_cast<int>(std::lround(ry));
    if (nx <= 1 || ny <= 1)
      throw EmptyGrid("build_grid: no interior node fits the shape");
    if (std::abs(nx - rx) > 1e-9 || std::abs(ny - ry) > 1e-9)
      throw BadSpacing("build_grid: rectangle sides must be integer multiples of h");
    const double x0 = cs.offset[0] - 0.5 * cs.width;
    const double y0 = cs.offset[1] - 0.5 * cs.height;
    g.m = (nx - 1) * (ny - 1);
    g.x2.reserve(static_cast<std::size_t>(g.m));
    g.x3.reserve(static_cast<std::size_t>(g.m));
    g.nbr.reserve(static_cast<std::size_t>(g.m));
    for (int l = 1; l < ny; ++l) {
      for (int k = 1; k < nx; ++k) {
        g.x2.push_back(x0 + k * h);
        g.x3.push_back(y0 + l * h);
        const int p = (l - 1) * (nx - 1) + (k - 1);
        g.nbr.push_back({k + 1 < nx ? p + 1 : -1, k - 1 > 0 ? p - 1 : -1,
                         l + 1 < ny ? p + nx - 1 : -1, l - 1 > 0 ? p - nx + 1 : -1});
      }
    }
    detail::check_connected(g);
    return g;
  }

  const double ro = (cs.kind == ShapeKind::disc) ? cs.radius : cs.r_outer;
  const double ri = (cs.kind == ShapeKind::disc) ? 0.0 : cs.r_inner;
  const int big = static_cast<int>(std::ceil(ro / h)) + 1;
  const int side = 2 * big + 1;
  // Strict interior test with a fixed slack so lattice points that touch the
  // circle to rounding error never become active nodes.
  auto inside = [&](int k, int l) {
    const double r = std::hypot(k * h, l * h);
    if (!(r < ro - 1e-12)) return false;
    return cs.kind == ShapeKind::disc || r > ri + 1e-12;
  };

  std::vector<int> id(static_cast<std::size_t>(side) * side, -1);
  auto slot = [&](int k, int l) -> int& {
    return id[static_cast<std::size_t>(l + big) * side + (k + big)];
  };
  for (int l = -big; l <= big; ++l)
    for (int k = -big; k <= big; ++k)
      if (inside(k, l)) {
        slot(k, l) = g.m++;
        g.x2.push_back(cs.offset[0] + k * h);
        g.x3.push_back(cs.offset[1] + l * h);
      }
  if (g.m == 0) throw EmptyGrid("build_grid: no interior node fits the shape");
  g.nbr.reserve(static_cast<std::size_t>(g.m));
  for (int l = -big; l <= big; ++l)
    for (int k = -big; k <= big; ++k)
      if (slot(k, l) >= 0) {
        auto at = [&](int kk, int ll) -> int {
          if (kk < -big || kk > big || ll < -big || ll > big) return -1;
          return slot(kk, ll);
        };
        g.nbr.push_back({at(k + 1, l), at(k - 1, l), at(k, l + 1), at(k, l - 1)});
      }
  detail::check_connected(g);
  return g;
}

}  // namespace twistlab::crosssec
