#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "twistlab/crosssec/transverse.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/speclin/eigensolve.hpp"

namespace twistlab::crosssec {

// Lowest eigenvalue of the weighted pencil behind the effective coupling
// estimate: the form ||chi grad(phi)||^2 + eps^2 ||(d_tau chi) phi||^2 against
// the chi^2-weighted mass. Edge weights take chi at the edge midpoint (the
// mean of the endpoint values). There is no essential boundary condition:
// the weight chi^2 vanishes toward the boundary, and constants must stay
// admissible, since they are the minimizing sequence at eps = 0.
inline double solve_mu(const CrossSectionGrid& g, const Vector& chi, double eps,
                       const speclin::EigenOptions& base) {
  if (static_cast<int>(chi.size()) != g.m)
    throw DimensionMismatch("solve_mu: chi does not match the grid");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.m) * 6);
  for (int p = 0; p < g.m; ++p) {
    const auto& nb = g.nbr[static_cast<std::size_t>(p)];
    for (int dir : {0, 2}) {
      const int q = nb[static_cast<std::size_t>(dir)];
      if (q >= 0) {
        const double mid = 0.5 * (chi[static_cast<std::size_t>(p)] +
                                  chi[static_cast<std::size_t>(q)]);
        const double w = mid * mid;
        t.push_back({p, p, w});
        t.push_back({q, q, w});
        t.push_back({p, q, -w});
        t.push_back({q, p, -w});
      }
    }
  }
  const Vector gt = ground_state_angular_field(g, chi);
  const double h2 = g.h * g.h;
  Vector mdiag(static_cast<std::size_t>(g.m));
  for (int p = 0; p < g.m; ++p) {
    const std::size_t sp = static_cast<std::size_t>(p);
    t.push_back({p, p, eps * eps * h2 * gt[sp] * gt[sp]});
    mdiag[sp] = h2 * chi[sp] * chi[sp];
  }
  const SparseSymMatrix k = SparseSymMatrix::from_triplets(std::move(t), g.m);
  const SparseSymMatrix mass = speclin::diagonal_matrix(mdiag);

  speclin::EigenOptions opts = base;
  opts.k = 1;
  opts.block = std::min(opts.block, g.m);
  return speclin::smallest_eigenpairs(k, &mass, opts).values[0];
}

inline double solve_mu(const CrossSectionGrid& g, const Vector& chi, double eps,
                       double tol = 1e-9) {
  speclin::EigenOptions opts;
  opts.tol = tol;
  return solve_mu(g, chi, eps, opts);
}

}  // namespace twistlab::crosssec
