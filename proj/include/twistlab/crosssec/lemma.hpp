#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "twistlab/crosssec/transverse.hpp"
#include "twistlab/errors.hpp"

namespace twistlab::crosssec {

// Grid estimates for the constants entering the perturbation bound that
// controls when the twisted form stays closed under an angular-velocity
// perturbation. alpha0_lower is the largest verified constant with
// chi >= alpha0 * dist(., boundary); c0 is the boundary Hardy constant of the
// cross-section (a configuration input, 1/4 for convex shapes); epsilon0 is
// the admissible perturbation threshold those constants certify.
struct LemmaConstants {
  double sup_laplacian_chi = 0.0;
  double sup_tau_chi = 0.0;
  double alpha0_lower = 0.0;
  double c0 = 0.25;
  double epsilon0 = 0.0;
};

// The Laplacian of chi is recovered from its eigen-equation,
// lap(chi) = -lambda1*chi - beta^2 * dtau^2(chi), instead of a second
// difference of the grid values; the identity is exact for the continuum
// ground state and avoids one-sided stencils at the boundary.
inline LemmaConstants estimate_lemma_constants(const CrossSectionGrid& g, const Vector& chi,
                                               double lambda1, double beta, double c0 = 0.25) {
  if (static_cast<int>(chi.size()) != g.m)
    throw DimensionMismatch("estimate_lemma_constants: chi does not match the grid");
  if (c0 < 0.0) throw InvalidConfig("estimate_lemma_constants: c0 must be nonnegative");

  LemmaConstants out;
  out.c0 = c0;

  const Vector gt = ground_state_angular_field(g, chi);
  const Vector gtt = build_angular_rows(g).apply(gt);
  const double b2 = beta * beta;
  double sup_tau = 0.0, sup_lap = 0.0, alpha0 = std::numeric_limits<double>::infinity();
  for (int p = 0; p < g.m; ++p) {
    const std::size_t sp = static_cast<std::size_t>(p);
    sup_tau = std::max(sup_tau, std::abs(gt[sp]));
    sup_lap = std::max(sup_lap, std::abs(-lambda1 * chi[sp] - b2 * gtt[sp]));
    const double d = g.shape.boundary_distance(g.x2[sp], g.x3[sp]);
    if (!(d > 0.0))
      throw ZeroDistance("estimate_lemma_constants: node on the boundary");
    alpha0 = std::min(alpha0, chi[sp] / d);
  }
  out.sup_tau_chi = sup_tau;
  out.sup_laplacian_chi = sup_lap;
  out.alpha0_lower = alpha0;
  if (c0 == 0.0)
    out.epsilon0 = 0.0;
  else if (sup_tau == 0.0)
    out.epsilon0 = std::numeric_limits<double>::infinity();
  else
    out.epsilon0 = std::sqrt(c0 * alpha0 * alpha0 / (sup_tau * sup_tau));
  return out;
}

}  // namespace twistlab::crosssec
