#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "twistlab/crosssec/transverse.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/tube/profile.hpp"

namespace twistlab::certify {

using speclin::Vector;

// What the constant chain managed to verify, from weakest to strongest claim.
enum class Verdict { not_certified, positivity_only, local_hardy, global_hardy };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::positivity_only:
      return "positivity_only";
    case Verdict::local_hardy:
      return "local_hardy";
    case Verdict::global_hardy:
      return "global_hardy";
    default:
      return "not_certified";
  }
}

// Smallness of the repulsive perturbation: the shifted form stays nonnegative
// when ||beta*eps||_inf * a^2 <= 2, where a is the circumradius of the
// cross-section about the rotation origin. The strict variant is what the
// weighted lower bound needs; at equality the weight prefactor vanishes and
// nothing beyond plain positivity is certified.
struct SmallTwistCheck {
  double norm = 0.0;
  bool ok = false;
  bool strict_ok = false;
};

inline SmallTwistCheck check_small_positivity(double beta, double eps_sup, double a) {
  if (!(a > 0.0))
    throw InvalidConfig("check_small_positivity: circumradius must be positive");
  if (eps_sup < 0.0)
    throw InvalidConfig("check_small_positivity: sup norm must be nonnegative");
  SmallTwistCheck out;
  out.norm = std::abs(beta) * eps_sup * a * a;
  out.ok = out.norm <= 2.0;
  out.strict_ok = out.norm < 2.0;
  return out;
}

// The two window constants of the brute lower bound,
//   c1 = 1 - a^2 (3 beta^2 + 4 ||eps||^2 + 10 ||beta*eps||),
//   c2 = 1 - 4 ||eps|| / |beta|,
// together with the admissibility window that keeps both positive:
// 4 ||eps|| < |beta| < 2 / (a sqrt(23)), both inequalities strict.
struct BruteConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  bool ass_ok = false;
};

inline BruteConstants constants_c1_c2(double beta, double eps_sup, double a) {
  if (beta == 0.0)
    throw ZeroBeta("constants_c1_c2: the window needs a nonzero base twist");
  if (!(a > 0.0)) throw InvalidConfig("constants_c1_c2: circumradius must be positive");
  if (eps_sup < 0.0)
    throw InvalidConfig("constants_c1_c2: sup norm must be nonnegative");
  BruteConstants out;
  const double ab = std::abs(beta);
  out.c1 = 1.0 - a * a * (3.0 * beta * beta + 4.0 * eps_sup * eps_sup + 10.0 * ab * eps_sup);
  out.c2 = 1.0 - 4.0 * eps_sup / ab;
  out.ass_ok = 4.0 * eps_sup < ab && ab < 2.0 / (a * std::sqrt(23.0));
  return out;
}

// Chain from the interval eigenvalue nu to the global constant:
//   delta = min{1, 32 nu / (1 + 32/|I|^2)},  c_prime = delta / 64,
//   c_global = c_prime * min over x1 of (1 + x1^2) / (1 + (x1 - x1_0)^2).
// The minimized quotient is rational with critical points solving
// x^2 - x1_0 x - 1 = 0, so the minimum is taken over the two roots.
struct GlobalChain {
  double delta = 0.0;
  double c_prime = 0.0;
  double min_factor = 0.0;
  double c_global = 0.0;
};

inline GlobalChain global_chain(double nu, double i_a, double i_b, double x1_0) {
  if (!(i_b > i_a)) throw EmptyInterval("global_chain: interval has no length");
  if (!(nu > 0.0)) throw NonPositiveNu("global_chain: needs a positive nu");
  GlobalChain out;
  const double len = i_b - i_a;
  out.delta = std::min(1.0, 32.0 * nu / (1.0 + 32.0 / (len * len)));
  out.c_prime = out.delta / 64.0;
  if (x1_0 == 0.0) {
    out.min_factor = 1.0;
  } else {
    const double s = std::sqrt(x1_0 * x1_0 + 4.0);
    double best = std::numeric_limits<double>::infinity();
    for (double r : {0.5 * (x1_0 - s), 0.5 * (x1_0 + s)}) {
      const double d = r - x1_0;
      best = std::min(best, (1.0 + r * r) / (1.0 + d * d));
    }
    out.min_factor = best;
  }
  out.c_global = out.c_prime * out.min_factor;
  return out;
}

// The finitely many points where the profile may jump or kink. The
// admissibility band is a pointwise condition holding almost everywhere, so
// samples landing exactly on these points are skipped.
inline std::vector<double> profile_breakpoints(const tube::TwistProfile& p) {
  switch (p.kind) {
    case tube::ProfileKind::zero:
      return {};
    case tube::ProfileKind::indicator:
      return {-p.support, p.support};
    case tube::ProfileKind::tent:
      return {-p.support, 0.0, p.support};
    case tube::ProfileKind::tabulated: {
      std::vector<double> knots(p.samples.size());
      const double dx = 2.0 * p.support / static_cast<double>(p.samples.size() - 1);
      for (std::size_t i = 0; i < knots.size(); ++i)
        knots[i] = -p.support + static_cast<double>(i) * dx;
      return knots;
    }
  }
  return {};
}

// Admissibility band on the interval: 0 < |beta * alpha * eps(x1)| and
// |beta * alpha * eps(x1)| < (c1/c2) * epsilon0^2 at every midpoint sample
// that is not a breakpoint. A rotationally invariant section reports
// epsilon0 = +inf upstream, which leaves only the strict positivity side.
inline bool check_ass_better(const tube::TwistProfile& p, double i_a, double i_b, double c1,
                             double c2, double epsilon0, int samples = 4001) {
  if (!(i_b > i_a)) throw EmptyInterval("check_ass_better: interval has no length");
  if (!(c1 > 0.0) || !(c2 > 0.0))
    throw InvalidConfig("check_ass_better: window constants must be positive");
  if (samples < 1) throw InvalidConfig("check_ass_better: needs at least one sample");
  const double bound = c1 / c2 * epsilon0 * epsilon0;
  const std::vector<double> bp = profile_breakpoints(p);
  const double step = (i_b - i_a) / static_cast<double>(samples);
  bool seen = false;
  for (int j = 0; j < samples; ++j) {
    const double x = i_a + (static_cast<double>(j) + 0.5) * step;
    bool skip = false;
    for (double b : bp) {
      if (std::abs(x - b) <= 1e-12 * (1.0 + std::abs(b))) {
        skip = true;
        break;
      }
    }
    if (skip) continue;
    const double v = std::abs(p.beta * p.alpha * p.eps(x));
    if (!(v > 0.0) || !(v < bound)) return false;
    seen = true;
  }
  return seen;
}

// Pointwise local Hardy weight on the line times the cross-section:
//   weight(x1, x') = (2 - ||beta*eps|| a^2) * beta*eps(x1) * (dtau chi / chi)^2(x').
// The quotient uses the same discrete ground state in numerator and
// denominator; the grid stores interior nodes only, so no boundary values of
// chi are ever divided by.
struct HardyWeight {
  double prefactor = 0.0;
  tube::TwistProfile profile;
  Vector quotient_sq;

  double at(double x1, int node) const {
    return prefactor * profile.beta * profile.alpha * profile.eps(x1) *
           quotient_sq[static_cast<std::size_t>(node)];
  }
};

inline HardyWeight local_hardy_weight(const crosssec::CrossSectionGrid& g, const Vector& chi,
                                      const tube::TwistProfile& p, double a) {
  if (static_cast<int>(chi.size()) != g.m)
    throw DimensionMismatch("local_hardy_weight: chi does not match the grid");
  const SmallTwistCheck small =
      check_small_positivity(p.beta, std::abs(p.alpha) * p.eps_sup(), a);
  if (!small.strict_ok)
    throw InvalidConfig("local_hardy_weight: smallness is saturated, the prefactor vanishes");
  HardyWeight w;
  w.prefactor = 2.0 - small.norm;
  w.profile = p;
  const Vector gt = crosssec::ground_state_angular_field(g, chi);
  w.quotient_sq.assign(static_cast<std::size_t>(g.m), 0.0);
  for (int i = 0; i < g.m; ++i) {
    const std::size_t si = static_cast<std::size_t>(i);
    if (!(chi[si] > 0.0))
      throw NonPositiveChi("local_hardy_weight: ground state not positive at a node");
    const double q = gt[si] / chi[si];
    w.quotient_sq[si] = q * q;
  }
  return w;
}

}  // namespace twistlab::certify
