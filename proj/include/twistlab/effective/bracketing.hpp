#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "twistlab/effective/model.hpp"
#include "twistlab/errors.hpp"

namespace twistlab::effective {

// One Neumann bracketing cell: the outer interval (a, b) carries Neumann
// conditions, the inner window (ap, bp) carries the certified barrier. The
// constant c promises potential >= c * alpha^2 on [ap, bp] for every
// alpha >= alpha_min; outside the window only the universal floor
// -C * beta^2 is used.
struct BracketInterval {
  double a = 0.0;
  double ap = 0.0;
  double bp = 0.0;
  double b = 0.0;
  double c = 0.0;
  double alpha_min = 0.0;
};

struct BracketingPlan {
  std::vector<BracketInterval> intervals;
  double dx_box = 1e-3;  // spacing for the per-interval barrier solves

  // Canonical single-interval plan for the closed-form profiles: the window
  // covers the region where eps stays above a positive fraction of its peak,
  // the outer interval pads the support, and the constants follow from the
  // window minimum of eps. Repulsive couplings (beta >= 0) take the plain
  // window minimum; attractive ones give away half of it and start the
  // certificate at alpha_min = 4 |beta| / eps_min.
  static BracketingPlan for_profile(const tube::TwistProfile& p, double C_omega,
                                    double pad = 0.5) {
    if (C_omega < 0.0) throw InvalidConfig("for_profile: coupling constant must be >= 0");
    if (!(pad > 0.0)) throw InvalidConfig("for_profile: pad must be positive");
    BracketingPlan plan;
    if (p.kind == tube::ProfileKind::zero) return plan;
    const double s = p.support;
    BracketInterval iv;
    iv.a = -s - pad;
    iv.b = s + pad;
    double eps_min = 0.0;
    switch (p.kind) {
      case tube::ProfileKind::indicator:
        iv.ap = -s;
        iv.bp = s;
        eps_min = 1.0;
        break;
      case tube::ProfileKind::tent:
        iv.ap = -0.75 * s;
        iv.bp = 0.75 * s;
        eps_min = 0.25;
        break;
      case tube::ProfileKind::tabulated: {
        iv.ap = -0.75 * s;
        iv.bp = 0.75 * s;
        eps_min = p.eps(iv.ap);
        const std::size_t ns = 512;
        for (std::size_t i = 0; i <= ns; ++i) {
          const double x = iv.ap + (iv.bp - iv.ap) * static_cast<double>(i) /
                                       static_cast<double>(ns);
          eps_min = std::min(eps_min, p.eps(x));
        }
        break;
      }
      case tube::ProfileKind::zero:
        break;
    }
    if (!(eps_min > 0.0))
      throw PlanInvalid("for_profile: profile vanishes inside the canonical window");
    const double base = C_omega * (eps_min * eps_min);
    if (p.beta >= 0.0) {
      iv.c = base;
      iv.alpha_min = 0.0;
    } else {
      iv.c = 0.5 * base;
      iv.alpha_min = 4.0 * std::abs(p.beta) / eps_min;
    }
    plan.intervals.push_back(iv);
    return plan;
  }
};

// Lower bound for the model restricted to one bracketing cell: replace the
// potential by the certified barrier on the window and by the floor
// -C beta^2 elsewhere, which shifts a pure barrier box problem.
inline double interval_lower_bound(const Effective1D& e, const BracketInterval& iv,
                                   double alpha, double dx_box = 1e-3) {
  const double floor = e.C_omega * e.profile.beta * e.profile.beta;
  return neumann_box_eigen(iv.a, iv.ap, iv.bp, iv.b, iv.c * alpha * alpha + floor, dx_box) -
         floor;
}

// Checks the plan against the model: interval geometry and ordering,
// disjointness, coverage of the profile support, and the window bound
// potential >= c alpha^2 for all alpha >= alpha_min. The bound is linear in
// 1/alpha, so sampling the window at ten times the grid density including
// both endpoints and testing the two extreme couplings is exhaustive up to
// the sampling resolution.
inline void verify_plan(const Effective1D& e, const BracketingPlan& plan) {
  e.validate();
  if (!(plan.dx_box > 0.0)) throw PlanInvalid("verify_plan: dx_box must be positive");
  const tube::TwistProfile& p = e.profile;
  for (const BracketInterval& iv : plan.intervals) {
    if (!(iv.a < iv.ap && iv.ap < iv.bp && iv.bp < iv.b))
      throw PlanInvalid("verify_plan: interval endpoints out of order");
    if (!(iv.c > 0.0)) throw PlanInvalid("verify_plan: window constant must be positive");
    if (iv.alpha_min < 0.0) throw PlanInvalid("verify_plan: alpha_min must be >= 0");
  }
  std::vector<BracketInterval> sorted = plan.intervals;
  std::sort(sorted.begin(), sorted.end(),
            [](const BracketInterval& l, const BracketInterval& r) { return l.a < r.a; });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    if (sorted[i].b > sorted[i + 1].a)
      throw PlanInvalid("verify_plan: intervals overlap");

  const double fine = e.dx / 10.0;
  if (p.kind != tube::ProfileKind::zero) {
    const double s = p.support;
    const std::size_t ns = static_cast<std::size_t>(std::ceil(2.0 * s / fine));
    for (std::size_t i = 0; i <= ns; ++i) {
      const double x = -s + 2.0 * s * static_cast<double>(i) / static_cast<double>(ns);
      if (p.eps(x) == 0.0) continue;
      bool covered = false;
      for (const BracketInterval& iv : plan.intervals)
        if (iv.a < x && x < iv.b) {
          covered = true;
          break;
        }
      if (!covered)
        throw PlanInvalid("verify_plan: profile support not covered by the intervals");
    }
  }

  for (const BracketInterval& iv : plan.intervals) {
    const double slack = 1e-12 * (1.0 + std::abs(iv.c));
    const std::size_t ns =
        static_cast<std::size_t>(std::ceil((iv.bp - iv.ap) / fine));
    for (std::size_t i = 0; i <= ns; ++i) {
      const double x =
          iv.ap + (iv.bp - iv.ap) * static_cast<double>(i) / static_cast<double>(ns);
      const double eps = p.eps(x);
      const double base = e.C_omega * (eps * eps);
      const double slope = 2.0 * e.C_omega * p.beta * eps;
      if (base < iv.c - slack)
        throw PlanInvalid("verify_plan: window bound fails in the large coupling limit");
      if (slope < 0.0) {
        if (!(iv.alpha_min > 0.0))
          throw PlanInvalid("verify_plan: attractive window needs alpha_min > 0");
        if (base + slope / iv.alpha_min < iv.c - slack)
          throw PlanInvalid("verify_plan: window bound fails at alpha_min");
      }
    }
  }
}

// Smallest certified coupling threshold: above the returned value every
// bracketing cell operator is nonnegative, hence so is the whole operator.
// Repulsive couplings (beta >= 0) need no certificate at all. Otherwise the
// cell bounds are monotone in alpha, so a doubling scan plus bisection down
// to tol finds the edge; the result is cross-checked against the dense solve
// at the threshold and at twice the threshold.
inline double alpha0_search(const Effective1D& e, const BracketingPlan& plan, double tol) {
  if (!(tol > 0.0)) throw InvalidConfig("alpha0_search: tol must be positive");
  verify_plan(e, plan);
  const double beta = e.profile.beta;

  double alpha0 = 0.0;
  if (beta < 0.0) {
    const double floor = e.C_omega * beta * beta;
    double alpha_min = 0.0;
    for (const BracketInterval& iv : plan.intervals) {
      const double left = std::numbers::pi / (2.0 * (iv.ap - iv.a));
      const double right = std::numbers::pi / (2.0 * (iv.b - iv.bp));
      const double limit = std::min(left * left, right * right);
      if (!(limit > floor))
        throw PlanInvalid("alpha0_search: ramp too short to clear the potential floor");
      alpha_min = std::max(alpha_min, iv.alpha_min);
    }
    auto certified = [&](double s) {
      if (s < alpha_min) return false;
      for (const BracketInterval& iv : plan.intervals)
        if (interval_lower_bound(e, iv, s, plan.dx_box) < 0.0) return false;
      return true;
    };
    if (certified(alpha_min)) {
      alpha0 = alpha_min;
    } else {
      double lo = alpha_min;
      double hi = std::max(alpha_min, 1.0);
      while (!certified(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9)
          throw PlanInvalid("alpha0_search: no threshold certified below 1e9");
      }
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (certified(mid))
          hi = mid;
        else
          lo = mid;
      }
      alpha0 = hi;
    }
  }

  for (double s : {alpha0, 2.0 * alpha0}) {
    const speclin::EigenResult res = solve_effective(e, s);
    if (res.values[0] < -tol)
      throw PlanInvalid("alpha0_search: dense solve contradicts the certificate");
  }
  return alpha0;
}

}  // namespace twistlab::effective
