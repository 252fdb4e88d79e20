#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "twistlab/errors.hpp"

namespace twistlab::crosssec {

enum class ShapeKind { rectangle, disc, annulus };

// Bounded open cross-section placed in the (x2,x3) plane. The offset moves
// the shape's own center relative to the rotation origin; all coordinates
// handed to the discretization are measured from that origin, because the
// angular derivative x3*d2 - x2*d3 lives there.
struct CrossSection {
  ShapeKind kind = ShapeKind::rectangle;
  double width = 1.0;    // rectangle
  double height = 1.0;   // rectangle
  double radius = 0.5;   // disc
  double r_inner = 0.0;  // annulus
  double r_outer = 0.0;  // annulus
  std::array<double, 2> offset{0.0, 0.0};

  static CrossSection rectangle(double w, double h,
                                std::array<double, 2> off = {0.0, 0.0}) {
    CrossSection cs;
    cs.kind = ShapeKind::rectangle;
    cs.width = w;
    cs.height = h;
    cs.offset = off;
    cs.validate();
    return cs;
  }
  static CrossSection disc(double r, std::array<double, 2> off = {0.0, 0.0}) {
    CrossSection cs;
    cs.kind = ShapeKind::disc;
    cs.radius = r;
    cs.offset = off;
    cs.validate();
    return cs;
  }
  static CrossSection annulus(double ri, double ro,
                              std::array<double, 2> off = {0.0, 0.0}) {
    CrossSection cs;
    cs.kind = ShapeKind::annulus;
    cs.r_inner = ri;
    cs.r_outer = ro;
    cs.offset = off;
    cs.validate();
    return cs;
  }

  void validate() const {
    switch (kind) {
      case ShapeKind::rectangle:
        if (!(width > 0.0) || !(height > 0.0))
          throw InvalidConfig("cross-section: rectangle sides must be positive");
        break;
      case ShapeKind::disc:
        if (!(radius > 0.0))
          throw InvalidConfig("cross-section: disc radius must be positive");
        break;
      case ShapeKind::annulus:
        if (!(r_inner > 0.0) || !(r_outer > r_inner))
          throw InvalidConfig("cross-section: annulus needs 0 < r_inner < r_outer");
        break;
    }
  }

  std::string name() const {
    switch (kind) {
      case ShapeKind::rectangle: return "rectangle";
      case ShapeKind::disc: return "disc";
      default: return "annulus";
    }
  }

  // Rotations about the origin map the set onto itself only for circular
  // shapes centered at the origin. Several identities downstream (C_omega = 0,
  // vanishing angular derivative of the ground state) hold exactly in that
  // case and are applied exactly rather than left to finite differences.
  bool rotation_invariant() const {
    if (kind == ShapeKind::rectangle) return false;
    return offset[0] == 0.0 && offset[1] == 0.0;
  }

  // Signed distance from a point (given relative to the rotation origin) to
  // the boundary; positive inside.
  double boundary_distance(double x2, double x3) const {
    const double u = x2 - offset[0];
    const double v = x3 - offset[1];
    switch (kind) {
      case ShapeKind::rectangle:
        return std::min(0.5 * width - std::abs(u), 0.5 * height - std::abs(v));
      case ShapeKind::disc:
        return radius - std::hypot(u, v);
      default: {
        const double r = std::hypot(u, v);
        return std::min(r - r_inner, r_outer - r);
      }
    }
  }

  // sup over the closure of |x'| measured from the rotation origin. For the
  // rectangle the supremum sits at a corner; for circular shapes it is the
  // far point of the outer circle along the offset direction.
  double radius_bound() const {
    if (kind == ShapeKind::rectangle) {
      double best = 0.0;
      for (double su : {-1.0, 1.0})
        for (double sv : {-1.0, 1.0})
          best = std::max(best, std::hypot(offset[0] + su * 0.5 * width,
                                           offset[1] + sv * 0.5 * height));
      return best;
    }
    const double ro = (kind == ShapeKind::disc) ? radius : r_outer;
    return std::hypot(offset[0], offset[1]) + ro;
  }
};

}  // namespace twistlab::crosssec
