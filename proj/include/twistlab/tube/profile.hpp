#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "twistlab/errors.hpp"

namespace twistlab::tube {

enum class ProfileKind { zero, indicator, tent, tabulated };

// Twist velocity theta_dot(x1) = beta + alpha * eps(x1). The two named
// profiles live on [-support, support] (the breakpoints of the indicator
// belong to the closed interval); tabulated samples are read on a uniform
// closed grid over the same interval and interpolated linearly.
struct TwistProfile {
  ProfileKind kind = ProfileKind::zero;
  double beta = 0.0;
  double alpha = 0.0;
  double support = 1.0;
  std::vector<double> samples;  // tabulated kind only

  static TwistProfile zero(double beta) {
    TwistProfile p;
    p.kind = ProfileKind::zero;
    p.beta = beta;
    return p;
  }
  static TwistProfile indicator(double beta, double alpha, double support = 1.0) {
    TwistProfile p;
    p.kind = ProfileKind::indicator;
    p.beta = beta;
    p.alpha = alpha;
    p.support = support;
    p.validate();
    return p;
  }
  static TwistProfile tent(double beta, double alpha, double support = 1.0) {
    TwistProfile p;
    p.kind = ProfileKind::tent;
    p.beta = beta;
    p.alpha = alpha;
    p.support = support;
    p.validate();
    return p;
  }
  static TwistProfile tabulated(double beta, double alpha, std::vector<double> samples,
                                double support = 1.0) {
    TwistProfile p;
    p.kind = ProfileKind::tabulated;
    p.beta = beta;
    p.alpha = alpha;
    p.support = support;
    p.samples = std::move(samples);
    p.validate();
    return p;
  }

  void validate() const {
    if (kind == ProfileKind::zero) return;
    if (!(support > 0.0)) throw InvalidConfig("profile: support half-width must be positive");
    if (kind == ProfileKind::tabulated && samples.size() < 2)
      throw InvalidConfig("profile: tabulated kind needs at least two samples");
  }

  double eps(double x1) const {
    const double ax = std::abs(x1);
    switch (kind) {
      case ProfileKind::zero:
        return 0.0;
      case ProfileKind::indicator:
        return ax <= support ? 1.0 : 0.0;
      case ProfileKind::tent:
        return std::max(0.0, 1.0 - ax / support);
      case ProfileKind::tabulated: {
        if (ax > support) return 0.0;
        const double t = (x1 + support) / (2.0 * support) *
                         static_cast<double>(samples.size() - 1);
        const std::size_t i =
            std::min(samples.size() - 2, static_cast<std::size_t>(std::max(0.0, t)));
        const double f = t - static_cast<double>(i);
        return samples[i] + f * (samples[i + 1] - samples[i]);
      }
    }
    return 0.0;
  }

  double theta_dot(double x1) const { return beta + alpha * eps(x1); }

  double eps_sup() const {
    switch (kind) {
      case ProfileKind::zero:
        return 0.0;
      case ProfileKind::indicator:
      case ProfileKind::tent:
        return 1.0;
      case ProfileKind::tabulated: {
        double s = 0.0;
        for (double v : samples) s = std::max(s, std::abs(v));
        return s;
      }
    }
    return 0.0;
  }

  // integral of eps over the line (exact for the named kinds, trapezoid for
  // tabulated samples)
  double eps_integral() const {
    switch (kind) {
      case ProfileKind::zero:
        return 0.0;
      case ProfileKind::indicator:
        return 2.0 * support;
      case ProfileKind::tent:
        return support;
      case ProfileKind::tabulated: {
        const double dx = 2.0 * support / static_cast<double>(samples.size() - 1);
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i)
          s += 0.5 * (samples[i] + samples[i + 1]) * dx;
        return s;
      }
    }
    return 0.0;
  }

  double eps_sq_integral() const {
    switch (kind) {
      case ProfileKind::zero:
        return 0.0;
      case ProfileKind::indicator:
        return 2.0 * support;
      case ProfileKind::tent:
        return 2.0 * support / 3.0;
      case ProfileKind::tabulated: {
        // exact integral of the squared linear interpolant, cell by cell
        const double dx = 2.0 * support / static_cast<double>(samples.size() - 1);
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
          const double a = samples[i];
          const double b = samples[i + 1];
          s += (a * a + a * b + b * b) / 3.0 * dx;
        }
        return s;
      }
    }
    return 0.0;
  }

  std::string kind_name() const {
    switch (kind) {
      case ProfileKind::zero:
        return "zero";
      case ProfileKind::indicator:
        return "indicator";
      case ProfileKind::tent:
        return "tent";
      default:
        return "tabulated";
    }
  }
};

inline double theta_dot(const TwistProfile& p, double x1) { return p.theta_dot(x1); }

}  // namespace twistlab::tube
