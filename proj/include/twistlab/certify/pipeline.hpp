#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "twistlab/certify/certificate.hpp"
#include "twistlab/crosssec/grid.hpp"
#include "twistlab/crosssec/lemma.hpp"
#include "twistlab/crosssec/mu.hpp"
#include "twistlab/crosssec/nu.hpp"
#include "twistlab/crosssec/shape.hpp"
#include "twistlab/crosssec/transverse.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/speclin/eigensolve.hpp"
#include "twistlab/tube/profile.hpp"

namespace twistlab::certify {

// One run of the constant chain. The cross-section resolution is pinned
// coarse on purpose: polygonal sections violate the smoothness the chain
// assumes at their corners, and the chi >= alpha0 * dist estimate degrades
// under refinement there, so the pipeline certifies at a fixed grid and
// reports exactly what that grid verifies.
struct CertifyConfig {
  crosssec::CrossSection shape = crosssec::CrossSection::rectangle(1.0, 1.0);
  tube::TwistProfile profile;
  double h = 1.0 / 32;
  double c0 = 0.25;            // boundary Hardy constant of the section
  double eps0_override = 0.0;  // replaces the grid threshold estimate when positive
  double interval_a = 0.0;     // admissibility interval override when a < b;
  double interval_b = 0.0;     // otherwise the profile's open support is used
  int nu_samples = 2001;       // closed 1d grid behind the interval eigenvalue
  int mu_levels = 33;          // quantized levels of the transverse eigenvalue
  int ass_samples = 4001;      // midpoint samples of the admissibility band
  speclin::EigenOptions eig;

  CertifyConfig() { eig.tol = 1e-10; }
};

struct HardyCertificate {
  // inputs, echoed from the configuration and the transverse solve
  double beta = 0.0;
  double alpha = 0.0;
  double eps_sup = 0.0;  // sup norm of the scaled perturbation alpha * eps
  std::string cross_section;
  std::string profile_kind;
  double a = 0.0;  // circumradius about the rotation origin
  double lambda1 = 0.0;
  double C_omega = 0.0;

  // hypothesis flags
  bool sign_ok = false;          // beta*eps >= 0 and not identically zero
  bool small_ok = false;         // ||beta*eps|| a^2 <= 2
  bool strict_small_ok = false;  // strict inequality
  bool ass_ok = false;           // 4||eps|| < |beta| < 2/(a sqrt(23))
  bool ass_better_ok = false;    // 0 < |beta*eps| < (c1/c2) eps0^2 on I

  // constant chain
  double small_norm = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double epsilon0 = 0.0;
  double interval_a = 0.0;
  double interval_b = 0.0;
  double nu = 0.0;
  double delta = 0.0;
  double c_prime = 0.0;
  double c_global = 0.0;

  Verdict verdict = Verdict::not_certified;
  std::string reason;  // first broken hypothesis, empty for a global certificate
};

namespace detail {

// beta * alpha * eps >= 0 everywhere with a nontrivial part. Piecewise linear
// interpolation preserves the sign of the knot values, so knots decide.
inline bool twist_sign_ok(const tube::TwistProfile& p) {
  if (p.kind == tube::ProfileKind::zero) return false;
  const double s = p.beta * p.alpha;
  if (s == 0.0) return false;
  if (p.kind == tube::ProfileKind::tabulated) {
    bool nonzero = false;
    for (double v : p.samples) {
      if (s * v < 0.0) return false;
      if (v != 0.0) nonzero = true;
    }
    return nonzero;
  }
  return s > 0.0;  // the named bumps are nonnegative
}

}  // namespace detail

// Runs the whole chain on one configuration. Configuration errors throw;
// mathematical failure of a hypothesis never does, it lands in the flags,
// the verdict and the reason string instead.
inline HardyCertificate certify_pipeline(const CertifyConfig& cfg) {
  cfg.profile.validate();
  if (!(cfg.h > 0.0)) throw InvalidConfig("certify: spacing must be positive");
  if (cfg.nu_samples < 2) throw InvalidConfig("certify: need at least two nu samples");
  if (cfg.mu_levels < 2) throw InvalidConfig("certify: need at least two mu levels");
  if (cfg.ass_samples < 1) throw InvalidConfig("certify: need at least one band sample");
  if (cfg.eps0_override < 0.0)
    throw InvalidConfig("certify: threshold override must be nonnegative");
  const bool has_override = cfg.interval_a != 0.0 || cfg.interval_b != 0.0;
  if (has_override && !(cfg.interval_b > cfg.interval_a))
    throw InvalidConfig("certify: interval override must have positive length");

  const tube::TwistProfile& p = cfg.profile;
  const crosssec::CrossSectionGrid g = crosssec::build_grid(cfg.shape, cfg.h);
  const crosssec::TransverseGroundState ts = crosssec::solve_transverse(g, p.beta, cfg.eig);

  HardyCertificate cert;
  cert.beta = p.beta;
  cert.alpha = p.alpha;
  cert.eps_sup = std::abs(p.alpha) * p.eps_sup();
  cert.cross_section = cfg.shape.name();
  cert.profile_kind = p.kind_name();
  cert.a = ts.a;
  cert.lambda1 = ts.lambda1;
  cert.C_omega = ts.C_omega;

  if (has_override) {
    cert.interval_a = cfg.interval_a;
    cert.interval_b = cfg.interval_b;
  } else if (p.kind != tube::ProfileKind::zero) {
    cert.interval_a = -p.support;
    cert.interval_b = p.support;
  }

  cert.sign_ok = detail::twist_sign_ok(p);

  const SmallTwistCheck small = check_small_positivity(p.beta, cert.eps_sup, ts.a);
  cert.small_norm = small.norm;
  cert.small_ok = small.ok;
  cert.strict_small_ok = small.strict_ok;

  // the window constants need a nonzero base twist; without one the ladder
  // cannot pass the smallness rung anyway
  if (p.beta != 0.0) {
    const BruteConstants bc = constants_c1_c2(p.beta, cert.eps_sup, ts.a);
    cert.c1 = bc.c1;
    cert.c2 = bc.c2;
    cert.ass_ok = bc.ass_ok;
  } else {
    cert.c1 = 1.0 - ts.a * ts.a * 4.0 * cert.eps_sup * cert.eps_sup;
    cert.c2 = 0.0;
    cert.ass_ok = false;
  }

  const crosssec::LemmaConstants lemma =
      crosssec::estimate_lemma_constants(g, ts.chi, ts.lambda1, p.beta, cfg.c0);
  cert.epsilon0 = cfg.eps0_override > 0.0 ? cfg.eps0_override : lemma.epsilon0;
  // a vanishing angular field (rotationally invariant section) makes every
  // weight and every transverse eigenvalue below identically zero
  const bool angular = lemma.sup_tau_chi > 0.0;

  if (cert.c1 > 0.0 && cert.c2 > 0.0 && cert.interval_b > cert.interval_a) {
    cert.ass_better_ok = check_ass_better(p, cert.interval_a, cert.interval_b, cert.c1,
                                          cert.c2, cert.epsilon0, cfg.ass_samples);
  }

  if (cert.sign_ok && cert.ass_ok && cert.ass_better_ok && angular) {
    // Quantized lower envelope of the transverse eigenvalue along the
    // interval. The eigenvalue is nondecreasing in the auxiliary epsilon,
    // so flooring each sample to the nearest level below keeps the potential,
    // and with it nu, a certified lower bound.
    const int n = cfg.nu_samples;
    const double step = (cert.interval_b - cert.interval_a) / static_cast<double>(n - 1);
    std::vector<double> e2(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double x =
          i == n - 1 ? cert.interval_b : cert.interval_a + static_cast<double>(i) * step;
      e2[static_cast<std::size_t>(i)] =
          cert.c2 / cert.c1 * std::abs(p.beta * p.alpha * p.eps(x));
    }
    const double emin = *std::min_element(e2.begin(), e2.end());
    const double emax = *std::max_element(e2.begin(), e2.end());
    std::vector<double> pot(static_cast<std::size_t>(n));
    if (emax - emin <= 1e-15 * std::max(1.0, emax)) {
      const double mu =
          std::max(0.0, crosssec::solve_mu(g, ts.chi, std::sqrt(emin), cfg.eig));
      std::fill(pot.begin(), pot.end(), cert.c1 * mu);
    } else {
      std::vector<double> table(static_cast<std::size_t>(cfg.mu_levels));
      for (int k = 0; k < cfg.mu_levels; ++k) {
        const double ek = emin + (emax - emin) * static_cast<double>(k) /
                                     static_cast<double>(cfg.mu_levels - 1);
        table[static_cast<std::size_t>(k)] =
            std::max(0.0, crosssec::solve_mu(g, ts.chi, std::sqrt(ek), cfg.eig));
      }
      for (int i = 0; i < n; ++i) {
        const std::size_t si = static_cast<std::size_t>(i);
        int k = static_cast<int>((e2[si] - emin) / (emax - emin) *
                                 static_cast<double>(cfg.mu_levels - 1));
        k = std::min(cfg.mu_levels - 1, std::max(0, k));
        pot[si] = cert.c1 * table[static_cast<std::size_t>(k)];
      }
    }
    cert.nu = crosssec::solve_nu(pot, cert.interval_b - cert.interval_a);
    if (cert.nu > 0.0) {
      const GlobalChain chain =
          global_chain(cert.nu, cert.interval_a, cert.interval_b,
                       0.5 * (cert.interval_a + cert.interval_b));
      cert.delta = chain.delta;
      cert.c_prime = chain.c_prime;
      cert.c_global = chain.c_global;
    }
  }

  if (cert.sign_ok && cert.ass_ok && cert.ass_better_ok && cert.nu > 0.0 &&
      cert.c_global > 0.0) {
    cert.verdict = Verdict::global_hardy;
  } else if (cert.sign_ok && cert.strict_small_ok && cert.ass_ok && angular) {
    cert.verdict = Verdict::local_hardy;
  } else if (cert.sign_ok && cert.small_ok) {
    cert.verdict = Verdict::positivity_only;
  } else {
    cert.verdict = Verdict::not_certified;
  }

  if (!cert.sign_ok)
    cert.reason = "beta*eps changes sign or vanishes identically";
  else if (!cert.small_ok)
    cert.reason = "smallness bound ||beta*eps|| a^2 <= 2 fails";
  else if (!cert.strict_small_ok)
    cert.reason = "smallness bound is saturated, no weight survives";
  else if (!cert.ass_ok)
    cert.reason = "twist magnitudes leave the admissible window";
  else if (!angular)
    cert.reason = "rotationally invariant cross-section, the angular field vanishes";
  else if (!cert.ass_better_ok)
    cert.reason = "perturbation leaves the admissibility band on the interval";
  else if (!(cert.nu > 0.0))
    cert.reason = "interval eigenvalue nu is not positive";
  else if (!(cert.c_global > 0.0))
    cert.reason = "global constant collapsed to zero";

  return cert;
}

// Human-readable report, one line per flag or constant.
inline void print_report(const HardyCertificate& c, std::ostream& os) {
  os << "cross-section    " << c.cross_section << "\n"
     << "profile          " << c.profile_kind << "  beta " << c.beta << "  alpha " << c.alpha
     << "  sup|alpha*eps| " << c.eps_sup << "\n"
     << "lambda1          " << c.lambda1 << "\n"
     << "C_omega          " << c.C_omega << "\n"
     << "circumradius a   " << c.a << "\n"
     << "sign_ok          " << (c.sign_ok ? "yes" : "no") << "\n"
     << "small_ok         " << (c.small_ok ? "yes" : "no") << "  (norm " << c.small_norm
     << ", strict " << (c.strict_small_ok ? "yes" : "no") << ")\n"
     << "ass_ok           " << (c.ass_ok ? "yes" : "no") << "  (c1 " << c.c1 << ", c2 " << c.c2
     << ")\n"
     << "ass_better_ok    " << (c.ass_better_ok ? "yes" : "no") << "  (epsilon0 " << c.epsilon0
     << ", I = [" << c.interval_a << ", " << c.interval_b << "])\n"
     << "nu               " << c.nu << "\n"
     << "delta            " << c.delta << "\n"
     << "c_prime          " << c.c_prime << "\n"
     << "c_global         " << c.c_global << "\n"
     << "verdict          " << verdict_name(c.verdict);
  if (!c.reason.empty()) os << "  (" << c.reason << ")";
  os << "\n";
}

}  // namespace twistlab::certify
