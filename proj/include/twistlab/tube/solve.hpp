#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/crosssec/shape.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/speclin/eigensolve.hpp"
#include "twistlab/speclin/parallel.hpp"
#include "twistlab/tube/assemble.hpp"

namespace twistlab::tube {

// psi[j*m + c] = f[j] * g[c]
inline Vector tensor_mode(const AssembledTube& t, const std::vector<double>& f,
                          const Vector& g) {
  if (static_cast<int>(f.size()) != t.np || static_cast<int>(g.size()) != t.m)
    throw DimensionMismatch("tensor_mode: factor sizes do not match the tube");
  Vector psi(t.n(), 0.0);
  for (int j = 0; j < t.np; ++j)
    for (int c = 0; c < t.m; ++c)
      psi[static_cast<std::size_t>(j * t.m + c)] =
          f[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(c)];
  return psi;
}

// Plateau-ramp profile: 1 on |x| <= n, linear down to 0 at |x| = 2n. This is
// the longitudinal trial sequence that shows the spectral threshold is
// reached from above when the twist is asymptotically constant.
inline double plateau_ramp(double x, double n) {
  const double ax = std::abs(x);
  if (ax <= n) return 1.0;
  if (ax >= 2.0 * n) return 0.0;
  return (2.0 * n - ax) / n;
}

inline speclin::EigenResult lowest_mode(const AssembledTube& t,
                                        const speclin::EigenOptions& eig = {}) {
  speclin::EigenOptions o = eig;
  o.k = 1;
  o.block = std::min<int>(o.block, static_cast<int>(t.n()));
  return speclin::smallest_eigenpairs(t.A, &t.M, o);
}

inline speclin::EigenResult lowest_mode(const AssembledTube& t, int k, double tol) {
  speclin::EigenOptions o;
  o.k = k;
  o.tol = tol;
  o.block = std::max(o.block, k);
  o.block = std::min<int>(o.block, static_cast<int>(t.n()));
  return speclin::smallest_eigenpairs(t.A, &t.M, o);
}

// shifted energy of a trial state, psi' (A - lambda1_h M) psi
inline double evaluate_Q(const AssembledTube& t, const Vector& psi) {
  if (psi.size() != t.n()) throw DimensionMismatch("evaluate_Q: state size");
  const double a = t.A.quadratic(psi);
  double mm = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) mm += t.mdiag[i] * psi[i] * psi[i];
  return a - t.lambda1_h * mm;
}

inline double evaluate_Q_bilinear(const AssembledTube& t, const Vector& u,
                                  const Vector& v) {
  if (u.size() != t.n() || v.size() != t.n())
    throw DimensionMismatch("evaluate_Q_bilinear: state size");
  double mm = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) mm += t.mdiag[i] * u[i] * v[i];
  return t.A.bilinear(u, v) - t.lambda1_h * mm;
}

struct SweepRow {
  double alpha = 0.0;
  double e0 = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int iterations = 0;
};

struct SweepTable {
  std::vector<SweepRow> rows;  // input order
  double lambda1_h = 0.0;
  std::vector<double> crossings;  // ascending; linear interpolation of gap(alpha)
  bool has_alpha_star = false;
  double alpha_star = 0.0;  // leftmost crossing when one exists
};

namespace detail {

inline void locate_crossings(SweepTable& table) {
  std::vector<const SweepRow*> ok;
  ok.reserve(table.rows.size());
  for (const auto& r : table.rows)
    if (r.converged) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(),
            [](const SweepRow* a, const SweepRow* b) { return a->alpha < b->alpha; });

  auto push = [&table](double a) {
    if (!table.crossings.empty() && std::abs(table.crossings.back() - a) <= 1e-12)
      return;
    table.crossings.push_back(a);
  };
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (ok[i]->gap == 0.0) push(ok[i]->alpha);
    if (i + 1 < ok.size()) {
      const double g0 = ok[i]->gap, g1 = ok[i + 1]->gap;
      if (g0 * g1 < 0.0)
        push(ok[i]->alpha +
             g0 * (ok[i + 1]->alpha - ok[i]->alpha) / (g0 - g1));
    }
  }
  std::sort(table.crossings.begin(), table.crossings.end());
  if (!table.crossings.empty()) {
    table.has_alpha_star = true;
    table.alpha_star = table.crossings.front();
  }
}

}  // namespace detail

// One lowest-mode solve per alpha; rows keep the input order. A row whose
// eigensolve does not converge is recorded and the sweep moves on, every
// other failure is rethrown. Jobs are pure and independently seeded by the
// shared options, so the table is deterministic for any worker count.
inline SweepTable sweep_alpha(const TubeDiscretization& d, const TwistProfile& base,
                              const std::vector<double>& alphas,
                              const speclin::EigenOptions& eig = {}) {
  SweepTable table;
  table.rows.resize(alphas.size());
  table.lambda1_h = crosssec::solve_transverse(d.cross, base.beta, eig).lambda1;

  std::vector<std::exception_ptr> errors(alphas.size());
  speclin::parallel_for(
      alphas.size(),
      [&](std::size_t i) {
        SweepRow& row = table.rows[i];
        row.alpha = alphas[i];
        try {
          TwistProfile p = base;
          p.alpha = alphas[i];
          const AssembledTube t = assemble(d, p, eig);
          const speclin::EigenResult res = lowest_mode(t, eig);
          row.e0 = res.values[0];
          row.gap = res.values[0] - t.lambda1_h;
          row.converged = true;
          row.iterations = res.iterations;
        } catch (const NotConverged&) {
          row.converged = false;
          row.iterations = eig.max_iterations;
        } catch (...) {
          errors[i] = std::current_exception();
        }
      },
      1);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  detail::locate_crossings(table);
  return table;
}

inline SweepTable sweep_alpha(const TubeDiscretization& d, double beta,
                              ProfileKind kind, const std::vector<double>& alphas,
                              const speclin::EigenOptions& eig = {}) {
  TwistProfile base;
  base.kind = kind;
  base.beta = beta;
  base.validate();
  return sweep_alpha(d, base, alphas, eig);
}

// Smallest eigenvalue c of the pencil (A - lambda1_h M, W): the best constant
// with h[psi] - lambda1 ||psi||^2 >= c ||psi/sqrt(1+x1^2)||^2 on this lattice.
// The pencil is solved with a +shift*M regularization for stability; the raw
// pencil value keeps that shift, the corrected value re-evaluates the
// unshifted Rayleigh quotient on the computed minimizer.
struct HardyEstimate {
  double raw = 0.0;
  double corrected = 0.0;
  int iterations = 0;
  std::string method;
  Vector minimizer;
};

inline HardyEstimate estimate_hardy_constant(const AssembledTube& t,
                                             double shift = 1e-9,
                                             const speclin::EigenOptions& eig = {}) {
  std::vector<Triplet> trip;
  trip.reserve(t.A.nnz() + t.n());
  t.A.for_each([&](int r, int c, double v) { trip.push_back({r, c, v}); });
  const double s = shift - t.lambda1_h;
  for (std::size_t i = 0; i < t.n(); ++i)
    trip.push_back({static_cast<int>(i), static_cast<int>(i), s * t.mdiag[i]});
  const SparseSymMatrix p =
      SparseSymMatrix::from_triplets(std::move(trip), static_cast<int>(t.n()));

  speclin::EigenOptions o = eig;
  o.k = 1;
  o.block = std::min<int>(o.block, static_cast<int>(t.n()));
  const speclin::EigenResult res = speclin::smallest_eigenpairs(p, &t.W, o);

  HardyEstimate out;
  out.raw = res.values[0];
  out.minimizer = res.vectors[0];
  out.iterations = res.iterations;
  out.method = res.method;
  double wq = 0.0;
  for (std::size_t i = 0; i < t.n(); ++i)
    wq += t.wdiag[i] * out.minimizer[i] * out.minimizer[i];
  out.corrected = evaluate_Q(t, out.minimizer) / wq;
  return out;
}

// Discrete longitudinal Dirichlet energy ||d_1 psi||^2 with the same edge
// weights, side separation and end-wall ghosts as the assembled form.
inline double longitudinal_energy(const AssembledTube& t, const Vector& psi) {
  if (psi.size() != t.n()) throw DimensionMismatch("longitudinal_energy: state size");
  const double s1 = t.grid.h * t.grid.h / t.h1;
  double e = 0.0;
  for (int j = 0; j + 1 < t.np; ++j) {
    if (t.side[static_cast<std::size_t>(j)] != t.side[static_cast<std::size_t>(j + 1)])
      continue;
    for (int c = 0; c < t.m; ++c) {
      const double d = psi[static_cast<std::size_t>((j + 1) * t.m + c)] -
                       psi[static_cast<std::size_t>(j * t.m + c)];
      e += s1 * d * d;
    }
  }
  for (int c = 0; c < t.m; ++c) {
    const double a = psi[static_cast<std::size_t>(c)];
    const double b = psi[static_cast<std::size_t>((t.np - 1) * t.m + c)];
    e += s1 * (a * a + b * b);
  }
  return e;
}

// Classical weighted one-dimensional bound transplanted to the tube:
//   ||psi / sqrt(1+(x1-x1_0)^2)||^2  <=  16 ||d_1 psi||^2
//                                      + (2 + 64/|I|^2) ||psi||^2 on I x omega.
// Both sides under the assembled quadrature; the caller asserts lhs <= rhs.
struct ClassicalHardySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

inline ClassicalHardySides hardy_classical_check(const AssembledTube& t, double i_lo,
                                                 double i_hi, double x1_0,
                                                 const Vector& psi) {
  if (!(i_hi > i_lo)) throw EmptyInterval("hardy_classical_check: |I| must be positive");
  if (psi.size() != t.n()) throw DimensionMismatch("hardy_classical_check: state size");

  double lhs = 0.0, mass_i = 0.0;
  for (int j = 0; j < t.np; ++j) {
    const double x = t.x1[static_cast<std::size_t>(j)];
    const double r2 = 1.0 / (1.0 + (x - x1_0) * (x - x1_0));
    const bool inside = x >= i_lo && x <= i_hi;
    for (int c = 0; c < t.m; ++c) {
      const std::size_t i = static_cast<std::size_t>(j * t.m + c);
      const double cell = t.mdiag[i] * psi[i] * psi[i];
      lhs += r2 * cell;
      if (inside) mass_i += cell;
    }
  }
  const double len = i_hi - i_lo;
  ClassicalHardySides sides;
  sides.lhs = lhs;
  sides.rhs = 16.0 * longitudinal_energy(t, psi) + (2.0 + 64.0 / (len * len)) * mass_i;
  return sides;
}

// --- interface (broken form) check -----------------------------------------

// The angle function tau = -atan2(x3, x2) is single-valued only away from the
// half-line {x3 = 0, x2 <= 0}; the check below rejects cross sections whose
// closure touches it.
inline bool branch_cut_hits(const crosssec::CrossSection& cs) {
  using crosssec::ShapeKind;
  const double cx = cs.offset[0];
  const double cy = cs.offset[1];
  switch (cs.kind) {
    case ShapeKind::rectangle:
      return cy - 0.5 * cs.height <= 0.0 && 0.0 <= cy + 0.5 * cs.height &&
             cx - 0.5 * cs.width <= 0.0;
    case ShapeKind::disc: {
      const double dist = cx <= 0.0 ? std::abs(cy) : std::hypot(cx, cy);
      return dist <= cs.radius;
    }
    case ShapeKind::annulus: {
      const double dist = cx <= 0.0 ? std::abs(cy) : std::hypot(cx, cy);
      return dist <= cs.r_outer;
    }
  }
  return true;
}

struct NeumannCheck {
  double e0_neumann = 0.0;  // lowest eigenvalue of the broken form
  double lambda1_h = 0.0;   // transverse threshold on the same lattice
  double q_test = 0.0;      // shifted energy of the tuned trial state
  double q_plateau = 0.0;   // delta-independent part (plateau-ramp cost)
  double mixed = 0.0;       // bilinear coefficient, expected near -beta^2/2
  double curvature = 0.0;   // quadratic coefficient in delta
  double delta_star = 0.0;  // golden-section minimizer over (0, 1]
  int iterations = 0;
  std::string method;
};

// Variational witness that cutting the tube at x1 = 0 with a natural
// condition pulls spectrum below the transverse threshold once beta != 0.
// The trial state is phi_n(x1) chi(x') + delta rho(x1) tau(x') chi(x') with
// rho supported on [-1, 0] and rho(0) = -beta carried by the left face of
// the cut only; its shifted energy is exactly quadratic in delta.
inline NeumannCheck neumann_interface_check(const TubeDiscretization& d, double beta,
                                            double plateau = 8.0,
                                            const speclin::EigenOptions& eig = {}) {
  if (branch_cut_hits(d.cross.shape))
    throw BranchCutInsideDomain(
        "neumann_interface_check: the angle function is not single-valued on this "
        "cross-section; offset it away from the half-line x3 = 0, x2 <= 0");
  if (!(plateau > 0.0))
    throw InvalidConfig("neumann_interface_check: plateau half-width must be positive");

  TubeDiscretization cut = d;
  cut.interface_cut = true;
  const AssembledTube t = assemble(cut, TwistProfile::zero(beta), eig);

  NeumannCheck out;
  out.lambda1_h = t.lambda1_h;
  {
    const speclin::EigenResult res = lowest_mode(t, eig);
    out.e0_neumann = res.values[0];
    out.iterations = res.iterations;
    out.method = res.method;
  }

  const Vector& chi = t.cross_state.chi;
  std::vector<double> phi(static_cast<std::size_t>(t.np));
  for (int j = 0; j < t.np; ++j)
    phi[static_cast<std::size_t>(j)] = plateau_ramp(t.x1[static_cast<std::size_t>(j)], plateau);
  const Vector v0 = tensor_mode(t, phi, chi);

  Vector vr(t.n(), 0.0);
  for (int j = 0; j < t.np; ++j) {
    const double x = t.x1[static_cast<std::size_t>(j)];
    if (x < -1.0 || x > 0.0) continue;
    if (x == 0.0 && t.side[static_cast<std::size_t>(j)] == 1) continue;
    const double rho = -beta * (1.0 + x);
    for (int c = 0; c < t.m; ++c) {
      const double tau = -std::atan2(t.grid.x3[static_cast<std::size_t>(c)],
                                     t.grid.x2[static_cast<std::size_t>(c)]);
      vr[static_cast<std::size_t>(j * t.m + c)] =
          rho * tau * chi[static_cast<std::size_t>(c)];
    }
  }

  out.q_plateau = evaluate_Q(t, v0);
  out.mixed = evaluate_Q_bilinear(t, v0, vr);
  out.curvature = evaluate_Q(t, vr);

  const double q0 = out.q_plateau, qm = out.mixed, qp = out.curvature;
  auto q_of = [q0, qm, qp](double s) { return q0 + 2.0 * s * qm + s * s * qp; };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double a = hi - gr * (hi - lo);
  double b = lo + gr * (hi - lo);
  while (hi - lo > 1e-12) {
    if (q_of(a) < q_of(b)) {
      hi = b;
      b = a;
      a = hi - gr * (hi - lo);
    } else {
      lo = a;
      a = b;
      b = lo + gr * (hi - lo);
    }
  }
  out.delta_star = 0.5 * (lo + hi);
  out.q_test = q_of(out.delta_star);
  return out;
}

}  // namespace twistlab::tube
