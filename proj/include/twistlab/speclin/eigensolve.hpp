#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/banded.hpp"
#include "twistlab/speclin/blas1.hpp"
#include "twistlab/speclin/cg.hpp"
#include "twistlab/speclin/dense.hpp"
#include "twistlab/speclin/sparse.hpp"
#include "twistlab/speclin/tridiag.hpp"

namespace twistlab::speclin {

// Smallest eigenpairs of the symmetric pencil (A, M). Blocked LOBPCG with a
// diagonal preconditioner is the primary method; when it stagnates (as it
// does on the long thin tube problems, whose spectral gap above the ground
// state shrinks like (pi/2L)^2) the solver switches to shift-invert Lanczos
// with a banded Cholesky inner factorization. A Cholesky success doubles as
// the certificate that the shift lies strictly below the spectrum.

struct EigenOptions {
  int k = 1;
  double tol = 1e-9;        // on ||A x - lambda M x||_2 / ||x||_M
  int max_iterations = 400;  // LOBPCG budget before giving up on it
  int block = 4;             // LOBPCG block size, >= k
  std::uint64_t seed = 0x2545f4914f6cdd1dULL;
  bool use_dense_oracle = false;  // route to the dense cross-check path
};

struct EigenResult {
  Vector values;                  // ascending
  std::vector<Vector> vectors;    // M-orthonormal
  Vector residuals;               // ||A x - lambda M x||_2 per pair
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::string method;             // "dense", "dense-oracle", "lobpcg", "lobpcg+lanczos"
};

namespace detail {

// Hook for the dense cross-check path. dense_oracle.hpp (the only header that
// touches Eigen) registers itself here, so binaries that never ask for the
// oracle stay free of the dependency and still link.
using DenseOracleFn = EigenResult (*)(const SparseSymMatrix&, const SparseSymMatrix*,
                                      const EigenOptions&);

inline DenseOracleFn& dense_oracle_hook() {
  static DenseOracleFn fn = nullptr;
  return fn;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double rand_centered(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 - 0.5;
}

// Block of vectors with their cached images under A and M, kept consistent
// through every linear operation so Rayleigh-Ritz needs no fresh mat-vecs.
struct Block {
  std::vector<Vector> v, av, mv;
  std::size_t size() const { return v.size(); }
  void clear() { v.clear(); av.clear(); mv.clear(); }
  void push(const SparseSymMatrix& a, const SparseSymMatrix& m, Vector x) {
    av.push_back(a.multiply(x));
    mv.push_back(m.multiply(x));
    v.push_back(std::move(x));
  }
  void append(Block&& other) {
    for (std::size_t i = 0; i < other.size(); ++i) {
      v.push_back(std::move(other.v[i]));
      av.push_back(std::move(other.av[i]));
      mv.push_back(std::move(other.mv[i]));
    }
    other.clear();
  }
};

// M-orthonormalizes the block by modified Gram-Schmidt (two passes), mirroring
// every column operation on the cached images. Columns that lose all their
// mass are dropped; returns the number kept.
inline std::size_t m_orthonormalize(Block& b) {
  std::vector<Vector> kv, kav, kmv;
  for (std::size_t j = 0; j < b.size(); ++j) {
    Vector x = std::move(b.v[j]), ax = std::move(b.av[j]), mx = std::move(b.mv[j]);
    double n0 = std::sqrt(std::max(0.0, dot(x, mx)));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < kv.size(); ++i) {
        double c = dot(x, kmv[i]);
        if (c == 0.0) continue;
        axpy(-c, kv[i], x);
        axpy(-c, kav[i], ax);
        axpy(-c, kmv[i], mx);
      }
    }
    double nm = std::sqrt(std::max(0.0, dot(x, mx)));
    if (!(nm > 1e-10 * std::max(n0, 1e-300)) || !std::isfinite(nm)) continue;
    scal(1.0 / nm, x);
    scal(1.0 / nm, ax);
    scal(1.0 / nm, mx);
    kv.push_back(std::move(x));
    kav.push_back(std::move(ax));
    kmv.push_back(std::move(mx));
  }
  b.v = std::move(kv);
  b.av = std::move(kav);
  b.mv = std::move(kmv);
  return b.size();
}

// Rayleigh-Ritz on an M-orthonormal block: returns ascending Ritz values and
// the coefficient matrix y (column r = coefficients of Ritz vector r).
inline void rayleigh_ritz(const Block& s, std::vector<double>& theta,
                          std::vector<double>& y) {
  const std::size_t p = s.size();
  std::vector<double> h(p * p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      double hij = dot(s.v[i], s.av[j]);
      h[i * p + j] = hij;
      h[j * p + i] = hij;
    }
  jacobi_eigh(std::move(h), static_cast<int>(p), theta, y);
}

inline Vector combine(const std::vector<Vector>& cols, const double* coef,
                      std::size_t p, std::size_t stride, std::size_t col) {
  Vector out(cols[0].size(), 0.0);
  for (std::size_t i = 0; i < p; ++i) axpy(coef[i * stride + col], cols[i], out);
  return out;
}

struct ShiftedSolver {
  bool banded = false;
  BandedCholesky chol;
  SparseSymMatrix shifted;  // used on the CG path
  CgConfig cg;

  // Returns false when A - sigma*M is not positive definite (shift retreat).
  bool prepare(const SparseSymMatrix& a, const SparseSymMatrix& m, double sigma,
               double tol) {
    std::size_t hb = std::max(a.half_bandwidth(), m.half_bandwidth());
    // memory guard: packed band storage at 8 bytes per entry (~512 MB cap)
    banded = (hb + 1) * a.rows() <= (std::size_t{1} << 26);
    if (banded) {
      chol = BandedCholesky::build(a, m, sigma);
      return chol.factor();
    }
    std::vector<Triplet> t;
    t.reserve(a.nnz() + m.nnz());
    a.for_each([&](int i, int j, double v) { t.push_back({i, j, v}); });
    m.for_each([&](int i, int j, double v) { t.push_back({i, j, -sigma * v}); });
    shifted = SparseSymMatrix::from_triplets(std::move(t), a.n());
    cg = CgConfig{0.0, std::max(tol * 1e-3, 1e-13), 50000};
    return true;  // indefiniteness emerges as IndefiniteDetected inside solve
  }

  Vector solve(const Vector& b) const {
    if (banded) {
      Vector x = b;
      chol.solve(x);
      return x;
    }
    CgStats st;
    return conjugate_gradient(shifted, b, cg, &st);
  }
};

}  // namespace detail

inline EigenResult smallest_eigenpairs(const SparseSymMatrix& a,
                                       const SparseSymMatrix* m_in,
                                       const EigenOptions& opts = {}) {
  const std::size_t n = a.rows();
  if (n == 0) throw DimensionMismatch("smallest_eigenpairs: empty matrix");
  if (opts.k < 1 || static_cast<std::size_t>(opts.k) > n)
    throw DimensionMismatch("smallest_eigenpairs: k out of range");

  if (opts.use_dense_oracle) {
    if (n > 2000)
      throw InvalidConfig("dense oracle limited to n <= 2000");
    detail::DenseOracleFn oracle = detail::dense_oracle_hook();
    if (!oracle)
      throw InvalidConfig(
          "dense oracle requested but its header is not part of this binary");
    return oracle(a, m_in, opts);
  }

  SparseSymMatrix ident;
  if (!m_in) {
    Vector ones(n, 1.0);
    ident = diagonal_matrix(ones);
  }
  const SparseSymMatrix& m = m_in ? *m_in : ident;
  if (m.rows() != n) throw DimensionMismatch("smallest_eigenpairs: mass size");
  {
    Vector dm = m.diagonal();
    for (double d : dm)
      if (!(d > 0.0)) throw SingularMass("mass matrix has a nonpositive diagonal entry");
  }

  const std::size_t k = static_cast<std::size_t>(opts.k);
  const std::size_t nb = std::min(n, std::max<std::size_t>(k, opts.block));

  EigenResult res;
  res.seed = opts.seed;

  auto finalize = [&](detail::Block& x, const std::vector<double>& theta,
                      bool ok, int iters, const char* method) {
    res.values.assign(theta.begin(), theta.begin() + k);
    res.vectors.clear();
    res.residuals.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      Vector r = x.av[i];
      axpy(-theta[i], x.mv[i], r);
      res.residuals[i] = norm2(r);
      res.vectors.push_back(x.v[i]);
    }
    res.iterations = iters;
    res.converged = ok;
    res.method = method;
  };

  // --- tiny problems: direct dense solve with our own kernels -------------
  if (n <= std::max<std::size_t>(4 * nb, 16)) {
    std::vector<double> ad(n * n, 0.0), md(n * n, 0.0);
    a.for_each([&](std::size_t i, std::size_t j, double v) { ad[i * n + j] = v; });
    m.for_each([&](std::size_t i, std::size_t j, double v) { md[i * n + j] = v; });
    std::vector<double> w, v;
    if (!dense_generalized_eigh(ad, md, static_cast<int>(n), w, v))
      throw SingularMass("mass matrix not positive definite");
    detail::Block x;
    for (std::size_t c = 0; c < k; ++c) {
      Vector xc(n);
      for (std::size_t i = 0; i < n; ++i) xc[i] = v[i * n + c];
      x.push(a, m, std::move(xc));
    }
    finalize(x, w, true, 0, "dense");
    return res;
  }

  // --- LOBPCG --------------------------------------------------------------
  Vector diag_a = a.diagonal(), diag_m = m.diagonal();
  double scale_a = 0.0;
  for (double d : diag_a) scale_a = std::max(scale_a, std::abs(d));
  if (scale_a == 0.0) scale_a = 1.0;

  std::uint64_t rng = opts.seed;
  detail::Block x;
  for (std::size_t c = 0; c < nb; ++c) {
    Vector xc(n);
    for (std::size_t i = 0; i < n; ++i) xc[i] = detail::rand_centered(rng);
    x.push(a, m, std::move(xc));
  }
  if (detail::m_orthonormalize(x) < nb)
    throw SingularMass("mass norm collapsed on a random block");

  std::vector<double> theta(nb, 0.0), y;
  detail::Block p;
  int it = 0;
  bool ok = false;
  std::vector<double> history;

  auto precond = [&](Vector r, double lam) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = diag_a[i] - lam * diag_m[i];
      double floor_d = 1e-8 * scale_a;
      r[i] /= (std::abs(d) > floor_d) ? d : (d < 0 ? -floor_d : floor_d);
    }
    return r;
  };

  for (; it < opts.max_iterations; ++it) {
    // Ritz step on [X | W | P]
    detail::Block s;
    s.append(std::move(x));
    {  // W = preconditioned residuals of the current Ritz pairs
      for (std::size_t c = 0; c < s.size() && c < nb; ++c) {
        double lam = dot(s.v[c], s.av[c]);
        Vector r = s.av[c];
        axpy(-lam, s.mv[c], r);
        s.push(a, m, precond(std::move(r), lam));
      }
    }
    s.append(std::move(p));
    if (detail::m_orthonormalize(s) < nb) {
      x = std::move(s);  // basis collapsed; the fallback is better equipped
      break;
    }
    detail::rayleigh_ritz(s, theta, y);
    const std::size_t ps = s.size();

    detail::Block xn, pn;
    for (std::size_t c = 0; c < nb; ++c) {
      xn.v.push_back(detail::combine(s.v, y.data(), ps, ps, c));
      xn.av.push_back(detail::combine(s.av, y.data(), ps, ps, c));
      xn.mv.push_back(detail::combine(s.mv, y.data(), ps, ps, c));
    }
    // implicit difference block: the [W|P] part of the same combination
    // (the first nb columns of s are the previous X, which Gram-Schmidt
    // keeps verbatim since they are already M-orthonormal)
    for (std::size_t c = 0; c < nb && nb < ps; ++c) {
      Vector pv(n, 0.0), pav(n, 0.0), pmv(n, 0.0);
      for (std::size_t i = nb; i < ps; ++i) {
        double w = y[i * ps + c];
        axpy(w, s.v[i], pv);
        axpy(w, s.av[i], pav);
        axpy(w, s.mv[i], pmv);
      }
      pn.v.push_back(std::move(pv));
      pn.av.push_back(std::move(pav));
      pn.mv.push_back(std::move(pmv));
    }
    x = std::move(xn);
    p = std::move(pn);

    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      Vector r = x.av[c];
      axpy(-theta[c], x.mv[c], r);
      worst = std::max(worst, norm2(r));
    }
    history.push_back(worst);
    if (worst <= opts.tol) {
      ok = true;
      ++it;
      break;
    }
    std::size_t win = 30;
    if (history.size() > win &&
        worst > 0.5 * history[history.size() - 1 - win] && worst > 100 * opts.tol) {
      ++it;
      break;
    }
  }

  if (ok) {
    finalize(x, theta, true, it, "lobpcg");
    return res;
  }

  // --- shift-invert Lanczos fallback ----------------------------------------
  // Start from the best LOBPCG Ritz vector; pick sigma below the smallest
  // Ritz value and retreat (doubling) until the banded Cholesky certifies
  // A - sigma*M > 0, i.e. sigma < min eig(A, M).
  double lam0 = theta.empty() ? 0.0 : theta[0];
  if (x.size() == 0) throw NotConverged("eigensolver lost its basis", 1.0);
  double delta = std::max({1e-3 * std::max(1.0, std::abs(lam0)), 1e-10 * scale_a});
  detail::ShiftedSolver solver;
  double sigma = lam0;
  bool prepared = false;
  for (int attempt = 0; attempt < 60 && !prepared; ++attempt) {
    sigma = lam0 - delta;
    try {
      prepared = solver.prepare(a, m, sigma, opts.tol);
    } catch (const IndefiniteDetected&) {
      prepared = false;
    }
    delta *= 2.0;
  }
  if (!prepared)
    throw NotConverged("no positive definite shift found below the spectrum",
                       history.empty() ? 1.0 : history.back());

  const int cap = static_cast<int>(std::min<std::size_t>(n, 250));
  int lanczos_total = 0;
  detail::Block xfin;
  std::vector<double> lam_fin;
  bool done = false;

  Vector q0 = x.v[0];
  for (int restart = 0; restart < 2 && !done; ++restart) {
    std::vector<Vector> q, mq;
    Vector alpha, beta;
    {
      Vector mq0 = m.multiply(q0);
      double nm = std::sqrt(std::max(0.0, dot(q0, mq0)));
      if (!(nm > 0.0)) throw SingularMass("mass norm collapsed");
      Vector qq = q0;
      scal(1.0 / nm, qq);
      scal(1.0 / nm, mq0);
      q.push_back(std::move(qq));
      mq.push_back(std::move(mq0));
    }
    for (int j = 0; j < cap && !done; ++j, ++lanczos_total) {
      Vector z;
      try {
        z = solver.solve(mq[j]);
      } catch (const IndefiniteDetected&) {
        throw NotConverged("shifted operator turned indefinite", 1.0);
      }
      double aj = dot(z, mq[j]);
      alpha.push_back(aj);
      axpy(-aj, q[j], z);
      if (j > 0) axpy(-beta[j - 1], q[j - 1], z);
      // full reorthogonalization, two sweeps
      for (int sweep = 0; sweep < 2; ++sweep)
        for (std::size_t i = 0; i < q.size(); ++i) {
          double c = dot(z, mq[i]);
          if (c != 0.0) axpy(-c, q[i], z);
        }
      Vector mz = m.multiply(z);
      double bj = std::sqrt(std::max(0.0, dot(z, mz)));

      const std::size_t jj = alpha.size();
      bool breakdown = !(bj > 1e-14 * std::max(1.0, std::abs(aj)));
      bool grew = false;
      if (jj < static_cast<std::size_t>(cap)) {
        if (!breakdown) {
          beta.push_back(bj);
          scal(1.0 / bj, z);
          scal(1.0 / bj, mz);
          q.push_back(std::move(z));
          mq.push_back(std::move(mz));
          grew = true;
        } else {
          // The recurrence hit an invariant subspace. The converged content is
          // kept (full reorthogonalization preserves it in T) and the basis is
          // continued in a fresh random direction with a zero coupling entry.
          Vector f(n);
          for (std::size_t i = 0; i < n; ++i) f[i] = detail::rand_centered(rng);
          Vector mf = m.multiply(f);
          double nm0 = std::sqrt(std::max(0.0, dot(f, mf)));
          for (int sweep = 0; sweep < 2; ++sweep)
            for (std::size_t i = 0; i < q.size(); ++i) {
              double c = dot(f, mq[i]);
              if (c != 0.0) axpy(-c, q[i], f);
            }
          mf = m.multiply(f);
          double nm = std::sqrt(std::max(0.0, dot(f, mf)));
          if (nm > 1e-8 * std::max(nm0, 1e-300)) {
            beta.push_back(0.0);
            scal(1.0 / nm, f);
            scal(1.0 / nm, mf);
            q.push_back(std::move(f));
            mq.push_back(std::move(mf));
            grew = true;
          }
        }
      }
      const bool at_end = !grew;

      if (jj >= k && (at_end || jj % 5 == 0 || jj == static_cast<std::size_t>(cap))) {
        // Ritz extraction from T: largest theta <-> smallest lambda
        Vector d(alpha.begin(), alpha.end());
        Vector e(beta.begin(), beta.begin() + (jj - 1));
        detail::Block cand;
        std::vector<double> lam;
        bool all_ok = true;
        for (std::size_t r = 0; r < k; ++r) {
          double th = tridiag_eigenvalue(d, e, static_cast<int>(jj - 1 - r));
          if (!(th > 0.0)) {
            all_ok = false;
            break;
          }
          Vector yv = tridiag_eigenvector(d, e, th);
          Vector xc(n, 0.0);
          for (std::size_t i = 0; i < jj; ++i) axpy(yv[i], q[i], xc);
          cand.push(a, m, std::move(xc));
          double nm = std::sqrt(std::max(0.0, dot(cand.v.back(), cand.mv.back())));
          if (!(nm > 0.0)) {
            all_ok = false;
            break;
          }
          scal(1.0 / nm, cand.v.back());
          scal(1.0 / nm, cand.av.back());
          scal(1.0 / nm, cand.mv.back());
          lam.push_back(sigma + 1.0 / th);
        }
        if (all_ok) {
          double worst = 0.0;
          for (std::size_t r = 0; r < k; ++r) {
            Vector rr = cand.av[r];
            axpy(-lam[r], cand.mv[r], rr);
            worst = std::max(worst, norm2(rr));
          }
          if (worst <= opts.tol) {
            detail::m_orthonormalize(cand);
            xfin = std::move(cand);
            lam_fin = std::move(lam);
            done = true;
          } else if (at_end || jj == static_cast<std::size_t>(cap)) {
            q0 = cand.v[0];  // restart from the best Ritz vector
            xfin = std::move(cand);
            lam_fin = std::move(lam);
          }
        }
      }
      if (at_end) break;
    }
  }

  if (!done) {
    if (xfin.size() >= k) {
      finalize(xfin, lam_fin, false, it + lanczos_total, "lobpcg+lanczos");
      throw NotConverged("eigensolver did not reach tolerance",
                         res.residuals.empty() ? 1.0 : res.residuals[0]);
    }
    throw NotConverged("eigensolver did not reach tolerance",
                       history.empty() ? 1.0 : history.back());
  }
  // ascending order is guaranteed by construction (theta descending)
  finalize(xfin, lam_fin, true, it + lanczos_total, "lobpcg+lanczos");
  return res;
}

inline EigenResult smallest_eigenpairs(const SparseSymMatrix& a,
                                       const EigenOptions& opts = {}) {
  return smallest_eigenpairs(a, nullptr, opts);
}

}  // namespace twistlab::speclin
