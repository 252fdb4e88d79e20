#pragma once

#include <Eigen/Dense>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/eigensolve.hpp"

// Independent dense cross-check path. This is deliberately the only header
// in the project that touches Eigen, so that every oracle comparison pits
// our own iterative solvers against a foreign implementation.

namespace twistlab::speclin {

inline EigenResult dense_oracle_solve(const SparseSymMatrix& a,
                                      const SparseSymMatrix* m,
                                      const EigenOptions& opts) {
  const std::size_t n = a.rows();
  if (n == 0) throw DimensionMismatch("dense_oracle_solve: empty matrix");
  if (n > 2000) throw InvalidConfig("dense oracle limited to n <= 2000");
  const std::size_t k = static_cast<std::size_t>(opts.k);

  Eigen::MatrixXd ad = Eigen::MatrixXd::Zero(n, n);
  a.for_each([&](std::size_t i, std::size_t j, double v) {
    ad(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
  });

  Eigen::MatrixXd evec;
  Eigen::VectorXd eval;
  if (m) {
    Eigen::MatrixXd md = Eigen::MatrixXd::Zero(n, n);
    m->for_each([&](std::size_t i, std::size_t j, double v) {
      md(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    });
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, md);
    if (es.info() != Eigen::Success)
      throw SingularMass("dense oracle: generalized eigensolve failed");
    eval = es.eigenvalues();
    evec = es.eigenvectors();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ad);
    if (es.info() != Eigen::Success)
      throw NotConverged("dense oracle: eigensolve failed", 1.0);
    eval = es.eigenvalues();
    evec = es.eigenvectors();
  }

  EigenResult res;
  res.seed = opts.seed;
  res.method = "dense-oracle";
  res.converged = true;
  res.iterations = 0;
  for (std::size_t c = 0; c < k; ++c) {
    res.values.push_back(eval(static_cast<Eigen::Index>(c)));
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = evec(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
    Vector r = a.multiply(x);
    if (m) {
      Vector mx = m->multiply(x);
      axpy(-res.values.back(), mx, r);
    } else {
      axpy(-res.values.back(), x, r);
    }
    res.residuals.push_back(norm2(r));
    res.vectors.push_back(std::move(x));
  }
  return res;
}

namespace {
[[maybe_unused]] const bool dense_oracle_registered = [] {
  detail::dense_oracle_hook() = &dense_oracle_solve;
  return true;
}();
}  // namespace

}  // namespace twistlab::speclin
