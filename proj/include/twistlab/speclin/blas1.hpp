#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "twistlab/errors.hpp"

namespace twistlab::speclin {

using Vector = std::vector<double>;

inline double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm2(const Vector& x) { return std::sqrt(dot(x, x)); }

// y += a*x
inline void axpy(double a, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scal(double a, Vector& x) {
  for (double& v : x) v *= a;
}

}  // namespace twistlab::speclin
