#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <tuple>
#include <vector>

#include "twistlab/errors.hpp"
#include "twistlab/speclin/blas1.hpp"
#include "twistlab/speclin/parallel.hpp"

namespace twistlab::speclin {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Compressed sparse rows with BOTH triangles stored. The assembly routines
// in this library always emit mirrored entries with identical values, so the
// symmetry check is a structural guard against assembly bugs rather than a
// numerical tolerance game.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  static SparseSymMatrix from_triplets(std::vector<Triplet> t, int n,
                                       double symmetry_tol = 1e-12) {
    if (n <= 0) throw IndexOutOfRange("from_triplets: dimension must be positive");
    for (const auto& e : t) {
      if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
        throw IndexOutOfRange("from_triplets: entry index out of range");
    }
    std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });

    SparseSymMatrix A;
    A.n_ = n;
    A.symmetry_tol_ = symmetry_tol;
    A.row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    std::size_t i = 0;
    while (i < t.size()) {
      std::size_t j = i;
      double sum = 0.0;
      while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) {
        sum += t[j].value;
        ++j;
      }
      if (sum != 0.0 || t[i].row == t[i].col) {
        A.col_.push_back(t[i].col);
        A.val_.push_back(sum);
        ++A.row_ptr_[static_cast<std::size_t>(t[i].row) + 1];
      }
      i = j;
    }
    std::partial_sum(A.row_ptr_.begin(), A.row_ptr_.end(), A.row_ptr_.begin());
    A.validate_symmetry();
    return A;
  }

  int n() const { return n_; }
  std::size_t rows() const { return static_cast<std::size_t>(n_); }
  std::size_t nnz() const { return val_.size(); }
  double symmetry_tolerance() const { return symmetry_tol_; }

  // y = A x
  void multiply(const Vector& x, Vector& y) const {
    if (static_cast<int>(x.size()) != n_ || static_cast<int>(y.size()) != n_)
      throw DimensionMismatch("multiply: vector size mismatch");
    const int* col = col_.data();
    const double* val = val_.data();
    const std::size_t* rp = row_ptr_.data();
    const double* xp = x.data();
    double* yp = y.data();
    parallel_for(static_cast<std::size_t>(n_), [&](std::size_t r) {
      double s = 0.0;
      for (std::size_t k = rp[r]; k < rp[r + 1]; ++k) s += val[k] * xp[col[k]];
      yp[r] = s;
    });
  }

  Vector multiply(const Vector& x) const {
    Vector y(static_cast<std::size_t>(n_));
    multiply(x, y);
    return y;
  }

  double quadratic(const Vector& x) const { return dot(x, multiply(x)); }

  double bilinear(const Vector& x, const Vector& y) const {
    return dot(x, multiply(y));
  }

  Vector diagonal() const {
    Vector d(static_cast<std::size_t>(n_), 0.0);
    for (int r = 0; r < n_; ++r) {
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        if (col_[k] == r) d[static_cast<std::size_t>(r)] = val_[k];
      }
    }
    return d;
  }

  int half_bandwidth() const {
    int hb = 0;
    for (int r = 0; r < n_; ++r) {
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        hb = std::max(hb, std::abs(col_[k] - r));
    }
    return hb;
  }

  template <class F>
  void for_each(F&& f) const {
    for (int r = 0; r < n_; ++r) {
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        f(r, col_[k], val_[k]);
    }
  }

  // Entry lookup by binary search within the row; zero when absent.
  double at(int r, int c) const {
    if (r < 0 || r >= n_ || c < 0 || c >= n_)
      throw IndexOutOfRange("at: index out of range");
    auto lo = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    auto hi = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    auto it = std::lower_bound(lo, hi, c);
    if (it == hi || *it != c) return 0.0;
    return val_[static_cast<std::size_t>(it - col_.begin())];
  }

 private:
  void validate_symmetry() const {
    for (int r = 0; r < n_; ++r) {
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
        int c = col_[k];
        if (c == r) continue;
        double mirror = at(c, r);
        double scale = std::max({std::abs(val_[k]), std::abs(mirror), 1.0});
        if (std::abs(val_[k] - mirror) > symmetry_tol_ * scale)
          throw AsymmetricInput("from_triplets: entry (" + std::to_string(r) +
                                "," + std::to_string(c) +
                                ") has no matching transpose value");
      }
    }
  }

  int n_ = 0;
  double symmetry_tol_ = 1e-12;
  std::vector<std::size_t> row_ptr_;
  std::vector<int> col_;
  std::vector<double> val_;
};

// Convenience builder used throughout the assembly code: push (i,j,v) and its
// mirror in one call so the symmetry invariant holds by construction.
struct TripletBuffer {
  std::vector<Triplet> items;

  void add(int i, int j, double v) {
    items.push_back({i, j, v});
    if (i != j) items.push_back({j, i, v});
  }
  void add_diag(int i, double v) { items.push_back({i, i, v}); }

  SparseSymMatrix build(int n) const {
    return SparseSymMatrix::from_triplets(items, n);
  }
};

inline SparseSymMatrix diagonal_matrix(const Vector& d) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    t.push_back({static_cast<int>(i), static_cast<int>(i), d[i]});
  return SparseSymMatrix::from_triplets(std::move(t), static_cast<int>(d.size()));
}

}  // namespace twistlab::speclin
