#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "catch_amalgamated.hpp"
#include "twistlab/speclin/banded.hpp"
#include "twistlab/speclin/cg.hpp"
#include "twistlab/speclin/dense.hpp"
#include "twistlab/speclin/dense_oracle.hpp"
#include "twistlab/speclin/eigensolve.hpp"
#include "twistlab/speclin/matrix_market.hpp"
#include "twistlab/speclin/sparse.hpp"
#include "twistlab/speclin/tridiag.hpp"

using namespace twistlab;
using namespace twistlab::speclin;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = 3.14159265358979323846;

// 1D Dirichlet second-difference operator on n interior points, spacing h.
SparseSymMatrix fd_laplacian_1d(int n, double h) {
  TripletBuffer b;
  double w = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    b.add_diag(i, 2.0 * w);
    if (i + 1 < n) b.add(i, i + 1, -w);
  }
  return b.build(n);
}

// Random sparse diagonally dominant SPD matrix (deterministic per seed).
SparseSymMatrix random_spd(int n, std::uint64_t seed, double dominance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<int> col(0, n - 1);
  TripletBuffer b;
  std::vector<double> rowsum(n, 0.0);
  int offdiag = 3 * n;
  for (int e = 0; e < offdiag; ++e) {
    int i = col(rng), j = col(rng);
    if (i == j) continue;
    double v = val(rng);
    b.add(i, j, v);
    rowsum[i] += std::abs(v);
    rowsum[j] += std::abs(v);
  }
  for (int i = 0; i < n; ++i) b.add_diag(i, rowsum[i] + dominance);
  return b.build(n);
}

// Same matrix with row/column `drop` deleted (an extra zero constraint).
SparseSymMatrix restrict_out(const SparseSymMatrix& a, int drop) {
  std::vector<Triplet> t;
  a.for_each([&](int i, int j, double v) {
    if (i == drop || j == drop) return;
    t.push_back({i > drop ? i - 1 : i, j > drop ? j - 1 : j, v});
  });
  return SparseSymMatrix::from_triplets(std::move(t), a.n() - 1);
}

}  // namespace

TEST_CASE("triplet assembly validates and normalizes", "[sparse]") {
  SECTION("single diagonal entry") {
    auto a = SparseSymMatrix::from_triplets({{0, 0, 2.0}}, 1);
    REQUIRE(a.n() == 1);
    REQUIRE(a.at(0, 0) == 2.0);
  }
  SECTION("symmetric off-diagonal pair") {
    auto a = SparseSymMatrix::from_triplets({{0, 1, 1.0}, {1, 0, 1.0}}, 2);
    REQUIRE(a.at(0, 1) == 1.0);
    REQUIRE(a.at(1, 0) == 1.0);
  }
  SECTION("one-sided entry is rejected") {
    REQUIRE_THROWS_AS(SparseSymMatrix::from_triplets({{0, 1, 1.0}}, 2),
                      AsymmetricInput);
  }
  SECTION("out-of-range index is rejected") {
    REQUIRE_THROWS_AS(SparseSymMatrix::from_triplets({{0, 2, 1.0}}, 2),
                      IndexOutOfRange);
  }
  SECTION("duplicates are summed") {
    auto a = SparseSymMatrix::from_triplets({{0, 0, 1.0}, {0, 0, 1.5}}, 1);
    REQUIRE(a.at(0, 0) == 2.5);
    REQUIRE(a.nnz() == 1);
  }
}

TEST_CASE("matrix vector product and quadratic forms", "[sparse]") {
  auto a = fd_laplacian_1d(3, 0.25);
  Vector x = {1.0, 2.0, 3.0};
  Vector y = a.multiply(x);
  REQUIRE_THAT(y[0], WithinAbs(16.0 * (2.0 * 1 - 2), 1e-13));
  REQUIRE_THAT(y[1], WithinAbs(16.0 * (-1 + 2.0 * 2 - 3), 1e-13));
  REQUIRE_THAT(y[2], WithinAbs(16.0 * (-2 + 2.0 * 3), 1e-13));
  REQUIRE_THAT(a.quadratic(x), WithinAbs(dot(x, y), 1e-12));
  REQUIRE(a.half_bandwidth() == 1);
}

TEST_CASE("conjugate gradient solves the identity", "[cg]") {
  auto eye = diagonal_matrix(Vector(4, 1.0));
  Vector b = {1.0, 0.0, 0.0, 0.0};
  auto x = conjugate_gradient(eye, b);
  for (std::size_t i = 0; i < 4; ++i) REQUIRE_THAT(x[i], WithinAbs(b[i], 1e-12));
}

TEST_CASE("conjugate gradient matches the closed-form tridiagonal solve", "[cg]") {
  // Second-difference operator, 3 interior points, h = 1/4, rhs e0. The
  // inverse of tridiag(-1,2,-1) is (1/4)[[3,2,1],[2,4,2],[1,2,3]], so the
  // solution is (3,2,1)/64.
  auto a = fd_laplacian_1d(3, 0.25);
  CgStats st;
  auto x = conjugate_gradient(a, {1.0, 0.0, 0.0}, CgConfig{0.0, 1e-12, 100}, &st);
  REQUIRE_THAT(x[0], WithinAbs(3.0 / 64.0, 1e-10));
  REQUIRE_THAT(x[1], WithinAbs(2.0 / 64.0, 1e-10));
  REQUIRE_THAT(x[2], WithinAbs(1.0 / 64.0, 1e-10));
  REQUIRE(st.iterations <= 3);
}

TEST_CASE("conjugate gradient flags an interior shift", "[cg]") {
  // Smallest eigenvalue is 32 - 16*sqrt(2) ~ 9.37; a shift of 20 sits inside
  // the spectrum, so some search direction exposes negative curvature.
  auto a = fd_laplacian_1d(3, 0.25);
  REQUIRE_THROWS_AS(
      conjugate_gradient(a, {1.0, 0.0, 0.0}, CgConfig{20.0, 1e-12, 100}),
      IndefiniteDetected);
}

TEST_CASE("smallest eigenpair of a diagonal matrix", "[eigen]") {
  auto a = diagonal_matrix({3.0, 1.0, 2.0});
  auto r = smallest_eigenpairs(a);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.values[0], WithinAbs(1.0, 1e-12));
}

TEST_CASE("smallest eigenpair of the 3-point second-difference operator",
          "[eigen]") {
  // Closed form 4/h^2 sin^2(pi h/2) on (0,1) with h = 1/4: 32 - 16 sqrt(2).
  auto a = fd_laplacian_1d(3, 0.25);
  auto r = smallest_eigenpairs(a);
  REQUIRE(r.converged);
  REQUIRE_THAT(r.values[0], WithinAbs(9.372583002030480, 1e-10));
}

TEST_CASE("proportional pencil has the proportionality eigenvalue", "[eigen]") {
  auto m = random_spd(40, 77, 1.0);
  std::vector<Triplet> t;
  m.for_each([&](int i, int j, double v) { t.push_back({i, j, 2.0 * v}); });
  auto a = SparseSymMatrix::from_triplets(std::move(t), m.n());
  auto r = smallest_eigenpairs(a, &m, {});
  REQUIRE(r.converged);
  REQUIRE_THAT(r.values[0], WithinAbs(2.0, 1e-9));
}

TEST_CASE("iterative path matches the closed form on a fine chain", "[eigen]") {
  int n = 63;
  double h = 1.0 / 64.0;
  auto a = fd_laplacian_1d(n, h);
  EigenOptions o;
  o.k = 2;
  auto r = smallest_eigenpairs(a, nullptr, o);
  REQUIRE(r.converged);
  double e1 = 4.0 / (h * h) * std::pow(std::sin(kPi * h / 2.0), 2);
  double e2 = 4.0 / (h * h) * std::pow(std::sin(kPi * h), 2);
  REQUIRE_THAT(r.values[0], WithinRel(e1, 1e-10));
  REQUIRE_THAT(r.values[1], WithinRel(e2, 1e-10));
  REQUIRE(r.method != "dense");  // large enough to exercise the iterative path
}

TEST_CASE("residuals and metric orthonormality meet the contract", "[eigen]") {
  // FEM-style pencil: h-weighted stiffness against the consistent tridiagonal
  // mass, so eigenvalues sit at O(10) and an absolute residual tolerance is
  // meaningful.
  int n = 80;
  double h = 1.0 / (n + 1);
  TripletBuffer ba, bm;
  for (int i = 0; i < n; ++i) {
    ba.add_diag(i, 2.0 / h);
    if (i + 1 < n) ba.add(i, i + 1, -1.0 / h);
    bm.add_diag(i, 4.0 * h / 6.0);
    if (i + 1 < n) bm.add(i, i + 1, h / 6.0);
  }
  auto a = ba.build(n);
  auto m = bm.build(n);
  EigenOptions o;
  o.k = 3;
  o.tol = 1e-10;
  auto r = smallest_eigenpairs(a, &m, o);
  REQUIRE(r.converged);
  for (int c = 0; c < 3; ++c) {
    REQUIRE(r.residuals[c] <= o.tol);
    Vector ax = a.multiply(r.vectors[c]);
    Vector mx = m.multiply(r.vectors[c]);
    axpy(-r.values[c], mx, ax);
    REQUIRE(norm2(ax) <= o.tol);
    for (int d = 0; d < 3; ++d) {
      double g = dot(r.vectors[c], m.multiply(r.vectors[d]));
      REQUIRE_THAT(g, WithinAbs(c == d ? 1.0 : 0.0, 10.0 * o.tol));
    }
  }
}

TEST_CASE("fixed seed reproduces the iteration history", "[eigen]") {
  auto a = fd_laplacian_1d(120, 1.0 / 121.0);
  EigenOptions o;
  o.seed = 12345;
  auto r1 = smallest_eigenpairs(a, nullptr, o);
  auto r2 = smallest_eigenpairs(a, nullptr, o);
  REQUIRE(r1.seed == 12345);
  REQUIRE(r1.iterations == r2.iterations);
  REQUIRE(r1.values[0] == r2.values[0]);
  REQUIRE(r1.method == r2.method);
}

TEST_CASE("iterative solver agrees with the dense oracle on random pencils",
          "[eigen][oracle]") {
  for (std::uint64_t seed : {11u, 22u, 33u, 44u}) {
    int n = 200 + static_cast<int>(seed);
    auto a = random_spd(n, seed, 0.5);
    auto m = random_spd(n, seed + 1000, 2.0);
    EigenOptions o;
    o.k = 2;
    auto it = smallest_eigenpairs(a, &m, o);
    EigenOptions od = o;
    od.use_dense_oracle = true;
    auto dr = smallest_eigenpairs(a, &m, od);
    REQUIRE(dr.method == "dense-oracle");
    REQUIRE_THAT(it.values[0], WithinRel(dr.values[0], 1e-8));
    REQUIRE_THAT(it.values[1], WithinRel(dr.values[1], 1e-8));
  }
}

TEST_CASE("zero-constraint restriction never lowers the ground energy",
          "[eigen][property]") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    auto a = random_spd(60, seed, 0.3);
    auto r_full = smallest_eigenpairs(a);
    auto r_cut = smallest_eigenpairs(restrict_out(a, 59));
    REQUIRE(r_cut.values[0] >= r_full.values[0] - 1e-10);
  }
}

TEST_CASE("singular mass is rejected", "[eigen]") {
  auto a = diagonal_matrix({1.0, 2.0});
  auto m = diagonal_matrix({1.0, 0.0});
  REQUIRE_THROWS_AS(smallest_eigenpairs(a, &m, {}), SingularMass);
}

TEST_CASE("k out of range is rejected", "[eigen]") {
  auto a = diagonal_matrix({1.0, 2.0});
  EigenOptions o;
  o.k = 3;
  REQUIRE_THROWS_AS(smallest_eigenpairs(a, nullptr, o), DimensionMismatch);
}

TEST_CASE("unattainable tolerance reports failure honestly", "[eigen]") {
  auto a = fd_laplacian_1d(100, 0.01);
  EigenOptions o;
  o.tol = 1e-300;
  o.max_iterations = 3;
  REQUIRE_THROWS_AS(smallest_eigenpairs(a, nullptr, o), NotConverged);
}

TEST_CASE("dense oracle size cap", "[eigen][oracle]") {
  auto a = fd_laplacian_1d(2001, 1.0 / 2002.0);
  EigenOptions o;
  o.use_dense_oracle = true;
  REQUIRE_THROWS_AS(smallest_eigenpairs(a, nullptr, o), InvalidConfig);
}

TEST_CASE("tridiagonal bisection and inverse iteration", "[tridiag]") {
  int n = 50;
  Vector d(n, 2.0), e(n - 1, -1.0);
  // Eigenvalues of tridiag(-1,2,-1) are 2 - 2 cos(k pi/(n+1)).
  for (int k : {1, 2, n}) {
    double exact = 2.0 - 2.0 * std::cos(k * kPi / (n + 1));
    double lam = tridiag_eigenvalue(d, e, k - 1);
    REQUIRE_THAT(lam, WithinAbs(exact, 1e-12));
    Vector v = tridiag_eigenvector(d, e, lam);
    // residual of the full recurrence
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = d[i] * v[i] - lam * v[i];
      if (i > 0) r += e[i - 1] * v[i - 1];
      if (i + 1 < n) r += e[i] * v[i + 1];
      worst = std::max(worst, std::abs(r));
    }
    REQUIRE(worst < 1e-10);
    REQUIRE_THAT(norm2(v), WithinAbs(1.0, 1e-12));
  }
  REQUIRE(sturm_count(d, e, 2.0) == n / 2);
  REQUIRE(sturm_count(d, e, 5.0) == n);
  REQUIRE(sturm_count(d, e, -1.0) == 0);
}

TEST_CASE("banded Cholesky factors and solves a shifted operator", "[banded]") {
  auto a = fd_laplacian_1d(200, 1.0 / 201.0);
  auto m = diagonal_matrix(Vector(200, 1.0));
  double sigma = 5.0;  // below the smallest eigenvalue ~ pi^2
  auto f = BandedCholesky::build(a, m, sigma);
  REQUIRE(f.factor());
  Vector b(200, 1.0);
  Vector x = b;
  f.solve(x);
  // verify (A - sigma I) x = b
  Vector r = a.multiply(x);
  axpy(-sigma, x, r);
  axpy(-1.0, b, r);
  REQUIRE(norm2(r) < 1e-9 * norm2(b));
}

TEST_CASE("banded Cholesky refuses an interior shift", "[banded]") {
  auto a = fd_laplacian_1d(200, 1.0 / 201.0);
  auto m = diagonal_matrix(Vector(200, 1.0));
  auto f = BandedCholesky::build(a, m, 500.0);
  REQUIRE_FALSE(f.factor());
}

TEST_CASE("dense Jacobi eigendecomposition", "[dense]") {
  std::vector<double> a = {2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0};
  std::vector<double> w, v;
  jacobi_eigh(a, 3, w, v);
  REQUIRE_THAT(w[0], WithinAbs(2.0 - std::sqrt(2.0), 1e-13));
  REQUIRE_THAT(w[1], WithinAbs(2.0, 1e-13));
  REQUIRE_THAT(w[2], WithinAbs(2.0 + std::sqrt(2.0), 1e-13));
  // columns are orthonormal eigenvectors
  for (int c = 0; c < 3; ++c) {
    double n2 = 0.0;
    for (int i = 0; i < 3; ++i) n2 += v[i * 3 + c] * v[i * 3 + c];
    REQUIRE_THAT(n2, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("dense generalized eigensolve returns metric-orthonormal vectors",
          "[dense]") {
  std::vector<double> a = {4.0, 1.0, 1.0, 3.0};
  std::vector<double> b = {2.0, 0.5, 0.5, 1.0};
  std::vector<double> w, v;
  REQUIRE(dense_generalized_eigh(a, b, 2, w, v));
  REQUIRE(w[0] <= w[1]);
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) {
      double g = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          g += v[i * 2 + c] * b[i * 2 + j] * v[j * 2 + d];
      REQUIRE_THAT(g, WithinAbs(c == d ? 1.0 : 0.0, 1e-12));
    }
}

TEST_CASE("matrix market round-trips exactly", "[io]") {
  TripletBuffer t;
  t.add_diag(0, 0.1);
  t.add_diag(1, 1.0 / 3.0);
  t.add_diag(2, -1e-300);
  t.add(0, 1, kPi);
  t.add(1, 2, std::nextafter(1.0, 2.0));
  auto a = t.build(3);
  std::ostringstream os;
  write_matrix_market(a, os);
  std::istringstream is(os.str());
  auto b = read_matrix_market(is);
  REQUIRE(b.n() == a.n());
  REQUIRE(b.nnz() == a.nnz());
  bool exact = true;
  a.for_each([&](int i, int j, double v) {
    if (b.at(i, j) != v) exact = false;
  });
  REQUIRE(exact);
}

TEST_CASE("matrix market rejects malformed input", "[io]") {
  {
    std::istringstream is("%%MatrixMarket matrix array real general\n1 1 1\n1 1 2\n");
    REQUIRE_THROWS_AS(read_matrix_market(is), IoError);
  }
  {
    std::istringstream is("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n");
    REQUIRE_THROWS_AS(read_matrix_market(is), IoError);  // truncated
  }
  {
    std::istringstream is("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 3.0\n");
    REQUIRE_THROWS_AS(read_matrix_market(is), IoError);  // upper triangle
  }
  {
    std::istringstream is("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 x 3.0\n");
    REQUIRE_THROWS_AS(read_matrix_market(is), IoError);  // bad token
  }
}

TEST_CASE("matrix market file save and load", "[io]") {
  auto a = fd_laplacian_1d(5, 0.2);
  std::string path = "speclin_test_roundtrip.mtx";
  save_matrix_market(a, path);
  auto b = load_matrix_market(path);
  REQUIRE(b.nnz() == a.nnz());
  bool exact = true;
  a.for_each([&](int i, int j, double v) {
    if (b.at(i, j) != v) exact = false;
  });
  REQUIRE(exact);
  std::remove(path.c_str());
}
