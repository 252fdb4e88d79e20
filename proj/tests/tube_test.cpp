#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "twistlab/tube/assemble.hpp"
#include "twistlab/tube/solve.hpp"

using namespace twistlab;
using tube::AssembledTube;
using tube::ProfileKind;
using tube::TubeDiscretization;
using tube::TwistProfile;

namespace {

crosssec::CrossSection unit_square() { return crosssec::CrossSection::rectangle(1.0, 1.0); }

crosssec::CrossSection offset_square() {
  return crosssec::CrossSection::rectangle(1.0, 1.0, {1.0, 0.0});
}

double mass_norm2(const AssembledTube& t, const speclin::Vector& psi) {
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += t.mdiag[i] * psi[i] * psi[i];
  return s;
}

}  // namespace

TEST_CASE("twist profiles evaluate the exact piecewise formulas") {
  const TwistProfile ind = TwistProfile::indicator(1.0, 2.0);
  CHECK(ind.theta_dot(0.5) == 3.0);
  CHECK(ind.theta_dot(1.0) == 3.0);  // breakpoints belong to the support
  CHECK(ind.theta_dot(1.0 + 1e-12) == 1.0);
  CHECK(ind.eps_integral() == 2.0);
  CHECK(ind.eps_sq_integral() == 2.0);
  CHECK(ind.eps_sup() == 1.0);

  const TwistProfile tent = TwistProfile::tent(1.0, 2.0);
  CHECK(tent.theta_dot(0.5) == 2.0);
  CHECK(tent.eps(0.0) == 1.0);
  CHECK(tent.eps(-0.25) == 0.75);
  CHECK(tent.eps(2.0) == 0.0);
  CHECK(tent.eps_integral() == 1.0);
  CHECK(tent.eps_sq_integral() == Catch::Approx(2.0 / 3.0).margin(1e-15));

  const TwistProfile none = TwistProfile::zero(0.7);
  CHECK(none.theta_dot(123.0) == 0.7);
  CHECK(none.eps_sup() == 0.0);

  // wider support scales the named profiles
  const TwistProfile wide = TwistProfile::indicator(0.0, 1.0, 3.0);
  CHECK(wide.eps(2.5) == 1.0);
  CHECK(wide.eps(3.5) == 0.0);
  CHECK(wide.eps_integral() == 6.0);

  const TwistProfile tab = TwistProfile::tabulated(0.0, 1.0, {0.0, 1.0, 0.0});
  CHECK(tab.eps(0.0) == 1.0);
  CHECK(tab.eps(-0.5) == Catch::Approx(0.5).margin(1e-15));
  CHECK(tab.eps(2.0) == 0.0);
  CHECK(tab.eps_sup() == 1.0);
  CHECK(tab.eps_integral() == Catch::Approx(1.0).margin(1e-15));

  CHECK_THROWS_AS(TwistProfile::indicator(1.0, 1.0, 0.0), InvalidConfig);
  CHECK_THROWS_AS(TwistProfile::tabulated(1.0, 1.0, {0.5}), InvalidConfig);
}

TEST_CASE("tube lattice stations, weights and failure modes") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  const AssembledTube t = tube::assemble(d, TwistProfile::zero(0.0));
  REQUIRE(t.np == 15);
  REQUIRE(t.m == 49);
  REQUIRE(t.n() == 735u);
  CHECK(t.x1.front() == Catch::Approx(-3.5).margin(1e-14));
  CHECK(t.x1.back() == Catch::Approx(3.5).margin(1e-14));
  for (int j = 0; j < t.np; ++j) {
    CHECK(t.side[static_cast<std::size_t>(j)] == 0);
    CHECK(t.wpl[static_cast<std::size_t>(j)] == 0.5);
  }

  TubeDiscretization cut = d;
  cut.interface_cut = true;
  const AssembledTube tc = tube::assemble(cut, TwistProfile::zero(0.0));
  REQUIRE(tc.np == 16);
  CHECK(tc.x1[7] == 0.0);
  CHECK(tc.x1[8] == 0.0);
  CHECK(tc.side[7] == 0);
  CHECK(tc.side[8] == 1);
  CHECK(tc.wpl[7] == 0.25);
  CHECK(tc.wpl[8] == 0.25);
  CHECK(tc.wpl[0] == 0.5);
  CHECK(tc.side[6] == 0);
  CHECK(tc.side[9] == 1);

  CHECK_THROWS_AS(tube::make_tube(unit_square(), 0.125, 4.0, 0.3), BadSpacing);
  CHECK_THROWS_AS(tube::make_tube(unit_square(), 0.125, 4.0, 0.0), BadSpacing);
  CHECK_THROWS_AS(tube::make_tube(unit_square(), 0.125, 0.25, 0.5), EmptyGrid);
  CHECK_THROWS_AS(tube::make_tube(unit_square(), 0.125, -2.0, 0.5), InvalidConfig);
  TubeDiscretization off_lattice = tube::make_tube(unit_square(), 0.125, 4.25, 0.5);
  off_lattice.interface_cut = true;
  CHECK_THROWS_AS(tube::assemble(off_lattice, TwistProfile::zero(0.0)), BadSpacing);
}

TEST_CASE("zero twist assembly is exactly the Kronecker sum") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.25, 2.0, 0.5);
  const AssembledTube t = tube::assemble(d, TwistProfile::zero(0.0));
  const speclin::SparseSymMatrix a2 = crosssec::assemble_stiffness(d.cross);
  const double s1 = d.cross.h * d.cross.h / d.h1;

  std::size_t count = 0;
  t.A.for_each([&](int r, int c, double v) {
    ++count;
    const int ja = r / t.m, ca = r % t.m;
    const int jb = c / t.m, cb = c % t.m;
    double expect = 0.0;
    if (ja == jb) {
      expect = d.h1 * a2.at(ca, cb) + (ca == cb ? 2.0 * s1 : 0.0);
    } else if (std::abs(ja - jb) == 1 && ca == cb) {
      expect = -s1;
    }
    REQUIRE(v == Catch::Approx(expect).margin(1e-13));
  });
  const std::size_t expected_nnz =
      static_cast<std::size_t>(t.np) * a2.nnz() +
      2u * static_cast<std::size_t>(t.np - 1) * static_cast<std::size_t>(t.m);
  CHECK(count == expected_nnz);
}

TEST_CASE("separable ground energy matches the discrete closed form") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  const AssembledTube t = tube::assemble(d, TwistProfile::zero(0.0));
  const speclin::EigenResult res = tube::lowest_mode(t);
  const double oned =
      (4.0 / (d.h1 * d.h1)) * std::pow(std::sin(M_PI * d.h1 / (4.0 * d.L)), 2);
  CHECK(res.values[0] ==
        Catch::Approx(t.cross_state.E1 + oned).margin(1e-9));
  // frozen: 19.640557433884752 on this lattice
  CHECK(res.values[0] == Catch::Approx(19.640557433884752).margin(1e-8));
}

TEST_CASE("small tube frozen regressions at beta = 1") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);

  const AssembledTube tz = tube::assemble(d, TwistProfile::zero(1.0));
  CHECK(tz.cross_state.E1 == Catch::Approx(19.486839677110641).margin(1e-8));
  CHECK(tz.lambda1_h == Catch::Approx(19.516476385035219).margin(1e-8));

  const double e0z = tube::lowest_mode(tz).values[0];
  CHECK(e0z == Catch::Approx(19.670104653777393).margin(1e-8));
  CHECK(e0z > tz.lambda1_h);  // constant twist keeps the threshold from above

  const AssembledTube tm =
      tube::assemble(d, TwistProfile::indicator(1.0, -1.0));
  CHECK(tube::lowest_mode(tm).values[0] ==
        Catch::Approx(19.652797040193430).margin(1e-8));

  const AssembledTube tp = tube::assemble(d, TwistProfile::indicator(1.0, 1.0));
  CHECK(tube::lowest_mode(tp).values[0] ==
        Catch::Approx(19.710890308048814).margin(1e-8));

  const AssembledTube tt = tube::assemble(d, TwistProfile::tent(1.0, -1.5));
  CHECK(tube::lowest_mode(tt).values[0] ==
        Catch::Approx(19.660557857846587).margin(1e-8));
}

TEST_CASE("gauge reflection of the twist leaves the spectrum put") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  const AssembledTube ta = tube::assemble(d, TwistProfile::indicator(1.0, -1.0));
  const AssembledTube tb = tube::assemble(d, TwistProfile::indicator(-1.0, 1.0));
  const double ea = tube::lowest_mode(ta).values[0];
  const double eb = tube::lowest_mode(tb).values[0];
  CHECK(ea == Catch::Approx(eb).margin(1e-7));
  CHECK(ta.lambda1_h == Catch::Approx(tb.lambda1_h).margin(1e-9));
}

TEST_CASE("longer tubes cannot raise the ground energy") {
  double prev = std::numeric_limits<double>::infinity();
  for (double len : {2.0, 4.0, 6.0}) {
    const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, len, 0.5);
    const AssembledTube t = tube::assemble(d, TwistProfile::zero(1.0));
    const double e0 = tube::lowest_mode(t).values[0];
    CHECK(e0 <= prev + 1e-10);
    CHECK(e0 >= t.lambda1_h - 1e-9);
    prev = e0;
  }
}

TEST_CASE("interface cut at beta = 0 is spectrally invisible") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  TubeDiscretization cut = d;
  cut.interface_cut = true;
  const double e0d =
      tube::lowest_mode(tube::assemble(d, TwistProfile::zero(0.0))).values[0];
  const double e0n =
      tube::lowest_mode(tube::assemble(cut, TwistProfile::zero(0.0))).values[0];
  CHECK(e0n == Catch::Approx(e0d).margin(1e-10));
}

TEST_CASE("interface relaxation on the offset square, frozen values") {
  const TubeDiscretization d = tube::make_tube(offset_square(), 0.125, 4.0, 0.5);
  TubeDiscretization cut = d;
  cut.interface_cut = true;

  const AssembledTube td = tube::assemble(d, TwistProfile::zero(1.0));
  const AssembledTube tn = tube::assemble(cut, TwistProfile::zero(1.0));
  CHECK(td.lambda1_h == Catch::Approx(25.818597331429086).margin(1e-8));

  const double e0d = tube::lowest_mode(td).values[0];
  const double e0n = tube::lowest_mode(tn).values[0];
  CHECK(e0d == Catch::Approx(25.906414435411584).margin(1e-7));
  CHECK(e0n == Catch::Approx(25.650806010352134).margin(1e-7));
  CHECK(e0n <= e0d);           // broken form has the larger domain
  CHECK(e0n < td.lambda1_h);   // and dips below the transverse threshold
}

TEST_CASE("interface witness state drives the broken form negative-ward") {
  const TubeDiscretization d = tube::make_tube(offset_square(), 0.125, 4.0, 0.5);

  const tube::NeumannCheck nc = tube::neumann_interface_check(d, 1.0, 1.0);
  CHECK(nc.lambda1_h == Catch::Approx(25.818597331429086).margin(1e-8));
  CHECK(nc.e0_neumann == Catch::Approx(25.650806010352134).margin(1e-7));
  CHECK(nc.q_plateau == Catch::Approx(2.0).margin(1e-6));
  CHECK(nc.mixed == Catch::Approx(-0.462057016478795).margin(1e-6));
  CHECK(nc.curvature == Catch::Approx(0.720094971387481).margin(1e-6));
  CHECK(nc.delta_star == Catch::Approx(0.641661219102).margin(1e-6));
  CHECK(nc.q_test == Catch::Approx(1.703515931979227).margin(1e-6));
  // the mixed term is the discrete image of beta*rho(0)/2 = -1/2
  CHECK(std::abs(nc.mixed / -0.5 - 1.0) < 0.10);

  const tube::NeumannCheck nc2 = tube::neumann_interface_check(d, 1.0, 2.0);
  CHECK(nc2.q_plateau == Catch::Approx(1.0).margin(1e-6));
  CHECK(nc2.q_test == Catch::Approx(0.703515931977926).margin(1e-6));

  CHECK_THROWS_AS(
      tube::neumann_interface_check(tube::make_tube(unit_square(), 0.25, 2.0, 0.5), 1.0),
      BranchCutInsideDomain);
  CHECK_THROWS_AS(tube::neumann_interface_check(d, 1.0, 0.0), InvalidConfig);
  CHECK(tube::branch_cut_hits(crosssec::CrossSection::disc(0.5)));
  CHECK(tube::branch_cut_hits(crosssec::CrossSection::annulus(0.25, 0.5)));
  CHECK_FALSE(tube::branch_cut_hits(crosssec::CrossSection::disc(0.4, {1.0, 0.0})));
  CHECK_FALSE(tube::branch_cut_hits(
      crosssec::CrossSection::rectangle(1.0, 1.0, {0.75, 2.0})));
}

TEST_CASE("plateau-ramp energy is the exact ramp cost") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  const AssembledTube t = tube::assemble(d, TwistProfile::zero(1.0));

  std::vector<double> phi(static_cast<std::size_t>(t.np));
  for (int j = 0; j < t.np; ++j)
    phi[static_cast<std::size_t>(j)] = tube::plateau_ramp(t.x1[static_cast<std::size_t>(j)], 1.0);
  const speclin::Vector psi = tube::tensor_mode(t, phi, t.cross_state.chi);

  // frozen 1.999999999999599; the continuum ramp cost is 2/N with N = 1
  CHECK(tube::evaluate_Q(t, psi) == Catch::Approx(2.0).margin(1e-8));

  CHECK(tube::evaluate_Q(t, speclin::Vector(t.n(), 0.0)) == 0.0);
  CHECK_THROWS_AS(tube::evaluate_Q(t, speclin::Vector(3, 1.0)), DimensionMismatch);
  CHECK_THROWS_AS(tube::tensor_mode(t, {1.0}, t.cross_state.chi), DimensionMismatch);
}

TEST_CASE("cooperating twists keep the shifted form nonnegative") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  const AssembledTube t = tube::assemble(d, TwistProfile::indicator(0.5, 0.2));
  std::mt19937_64 rng(0x51a7eb01dULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    speclin::Vector psi(t.n());
    for (double& v : psi) v = u(rng);
    CHECK(tube::evaluate_Q(t, psi) >= -1e-9 * std::max(1.0, mass_norm2(t, psi)));
  }
}

TEST_CASE("classical weighted bound holds on random states") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  const AssembledTube t = tube::assemble(d, TwistProfile::zero(1.0));
  std::mt19937_64 rng(0xdecafc0ffeeULL);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int trial = 0; trial < 100; ++trial) {
    speclin::Vector psi(t.n());
    for (double& v : psi) v = u(rng);
    const tube::ClassicalHardySides s = tube::hardy_classical_check(t, -1.0, 1.0, 0.0, psi);
    CHECK(s.lhs <= s.rhs);
  }

  // a state supported inside I x omega is dominated by the potential term
  speclin::Vector inside(t.n(), 0.0);
  double mass_in = 0.0;
  for (int j = 0; j < t.np; ++j) {
    if (std::abs(t.x1[static_cast<std::size_t>(j)]) >= 1.0) continue;
    for (int c = 0; c < t.m; ++c) {
      const std::size_t i = static_cast<std::size_t>(j * t.m + c);
      inside[i] = u(rng);
      mass_in += t.mdiag[i] * inside[i] * inside[i];
    }
  }
  const tube::ClassicalHardySides s = tube::hardy_classical_check(t, -1.0, 1.0, 0.0, inside);
  CHECK(s.lhs <= mass_in + 1e-12);
  CHECK(s.rhs >= (2.0 + 64.0 / 4.0) * mass_in);

  const tube::ClassicalHardySides z =
      tube::hardy_classical_check(t, -1.0, 1.0, 0.0, speclin::Vector(t.n(), 0.0));
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  CHECK_THROWS_AS(tube::hardy_classical_check(t, 1.0, -1.0, 0.0, inside), EmptyInterval);
}

TEST_CASE("hardy pencil estimate: frozen ladder and shift bookkeeping") {
  const TubeDiscretization d4 = tube::make_tube(unit_square(), 0.125, 4.0, 0.5);
  const AssembledTube t4 = tube::assemble(d4, TwistProfile::zero(1.0));
  const tube::HardyEstimate h4 = tube::estimate_hardy_constant(t4);
  CHECK(h4.raw == Catch::Approx(2.870658613318e-01).margin(1e-7));
  CHECK(h4.corrected == Catch::Approx(2.870658595218e-01).margin(1e-7));
  CHECK(h4.corrected < h4.raw);  // the stabilizing shift is subtracted

  const TubeDiscretization d8 = tube::make_tube(unit_square(), 0.125, 8.0, 0.5);
  const AssembledTube t8 = tube::assemble(d8, TwistProfile::zero(1.0));
  const tube::HardyEstimate h8 = tube::estimate_hardy_constant(t8);
  CHECK(h8.corrected == Catch::Approx(1.140197828753e-01).margin(1e-7));
  CHECK(h8.corrected < h4.corrected);  // no Hardy inequality survives L -> inf

  const AssembledTube ti = tube::assemble(d8, TwistProfile::indicator(1.0, -1.0));
  const tube::HardyEstimate hi = tube::estimate_hardy_constant(ti);
  CHECK(hi.corrected == Catch::Approx(8.369746477738e-02).margin(1e-7));
}

TEST_CASE("sweep over alpha keeps input order and survives bad rows") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.25, 2.0, 0.5);
  const std::vector<double> alphas{1.0, -1.0, 0.0};
  const tube::SweepTable table =
      tube::sweep_alpha(d, 1.0, ProfileKind::zero, alphas);
  REQUIRE(table.rows.size() == 3u);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    CHECK(table.rows[i].alpha == alphas[i]);
    CHECK(table.rows[i].converged);
  }
  // alpha multiplies nothing for the zero kind
  CHECK(table.rows[0].e0 == Catch::Approx(table.rows[2].e0).margin(1e-9));
  CHECK(table.rows[1].e0 == Catch::Approx(table.rows[2].e0).margin(1e-9));
  CHECK(table.rows[0].gap > 0.0);
  CHECK_FALSE(table.has_alpha_star);
}

TEST_CASE("crossing location interpolates the gap sign change") {
  tube::SweepTable table;
  auto row = [](double a, double g, bool ok) {
    tube::SweepRow r;
    r.alpha = a;
    r.gap = g;
    r.e0 = g;
    r.converged = ok;
    return r;
  };
  // unsorted input, one dead row in the middle, two crossings
  table.rows = {row(0.0, 1.0, true),   row(-4.0, 2.0, true),
                row(-3.0, 1.0, true),  row(-2.5, 0.0, false),
                row(-2.0, -1.0, true), row(-1.0, -2.0, true)};
  tube::detail::locate_crossings(table);
  REQUIRE(table.crossings.size() == 2u);
  CHECK(table.crossings[0] == Catch::Approx(-2.5).margin(1e-12));
  CHECK(table.crossings[1] == Catch::Approx(-1.0 + 2.0 / 3.0).margin(1e-12));
  CHECK(table.has_alpha_star);
  CHECK(table.alpha_star == Catch::Approx(-2.5).margin(1e-12));

  // exact zero at a sample is itself the crossing
  tube::SweepTable exact;
  exact.rows = {row(-2.0, 1.0, true), row(-1.0, 0.0, true), row(0.0, 1.0, true)};
  tube::detail::locate_crossings(exact);
  REQUIRE(exact.crossings.size() == 1u);
  CHECK(exact.alpha_star == -1.0);
}

TEST_CASE("lowest modes come back ascending and match the 1D ladder") {
  const TubeDiscretization d = tube::make_tube(unit_square(), 0.25, 2.0, 0.5);
  const AssembledTube t = tube::assemble(d, TwistProfile::zero(0.0));
  const speclin::EigenResult res = tube::lowest_mode(t, 2, 1e-10);
  REQUIRE(res.values.size() == 2u);
  CHECK(res.values[0] <= res.values[1]);
  const double base = t.cross_state.E1;
  const double k1 =
      (4.0 / (d.h1 * d.h1)) * std::pow(std::sin(M_PI * d.h1 / (4.0 * d.L)), 2);
  const double k2 =
      (4.0 / (d.h1 * d.h1)) * std::pow(std::sin(2.0 * M_PI * d.h1 / (4.0 * d.L)), 2);
  CHECK(res.values[0] == Catch::Approx(base + k1).margin(1e-8));
  CHECK(res.values[1] == Catch::Approx(base + k2).margin(1e-8));
}
