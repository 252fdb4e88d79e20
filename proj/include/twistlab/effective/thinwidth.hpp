#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "twistlab/crosssec/shape.hpp"
#include "twistlab/crosssec/transverse.hpp"
#include "twistlab/effective/model.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/speclin/parallel.hpp"
#include "twistlab/tube/assemble.hpp"
#include "twistlab/tube/solve.hpp"

namespace twistlab::effective {

// The same cross-section shrunk about the rotation origin. Dyadic factors
// scale every stored length exactly, so the scaled grid is the unit grid
// times delta node for node.
inline crosssec::CrossSection scaled_shape(const crosssec::CrossSection& cs, double delta) {
  if (!(delta > 0.0)) throw InvalidConfig("scaled_shape: delta must be positive");
  crosssec::CrossSection out = cs;
  out.width *= delta;
  out.height *= delta;
  out.radius *= delta;
  out.r_inner *= delta;
  out.r_outer *= delta;
  out.offset[0] *= delta;
  out.offset[1] *= delta;
  return out;
}

struct ThinWidthConfig {
  double h_cross = 0.125;  // transverse spacing of the unit-width grid, scaled with delta
  double L = 12.0;         // tube half-length
  double h1 = 0.25;        // longitudinal spacing
  speclin::EigenOptions eig;
};

struct ThinWidthRow {
  double delta = 0.0;
  double lambda1 = 0.0;    // transverse threshold of the scaled tube
  double e0 = 0.0;         // ground energy of the scaled tube
  double gap3d = 0.0;      // e0 - lambda1
  double gap_eff = 0.0;    // ground energy of the matched effective model
  double remainder = 0.0;  // lambda1 - E1/delta^2 - beta^2 c_lat, expected O(delta^2)
};

struct ThinWidthTable {
  std::vector<ThinWidthRow> rows;
  double E1_unit = 0.0;   // untwisted transverse ground energy of the unit grid
  double c_lat = 0.0;     // lattice coupling constant of the unit grid
  double gap_eff = 0.0;   // shared effective ground energy
};

// Shrinks the cross-section through the given widths and compares the tube
// gap against the effective 1D model. The model reuses the tube's own
// longitudinal box (half-length L, spacing h1, Dirichlet ends) so the
// confinement shift of the truncation cancels from the comparison, and its
// coupling constant is the plain lattice sum of the unit grid, the constant
// the scaled grids actually converge with. The remainder column isolates
// the threshold asymptotics lambda1(delta) = E1/delta^2 + beta^2 c_lat +
// O(delta^2).
inline ThinWidthTable thin_width_compare(const crosssec::CrossSection& cs,
                                         const std::vector<double>& deltas,
                                         const tube::TwistProfile& profile, double alpha,
                                         const ThinWidthConfig& cfg = {}) {
  if (deltas.empty()) throw InvalidConfig("thin_width_compare: empty delta list");
  for (double d : deltas)
    if (!(d > 0.0)) throw InvalidConfig("thin_width_compare: delta must be positive");
  if (!(cfg.h_cross > 0.0)) throw BadSpacing("thin_width_compare: h_cross must be positive");

  ThinWidthTable table;
  const crosssec::CrossSectionGrid unit = crosssec::build_grid(cs, cfg.h_cross);
  const crosssec::TransverseGroundState base =
      crosssec::solve_transverse(unit, 0.0, cfg.eig);
  table.E1_unit = base.E1;
  const crosssec::AngularDerivative rows = crosssec::build_angular_rows(unit);
  const speclin::Vector gj = rows.apply(base.J1);
  double c_lat = 0.0;
  for (double v : gj) c_lat += v * v;
  c_lat *= unit.h * unit.h;
  table.c_lat = c_lat;

  Effective1D model;
  model.C_omega = c_lat;
  model.profile = profile;
  model.L1 = cfg.L;
  model.dx = cfg.h1;
  table.gap_eff = solve_effective(model, alpha).values[0];

  tube::TwistProfile prof = profile;
  prof.alpha = alpha;
  const double beta2 = profile.beta * profile.beta;

  table.rows.resize(deltas.size());
  std::vector<std::exception_ptr> errors(deltas.size());
  speclin::parallel_for(
      deltas.size(),
      [&](std::size_t i) {
        try {
          const double delta = deltas[i];
          ThinWidthRow& row = table.rows[i];
          row.delta = delta;
          row.gap_eff = table.gap_eff;
          const tube::TubeDiscretization d = tube::make_tube(
              scaled_shape(cs, delta), cfg.h_cross * delta, cfg.L, cfg.h1);
          const tube::AssembledTube t = tube::assemble(d, prof, cfg.eig);
          const speclin::EigenResult res = tube::lowest_mode(t, cfg.eig);
          row.lambda1 = t.lambda1_h;
          row.e0 = res.values[0];
          row.gap3d = res.values[0] - t.lambda1_h;
          row.remainder = t.lambda1_h - table.E1_unit / (delta * delta) - beta2 * c_lat;
        } catch (...) {
          errors[i] = std::current_exception();
        }
      },
      1);
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return table;
}

}  // namespace twistlab::effective
