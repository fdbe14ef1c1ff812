#pragma once

#include <vector>

#include "mcshape/config.hpp"

namespace mcs {

struct ConvergenceLevel {
  double h = 0;
  double err_velocity = 0, err_pressure = 0, err_temperature = 0;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  double velocity_order = 0, pressure_order = 0, temperature_order = 0;
};

/// Manufactured-solution study for the full-2D operator on the unit square
/// with full Dirichlet data, a pinned pressure node, and analytic body
/// forces. Orders are least-squares slopes over the refinement sequence.
ConvergenceResult manufactured_convergence(const std::vector<int>& resolutions = {8, 16, 32, 64});

/// Smooth randomized deformation direction (fixed-seed trigonometric basis),
/// projected to feasibility: zero on inlet/outlet, tangential on the
/// channel/Darcy walls; normalized to unit max magnitude.
VectorFieldP1 random_smooth_direction(const Mesh& mesh, unsigned seed, int max_wavenumber = 3);

struct FdCheck {
  std::vector<double> rel_errors;
  double max_rel_error = 0;
};

/// Central-difference check of the adjoint shape derivative on the given
/// mesh, SUPG off, at step 1e-6 * diameter.
FdCheck fd_gradient_check(const Mesh& mesh, const PhysicalParams& params, ModelKind model,
                          const DarcyParams* darcy, int n_directions, unsigned seed);

struct TaylorCheck {
  std::vector<double> t_values;
  std::vector<double> remainders;
  double slope = 0;
};

/// First-order Taylor remainder R(t) = |j(t) - j(0) - t dj[v]| measured at
/// t in {1e-3, 5e-4, 2.5e-4} * diameter; returns the log-log slope.
TaylorCheck taylor_remainder_check(const Mesh& mesh, const PhysicalParams& params, ModelKind model,
                                   const DarcyParams* darcy, const SupgConfig& supg, unsigned seed);

struct CompareNorms {
  double l2 = 0, linf = 0, l1 = 0;
};

struct CompareResult {
  CompareNorms pressure;     // relative differences w.r.t. the full-2D field
  CompareNorms temperature;  // relative, referenced to T - T_in
  std::vector<double> flux_full;
  std::vector<double> flux_darcy;
};

/// Solves both models on matching geometry and reports field differences on
/// the full-2D mesh (the Darcy solution is interpolated there) plus the
/// per-channel flux tables.
CompareResult compare_models(const RunConfig& full_config, const RunConfig& darcy_config);

}  // namespace mcs
