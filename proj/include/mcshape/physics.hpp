#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mcshape/assembly.hpp"
#include "mcshape/msh_io.hpp"

namespace mcs {

struct PhysicalParams {
  double mu = 3e-4;       // dynamic viscosity [kg/m/s]
  double rho = 700.0;     // density [kg/m^3]
  double kappa = 0.1;     // thermal conductivity [W/m/K]
  double cp = 2000.0;     // specific heat capacity [J/kg/K]
  double m_in = 6e-5;     // mass inflow [kg/s]
  double T_in = 300.0;    // inflow temperature [C]
  double T_wall = 400.0;  // wall temperature [C]
  double alpha = 10.0;    // wall heat transfer coefficient [W/m^2/K]
  double height = 3e-4;   // out-of-plane height h [m]

  void validate() const;
};

struct DarcyParams {
  double phi = 2.02e-1;   // porosity
  double k_hat = 3.16e-9; // permeability along the channel axis
  double h_fs = 2.63e4;   // interfacial heat transfer coefficient [W/K/m^3]
  double eps_relax = 1e-5;
  Vec2 channel_axis{0.0, 1.0};

  void validate() const;
  Mat2 permeability_inverse() const;
};

struct SupgConfig {
  bool enabled = true;
};

/// Velocity (P2 vector), pressure and temperature (P1) spaces on one mesh.
struct Spaces {
  DofMap velocity;
  DofMap scalar;

  explicit Spaces(const Mesh& mesh)
      : velocity(mesh, SpaceKind::P2Vector), scalar(mesh, SpaceKind::P1Scalar) {}
};

struct StateSolution {
  Eigen::VectorXd velocity;
  Eigen::VectorXd pressure;
  Eigen::VectorXd temperature;
};

/// Per-region weak-form coefficients of the dimension-reduced models. The
/// same table backs the state solve, the adjoint solve, and the shape
/// derivative so the three cannot drift apart.
struct RegionCoeffs {
  double visc = 0;      // Du:Dv factor
  double drag_iso = 0;  // isotropic u.v factor
  Mat2 drag_mat = Mat2::Zero();  // matrix-valued u.v term (porous block)
  bool has_drag_mat = false;
  double pres = 0;   // p div v / q div u factor
  double diff = 0;   // grad T . grad S factor
  double conv = 0;   // (u . grad T) S factor
  double react = 0;  // (T - T_wall) S volume factor
};

RegionCoeffs region_coeffs(const PhysicalParams& params, ModelKind model, const DarcyParams* darcy,
                           const RegionMarker& marker);

/// True if the marker carries the Robin wall term h*alpha*(T - T_wall).
bool robin_marker(ModelKind model, FacetMarker marker);

/// Thickness factor c in the mass-flux reconstruction m = rho*c*int u.n ds.
double flux_thickness_factor(const PhysicalParams& params, ModelKind model);

/// Analytic inlet data: parabolic across the inlet segment, directed along
/// the inward normal, scaled so the reconstructed 3D mass flow equals m_in.
struct InflowProfile {
  Vec2 a = Vec2::Zero(), b = Vec2::Zero();
  Vec2 direction = Vec2::Zero();
  double peak = 0.0;
  double width = 0.0;

  Vec2 value(const Vec2& x) const;
};

InflowProfile inflow_profile(const Mesh& mesh, const PhysicalParams& params, ModelKind model);

/// Desired velocity field: per-channel Poiseuille profiles (full 2D) or the
/// constant superficial velocity in the porous block (Darcy 2D). The profile
/// geometry is frozen on the mesh given at construction; evaluation is gated
/// by the cell's region marker.
class DesiredVelocity {
 public:
  DesiredVelocity() = default;
  static DesiredVelocity full2d(const Mesh& mesh, const PhysicalParams& params,
                                Vec2 axis = Vec2(0.0, 1.0));
  static DesiredVelocity darcy2d(const Mesh& mesh, const PhysicalParams& params,
                                 const DarcyParams& darcy);

  Vec2 value(const Vec2& x, const RegionMarker& marker) const;
  Mat2 jacobian(const Vec2& x, const RegionMarker& marker) const;

 private:
  struct Strip {
    double lo = 0, width = 0, peak = 0;
  };
  std::vector<Strip> strips_;
  Vec2 axis_{0.0, 1.0};
  Vec2 perp_{1.0, 0.0};
  Vec2 darcy_value_ = Vec2::Zero();
  bool darcy_ = false;
};

/// Verification-only hooks (manufactured solutions); all disabled by default.
struct Verification {
  std::function<Vec2(const Vec2&)> body_force_velocity;
  std::function<double(const Vec2&)> body_force_temperature;
  std::function<Vec2(const Vec2&)> dirichlet_velocity;     // imposed on all boundary nodes
  std::function<double(const Vec2&)> dirichlet_temperature;  // imposed on all boundary nodes
  bool pin_pressure = false;
  double pin_pressure_value = 0.0;
};

/// Assembled, constrained Stokes block with its factorization. The operator
/// is symmetric, so the adjoint Stokes solve reuses the factorization.
struct StokesOperator {
  SparseSystem system;
  std::vector<std::pair<int, double>> constraints;  // velocity dofs only
  int n_vel = 0;
  std::shared_ptr<DirectSolver> solver;
};

StokesOperator build_stokes_operator(const Mesh& mesh, const Spaces& spaces,
                                     const PhysicalParams& params, ModelKind model,
                                     const DarcyParams* darcy,
                                     const Verification* verification = nullptr);

/// Sequential solve: Stokes block first, then temperature with the computed
/// velocity. Pass `keep_stokes` to retain the factorization for adjoint use.
StateSolution solve_state(const Mesh& mesh, const Spaces& spaces, const PhysicalParams& params,
                          ModelKind model, const DarcyParams* darcy, const SupgConfig& supg,
                          const Verification* verification = nullptr,
                          StokesOperator* keep_stokes = nullptr);

inline StateSolution solve_state_full2d(const Mesh& mesh, const Spaces& spaces,
                                        const PhysicalParams& params, const SupgConfig& supg) {
  return solve_state(mesh, spaces, params, ModelKind::Full2D, nullptr, supg);
}
inline StateSolution solve_state_darcy2d(const Mesh& mesh, const Spaces& spaces,
                                         const PhysicalParams& params, const DarcyParams& darcy,
                                         const SupgConfig& supg) {
  return solve_state(mesh, spaces, params, ModelKind::Darcy2D, &darcy, supg);
}

// SUPG helpers shared with the adjoint assembly.
double cell_diameter(const Mesh& mesh, int cell);
double cell_average_speed(const Spaces& spaces, const Eigen::VectorXd& velocity, int cell);
double supg_tau(double speed, double h_cell, double conv, double diff);

/// rho * c * int_{marker} u.n ds (signed, outward normal).
double boundary_mass_flux(const Mesh& mesh, const Spaces& spaces, const StateSolution& state,
                          const PhysicalParams& params, ModelKind model, FacetMarker marker);

/// Mass flux through each channel's mid-length cross-section, computed in the
/// discretely conservative band form (their sum equals the outflow flux to
/// solver accuracy). Darcy meshes report `n_bins` equal bins across the block.
std::vector<double> channel_mass_fluxes(const Mesh& mesh, const Spaces& spaces,
                                        const StateSolution& state, const PhysicalParams& params,
                                        ModelKind model, int n_bins = 0);

}  // namespace mcs
