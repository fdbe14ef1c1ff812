#pragma once

#include <functional>
#include <optional>

#include "mcshape/physics.hpp"

namespace mcs {

/// Cost weights and tracking targets, frozen on the initial geometry.
struct CostConfig {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double lambda3 = 1.0;
  double q_des = 0.0;  // desired heat absorption [W]
  DesiredVelocity u_des;
};

struct CostValue {
  double J = 0, J1 = 0, J2 = 0, J3 = 0, Q = 0;
};

/// Normalizes the weights on the initial geometry: lambda1*J1 = lambda2*J2 = 1
/// and lambda3*J3 = 1e-2. A vanishing component falls back to weight 1.
/// q_des is either absolute or (1 + q_des_relative) * Q(initial).
CostConfig make_cost_config(const Mesh& mesh, const Spaces& spaces, const StateSolution& state,
                            const PhysicalParams& params, ModelKind model, const DarcyParams* darcy,
                            std::optional<double> q_des_absolute, double q_des_relative);

CostValue cost(const Mesh& mesh, const Spaces& spaces, const StateSolution& state,
               const CostConfig& cfg, const PhysicalParams& params, ModelKind model,
               const DarcyParams* darcy);

struct AdjointSolution {
  Eigen::VectorXd velocity;     // adjoint velocity
  Eigen::VectorXd pressure;     // adjoint pressure
  Eigen::VectorXd temperature;  // adjoint temperature
};

/// Reverse-order adjoint solve: adjoint temperature first (transposed
/// convection), then adjoint Stokes with the grad(T) S source. Reuses the
/// state Stokes factorization when provided (the operator is symmetric).
AdjointSolution solve_adjoint(const Mesh& mesh, const Spaces& spaces, const PhysicalParams& params,
                              ModelKind model, const DarcyParams* darcy, const SupgConfig& supg,
                              const StateSolution& state, const CostConfig& cfg,
                              const StokesOperator* reuse_stokes = nullptr);

/// Assembles the shape derivative as a linear functional on the P1 vector
/// deformation space (the "gradient vector"), to be contracted with
/// candidate directions.
Eigen::VectorXd shape_derivative_functional(const Mesh& mesh, const Spaces& spaces,
                                            const PhysicalParams& params, ModelKind model,
                                            const DarcyParams* darcy, const StateSolution& state,
                                            const AdjointSolution& adjoint, const CostConfig& cfg);

inline double shape_derivative(const Eigen::VectorXd& functional, const VectorFieldP1& v) {
  return functional.dot(v.values);
}

/// int g * div_Gamma(v) ds over facets with the given marker.
double tangential_divergence_term(const Mesh& mesh, FacetMarker marker,
                                  const std::function<double(const Vec2&)>& g,
                                  const VectorFieldP1& v);

struct ElasticityConfig {
  double mu_elas = 1.0;
  double lambda_elas = 0.1;
  double delta = 0.1;
  double c_aniso = 1e5;
  std::vector<double> nu;  // frozen per-cell relative stiffness

  void validate() const;
};

struct ShapeGradientResult {
  VectorFieldP1 field;
  double norm = 0.0;  // sqrt(a(G,G))
};

/// Unconstrained elasticity operator of the shape-gradient inner product on
/// the P1 vector space; a(U, V) = U . (A V).
SparseSystem elasticity_operator(const Mesh& mesh, const ElasticityConfig& elas, ModelKind model);

/// Riesz representative of dj in the elasticity inner product, constrained to
/// vanish on inlet/outlet and to slide along the channel/Darcy walls.
ShapeGradientResult shape_gradient(const Mesh& mesh, const Eigen::VectorXd& dj,
                                   const ElasticityConfig& elas, ModelKind model);

}  // namespace mcs
