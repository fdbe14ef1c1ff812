#pragma once

#include <array>

#include "mcshape/mesh.hpp"

namespace mcs {

/// Dunavant-type rule on the reference triangle, exact for degree <= 4.
/// Weights sum to the reference area 1/2.
struct TriQuadrature {
  static constexpr int n_points = 6;
  std::array<std::array<double, 3>, n_points> bary;  // barycentric coordinates
  std::array<double, n_points> weights;

  static const TriQuadrature& degree4();
};

/// 3-point Gauss rule on [0,1], exact for degree <= 5. Weights sum to 1.
struct FacetQuadrature {
  static constexpr int n_points = 3;
  std::array<double, n_points> points;
  std::array<double, n_points> weights;

  static const FacetQuadrature& gauss3();
};

/// Affine geometry of a triangle: Jacobian determinant (= 2*area) and the
/// physical gradients of the barycentric basis functions.
struct CellGeometry {
  double det = 0.0;
  std::array<Vec2, 3> grad_bary{};
};

CellGeometry cell_geometry(const Mesh& mesh, int cell);

/// P2 Lagrange basis on the reference triangle in barycentric form. Local
/// node order: vertices 0,1,2 then edge midpoints (0,1), (1,2), (2,0).
struct P2Basis {
  static std::array<double, 6> values(const std::array<double, 3>& l);
  // Gradient as coefficients of grad(lambda_i); contract with CellGeometry.
  static std::array<std::array<double, 3>, 6> bary_gradients(const std::array<double, 3>& l);
};

}  // namespace mcs
