#pragma once

#include <span>

#include "mcshape/dofmap.hpp"
#include "mcshape/quadrature.hpp"
#include "mcshape/sparse.hpp"

namespace mcs {

/// P1 mass matrix; optional per-cell coefficient (empty means 1).
SparseSystem assemble_p1_mass(const Mesh& mesh, const DofMap& p1,
                              std::span<const double> cell_coeff = {});

/// P1 stiffness matrix; optional per-cell coefficient.
SparseSystem assemble_p1_stiffness(const Mesh& mesh, const DofMap& p1,
                                   std::span<const double> cell_coeff = {});

// Pointwise evaluation of discrete fields at a barycentric point of a cell.
Vec2 eval_p2_vector(const DofMap& p2v, const Eigen::VectorXd& coeffs, int cell,
                    const std::array<double, 3>& bary);
Mat2 grad_p2_vector(const Mesh& mesh, const DofMap& p2v, const Eigen::VectorXd& coeffs, int cell,
                    const std::array<double, 3>& bary);
double eval_p1_scalar(const Mesh& mesh, const Eigen::VectorXd& coeffs, int cell,
                      const std::array<double, 3>& bary);
Vec2 grad_p1_scalar(const Mesh& mesh, const Eigen::VectorXd& coeffs, int cell);

}  // namespace mcs
