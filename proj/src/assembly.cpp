#include "mcshape/assembly.hpp"

namespace mcs {

SparseSystem assemble_p1_mass(const Mesh& mesh, const DofMap& p1,
                              std::span<const double> cell_coeff) {
  SystemBuilder builder(p1.n_dofs());
  const auto& quad = TriQuadrature::degree4();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const double coeff = cell_coeff.empty() ? 1.0 : cell_coeff[c];
    const auto nodes = p1.cell_nodes(c);
    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det * coeff;
      const auto& l = quad.bary[q];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) builder.add(nodes[i], nodes[j], w * l[i] * l[j]);
    }
  }
  return builder.build();
}

SparseSystem assemble_p1_stiffness(const Mesh& mesh, const DofMap& p1,
                                   std::span<const double> cell_coeff) {
  SystemBuilder builder(p1.n_dofs());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const double coeff = cell_coeff.empty() ? 1.0 : cell_coeff[c];
    const double area = 0.5 * geo.det;
    const auto nodes = p1.cell_nodes(c);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        builder.add(nodes[i], nodes[j], coeff * area * geo.grad_bary[i].dot(geo.grad_bary[j]));
  }
  return builder.build();
}

Vec2 eval_p2_vector(const DofMap& p2v, const Eigen::VectorXd& coeffs, int cell,
                    const std::array<double, 3>& bary) {
  const auto values = P2Basis::values(bary);
  const auto nodes = p2v.cell_nodes(cell);
  Vec2 out = Vec2::Zero();
  for (int i = 0; i < 6; ++i) {
    out.x() += values[i] * coeffs[p2v.dof(nodes[i], 0)];
    out.y() += values[i] * coeffs[p2v.dof(nodes[i], 1)];
  }
  return out;
}

Mat2 grad_p2_vector(const Mesh& mesh, const DofMap& p2v, const Eigen::VectorXd& coeffs, int cell,
                    const std::array<double, 3>& bary) {
  const auto geo = cell_geometry(mesh, cell);
  const auto bg = P2Basis::bary_gradients(bary);
  const auto nodes = p2v.cell_nodes(cell);
  Mat2 jac = Mat2::Zero();
  for (int i = 0; i < 6; ++i) {
    Vec2 grad = Vec2::Zero();
    for (int k = 0; k < 3; ++k) grad += bg[i][k] * geo.grad_bary[k];
    const Vec2 ui(coeffs[p2v.dof(nodes[i], 0)], coeffs[p2v.dof(nodes[i], 1)]);
    jac += ui * grad.transpose();
  }
  return jac;
}

double eval_p1_scalar(const Mesh& mesh, const Eigen::VectorXd& coeffs, int cell,
                      const std::array<double, 3>& bary) {
  const auto& t = mesh.triangles[cell];
  return bary[0] * coeffs[t[0]] + bary[1] * coeffs[t[1]] + bary[2] * coeffs[t[2]];
}

Vec2 grad_p1_scalar(const Mesh& mesh, const Eigen::VectorXd& coeffs, int cell) {
  const auto geo = cell_geometry(mesh, cell);
  const auto& t = mesh.triangles[cell];
  return coeffs[t[0]] * geo.grad_bary[0] + coeffs[t[1]] * geo.grad_bary[1] +
         coeffs[t[2]] * geo.grad_bary[2];
}

}  // namespace mcs
