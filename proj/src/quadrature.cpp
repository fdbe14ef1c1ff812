#include "mcshape/quadrature.hpp"

namespace mcs {

const TriQuadrature& TriQuadrature::degree4() {
  static const TriQuadrature rule = [] {
    TriQuadrature q;
    const double a1 = 0.816847572980459, b1 = 0.091576213509771, w1 = 0.109951743655322 / 2.0;
    const double a2 = 0.108103018168070, b2 = 0.445948490915965, w2 = 0.223381589678011 / 2.0;
    q.bary = {{{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1}, {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}}};
    q.weights = {w1, w1, w1, w2, w2, w2};
    return q;
  }();
  return rule;
}

const FacetQuadrature& FacetQuadrature::gauss3() {
  static const FacetQuadrature rule = [] {
    FacetQuadrature q;
    const double s = std::sqrt(3.0 / 5.0);
    q.points = {0.5 * (1.0 - s), 0.5, 0.5 * (1.0 + s)};
    q.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return q;
  }();
  return rule;
}

CellGeometry cell_geometry(const Mesh& mesh, int cell) {
  const auto& t = mesh.triangles[cell];
  const Vec2& x0 = mesh.vertices[t[0]];
  const Vec2& x1 = mesh.vertices[t[1]];
  const Vec2& x2 = mesh.vertices[t[2]];
  CellGeometry geo;
  geo.det = (x1.x() - x0.x()) * (x2.y() - x0.y()) - (x2.x() - x0.x()) * (x1.y() - x0.y());
  geo.grad_bary[0] = Vec2(x1.y() - x2.y(), x2.x() - x1.x()) / geo.det;
  geo.grad_bary[1] = Vec2(x2.y() - x0.y(), x0.x() - x2.x()) / geo.det;
  geo.grad_bary[2] = Vec2(x0.y() - x1.y(), x1.x() - x0.x()) / geo.det;
  return geo;
}

std::array<double, 6> P2Basis::values(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],         4.0 * l[1] * l[2],         4.0 * l[2] * l[0]};
}

std::array<std::array<double, 3>, 6> P2Basis::bary_gradients(const std::array<double, 3>& l) {
  // Row i: coefficients c_j with grad N_i = sum_j c_j grad(lambda_j).
  return {{{4.0 * l[0] - 1.0, 0.0, 0.0},
           {0.0, 4.0 * l[1] - 1.0, 0.0},
           {0.0, 0.0, 4.0 * l[2] - 1.0},
           {4.0 * l[1], 4.0 * l[0], 0.0},
           {0.0, 4.0 * l[2], 4.0 * l[1]},
           {4.0 * l[2], 0.0, 4.0 * l[0]}}};
}

}  // namespace mcs
