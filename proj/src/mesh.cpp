#include "mcshape/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mcs {

double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

double Mesh::cell_area(int cell) const {
  const auto& t = triangles[cell];
  return triangle_signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
}

Vec2 Mesh::cell_centroid(int cell) const {
  const auto& t = triangles[cell];
  return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

double Mesh::diameter() const {
  Vec2 lo = vertices.front(), hi = vertices.front();
  for (const auto& p : vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

int Mesh::n_channels() const {
  int n = 0;
  for (const auto& m : cell_markers)
    if (m.kind == RegionKind::Channel) n = std::max(n, m.channel + 1);
  return n;
}

namespace {

// Key for an undirected edge.
std::pair<int, int> edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

void validate_mesh(const Mesh& mesh) {
  const int nv = mesh.n_vertices();
  const int nc = mesh.n_cells();
  if (nc == 0) throw std::runtime_error("mesh: no cells");
  if (mesh.height <= 0.0) throw std::runtime_error("mesh: height must be positive");
  if (static_cast<int>(mesh.cell_markers.size()) != nc)
    throw std::runtime_error("mesh: cell marker count mismatch");

  for (int c = 0; c < nc; ++c) {
    for (int k : mesh.triangles[c])
      if (k < 0 || k >= nv) throw std::runtime_error("mesh: triangle vertex out of range");
    if (mesh.cell_area(c) <= 0.0)
      throw std::runtime_error("mesh: non-positive triangle area at cell " + std::to_string(c));
  }

  // Undirected edge -> adjacent cell count.
  std::map<std::pair<int, int>, int> edge_count;
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.triangles[c];
    for (int e = 0; e < 3; ++e) edge_count[edge_key(t[e], t[(e + 1) % 3])]++;
  }
  for (const auto& [key, count] : edge_count)
    if (count > 2) throw std::runtime_error("mesh: non-manifold edge");

  std::map<std::pair<int, int>, int> facet_seen;
  for (const auto& f : mesh.boundary_facets) {
    if (f.v[0] < 0 || f.v[0] >= nv || f.v[1] < 0 || f.v[1] >= nv)
      throw std::runtime_error("mesh: dangling facet (vertex out of range)");
    auto it = edge_count.find(edge_key(f.v[0], f.v[1]));
    if (it == edge_count.end())
      throw std::runtime_error("mesh: dangling facet (not a triangle edge)");
    if (it->second != 1)
      throw std::runtime_error("mesh: boundary facet on an interior edge");
    if (++facet_seen[edge_key(f.v[0], f.v[1])] > 1)
      throw std::runtime_error("mesh: duplicate boundary facet");
    if (f.cell < 0 || f.cell >= nc) throw std::runtime_error("mesh: facet owner out of range");
  }
  for (const auto& [key, count] : edge_count)
    if (count == 1 && !facet_seen.count(key))
      throw std::runtime_error("mesh: unmarked boundary edge");

  // Channel indices contiguous from 0.
  std::vector<char> present;
  for (const auto& m : mesh.cell_markers) {
    if (m.kind == RegionKind::Channel) {
      if (m.channel < 0) throw std::runtime_error("mesh: negative channel index");
      if (m.channel >= static_cast<int>(present.size())) present.resize(m.channel + 1, 0);
      present[m.channel] = 1;
    }
  }
  for (char p : present)
    if (!p) throw std::runtime_error("mesh: channel indices not contiguous");
}

Mat2 p1_jacobian(const Mesh& mesh, int cell, const VectorFieldP1& v) {
  const auto& t = mesh.triangles[cell];
  const Vec2& x0 = mesh.vertices[t[0]];
  const Vec2& x1 = mesh.vertices[t[1]];
  const Vec2& x2 = mesh.vertices[t[2]];
  const double det = 2.0 * triangle_signed_area(x0, x1, x2);
  // Gradients of the barycentric basis functions.
  const Vec2 g0 = Vec2(x1.y() - x2.y(), x2.x() - x1.x()) / det;
  const Vec2 g1 = Vec2(x2.y() - x0.y(), x0.x() - x2.x()) / det;
  const Vec2 g2 = Vec2(x0.y() - x1.y(), x1.x() - x0.x()) / det;
  Mat2 jac = v.at(t[0]) * g0.transpose();
  jac += v.at(t[1]) * g1.transpose();
  jac += v.at(t[2]) * g2.transpose();
  return jac;
}

Mesh deform(const Mesh& mesh, const VectorFieldP1& v, double t) {
  if (v.n_vertices() != mesh.n_vertices())
    throw std::runtime_error("deform: field size does not match vertex count");
  Mesh out = mesh;
  for (int i = 0; i < mesh.n_vertices(); ++i) out.vertices[i] = mesh.vertices[i] + t * v.at(i);
  for (int c = 0; c < out.n_cells(); ++c)
    if (out.cell_area(c) <= 0.0)
      throw std::runtime_error("deform: inverted triangle at cell " + std::to_string(c) +
                               " (quality gate bypassed)");
  return out;
}

bool quality_det_ok(const Mat2& dv, double t) {
  const double det = (Mat2::Identity() + t * dv).determinant();
  return det >= 0.5 && det <= 2.0;
}

bool quality_frobenius_ok(const Mat2& dv, double t) {
  return std::abs(t) * dv.norm() <= 0.3;
}

bool quality_check(const Mesh& mesh, const VectorFieldP1& v, double t) {
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Mat2 dv = p1_jacobian(mesh, c, v);
    if (!quality_det_ok(dv, t) || !quality_frobenius_ok(dv, t)) return false;
  }
  return true;
}

std::pair<double, Vec2> facet_geometry(const Mesh& mesh, const BoundaryFacet& facet) {
  const Vec2& a = mesh.vertices[facet.v[0]];
  const Vec2& b = mesh.vertices[facet.v[1]];
  const Vec2 d = b - a;
  const double len = d.norm();
  if (!(len > 0.0)) throw std::runtime_error("facet_geometry: zero-length facet");
  // CCW-oriented boundary: outward normal is the tangent rotated by -90 deg.
  return {len, Vec2(d.y() / len, -d.x() / len)};
}

std::vector<double> relative_stiffness(const Mesh& mesh) {
  if (mesh.n_cells() < 1) throw std::runtime_error("relative_stiffness: empty mesh");
  std::vector<double> area(mesh.n_cells());
  double max_area = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    area[c] = mesh.cell_area(c);
    max_area = std::max(max_area, area[c]);
  }
  std::vector<double> nu(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) nu[c] = max_area / area[c];
  return nu;
}

}  // namespace mcs
