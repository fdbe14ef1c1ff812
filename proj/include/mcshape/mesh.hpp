#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mcs {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Boundary classification. Numeric values equal the MSH physical tags.
/// ChannelWall marks the microchannel side walls on full-2D meshes and the
/// outer boundary of the porous block on Darcy meshes.
enum class FacetMarker : int {
  Inlet = 1,
  Outlet = 2,
  Wall = 3,
  ChannelWall = 4,
};

enum class RegionKind : std::uint8_t { Fluid, Channel, Darcy };

/// Per-cell region tag; Channel cells carry a 0-based channel index.
struct RegionMarker {
  RegionKind kind = RegionKind::Fluid;
  int channel = -1;

  bool operator==(const RegionMarker&) const = default;
};

/// Oriented boundary edge. Endpoints follow the owning triangle's CCW
/// traversal, so the outward normal is the tangent rotated by -90 degrees.
struct BoundaryFacet {
  std::array<int, 2> v{};
  FacetMarker marker = FacetMarker::Wall;
  int cell = -1;
};

/// P1 vector field on mesh vertices, packed as [x0, y0, x1, y1, ...].
struct VectorFieldP1 {
  Eigen::VectorXd values;

  static VectorFieldP1 zero(int n_vertices) {
    return {Eigen::VectorXd::Zero(2 * n_vertices)};
  }
  int n_vertices() const { return static_cast<int>(values.size()) / 2; }
  Vec2 at(int v) const { return {values[2 * v], values[2 * v + 1]}; }
  void set(int v, const Vec2& val) {
    values[2 * v] = val.x();
    values[2 * v + 1] = val.y();
  }
};

/// Triangulation of the 2D cooler domain with boundary and region markers.
/// `height` is the out-of-plane thickness h of the extruded geometry.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryFacet> boundary_facets;
  std::vector<RegionMarker> cell_markers;
  double height = 0.0;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_cells() const { return static_cast<int>(triangles.size()); }

  double cell_area(int cell) const;
  Vec2 cell_centroid(int cell) const;
  double diameter() const;
  int n_channels() const;
};

double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c);

/// Throws std::runtime_error describing the first violated mesh invariant.
void validate_mesh(const Mesh& mesh);

/// Element-wise Jacobian of a P1 vector field on the given cell.
Mat2 p1_jacobian(const Mesh& mesh, int cell, const VectorFieldP1& v);

/// Perturbation of identity: vertices move to x + t*v(x); connectivity and
/// markers are untouched. Throws if a triangle inverts.
Mesh deform(const Mesh& mesh, const VectorFieldP1& v, double t);

/// Per-element gate conditions: 1/2 <= det(I + t Dv) <= 2 and
/// t*||Dv||_F <= 0.3.
bool quality_det_ok(const Mat2& dv, double t);
bool quality_frobenius_ok(const Mat2& dv, double t);

/// Step-size gate: true iff both element conditions hold on every cell.
bool quality_check(const Mesh& mesh, const VectorFieldP1& v, double t);

/// Length and outward unit normal of a boundary facet.
std::pair<double, Vec2> facet_geometry(const Mesh& mesh, const BoundaryFacet& facet);

/// Relative stiffness per cell: max cell area over the cell's area.
std::vector<double> relative_stiffness(const Mesh& mesh);

}  // namespace mcs
