#pragma once

#include <map>
#include <span>
#include <vector>

#include "mcshape/mesh.hpp"

namespace mcs {

enum class SpaceKind { P1Scalar, P1Vector, P2Scalar, P2Vector };

/// Global numbering for a Lagrange space on the mesh. Scalar nodes are the
/// vertices, plus one mid-edge node per edge for P2; vector spaces interleave
/// components per node (dof = node*2 + comp).
class DofMap {
 public:
  DofMap(const Mesh& mesh, SpaceKind kind);

  SpaceKind kind() const { return kind_; }
  int components() const { return comps_; }
  int n_nodes() const { return n_nodes_; }
  int n_dofs() const { return n_nodes_ * comps_; }
  int nodes_per_cell() const { return nodes_per_cell_; }

  std::span<const int> cell_nodes(int cell) const {
    return {cell_nodes_.data() + static_cast<size_t>(cell) * nodes_per_cell_,
            static_cast<size_t>(nodes_per_cell_)};
  }
  int dof(int node, int comp = 0) const { return node * comps_ + comp; }

  /// Scalar nodes lying on facets with the given marker (sorted, unique).
  const std::vector<int>& marker_nodes(FacetMarker marker) const;

  /// Scalar nodes on one facet: endpoints, plus the mid-edge node for P2.
  std::vector<int> facet_nodes(const BoundaryFacet& facet) const;

  /// Coordinates of a scalar node (vertex or edge midpoint).
  Vec2 node_position(const Mesh& mesh, int node) const;

 private:
  SpaceKind kind_;
  int comps_;
  int nodes_per_cell_;
  int n_nodes_;
  int n_vertices_;
  std::vector<int> cell_nodes_;
  std::map<std::pair<int, int>, int> edge_ids_;
  std::map<FacetMarker, std::vector<int>> marker_nodes_;
  std::vector<std::pair<int, int>> edge_verts_;
};

}  // namespace mcs
