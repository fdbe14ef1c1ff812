#include "mcshape/dofmap.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcs {

DofMap::DofMap(const Mesh& mesh, SpaceKind kind) : kind_(kind) {
  comps_ = (kind == SpaceKind::P1Vector || kind == SpaceKind::P2Vector) ? 2 : 1;
  const bool p2 = (kind == SpaceKind::P2Scalar || kind == SpaceKind::P2Vector);
  nodes_per_cell_ = p2 ? 6 : 3;
  n_vertices_ = mesh.n_vertices();

  if (p2) {
    for (const auto& t : mesh.triangles) {
      for (int e = 0; e < 3; ++e) {
        const int a = t[e], b = t[(e + 1) % 3];
        const auto key = std::minmax(a, b);
        if (!edge_ids_.count(key)) {
          edge_ids_[key] = static_cast<int>(edge_verts_.size());
          edge_verts_.push_back(key);
        }
      }
    }
  }
  n_nodes_ = n_vertices_ + static_cast<int>(edge_verts_.size());

  cell_nodes_.reserve(static_cast<size_t>(mesh.n_cells()) * nodes_per_cell_);
  for (const auto& t : mesh.triangles) {
    cell_nodes_.push_back(t[0]);
    cell_nodes_.push_back(t[1]);
    cell_nodes_.push_back(t[2]);
    if (p2) {
      cell_nodes_.push_back(n_vertices_ + edge_ids_.at(std::minmax(t[0], t[1])));
      cell_nodes_.push_back(n_vertices_ + edge_ids_.at(std::minmax(t[1], t[2])));
      cell_nodes_.push_back(n_vertices_ + edge_ids_.at(std::minmax(t[2], t[0])));
    }
  }

  for (const auto& f : mesh.boundary_facets) {
    auto& nodes = marker_nodes_[f.marker];
    nodes.push_back(f.v[0]);
    nodes.push_back(f.v[1]);
    if (p2) nodes.push_back(n_vertices_ + edge_ids_.at(std::minmax(f.v[0], f.v[1])));
  }
  for (auto& [marker, nodes] : marker_nodes_) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  }
}

const std::vector<int>& DofMap::marker_nodes(FacetMarker marker) const {
  static const std::vector<int> empty;
  auto it = marker_nodes_.find(marker);
  return it == marker_nodes_.end() ? empty : it->second;
}

std::vector<int> DofMap::facet_nodes(const BoundaryFacet& facet) const {
  std::vector<int> nodes{facet.v[0], facet.v[1]};
  if (nodes_per_cell_ == 6)
    nodes.push_back(n_vertices_ + edge_ids_.at(std::minmax(facet.v[0], facet.v[1])));
  return nodes;
}

Vec2 DofMap::node_position(const Mesh& mesh, int node) const {
  if (node < n_vertices_) return mesh.vertices[node];
  const auto& [a, b] = edge_verts_[node - n_vertices_];
  return 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
}

}  // namespace mcs
