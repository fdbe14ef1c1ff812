#include "mcshape/msh_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mcs {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error("load_msh: " + path + ": " + what);
}

struct RawFacet {
  int a, b, tag;
};
struct RawTri {
  std::array<int, 3> v;
  int tag;
};

}  // namespace

Mesh load_msh(const std::string& path, double height, ModelKind model) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");

  std::string line;
  std::vector<Vec2> nodes;
  std::unordered_map<long, int> node_id;  // file id -> index
  std::vector<RawFacet> facets;
  std::vector<RawTri> tris;
  bool saw_format = false;

  while (std::getline(in, line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      if (!std::getline(in, line)) fail(path, "truncated $MeshFormat");
      std::istringstream fs(line);
      double version = 0.0;
      int file_type = -1, data_size = 0;
      fs >> version >> file_type >> data_size;
      if (!fs || version < 2.0 || version >= 3.0 || file_type != 0)
        fail(path, "unsupported mesh format (need 2.2 ASCII)");
      saw_format = true;
      std::getline(in, line);  // $EndMeshFormat
    } else if (line.rfind("$Nodes", 0) == 0) {
      if (!std::getline(in, line)) fail(path, "truncated $Nodes");
      const long count = std::stol(line);
      nodes.reserve(count);
      for (long i = 0; i < count; ++i) {
        if (!std::getline(in, line)) fail(path, "truncated node list");
        std::istringstream ns(line);
        long id;
        double x, y, z;
        if (!(ns >> id >> x >> y >> z)) fail(path, "malformed node line");
        node_id[id] = static_cast<int>(nodes.size());
        nodes.emplace_back(x, y);
      }
    } else if (line.rfind("$Elements", 0) == 0) {
      if (!std::getline(in, line)) fail(path, "truncated $Elements");
      const long count = std::stol(line);
      for (long i = 0; i < count; ++i) {
        if (!std::getline(in, line)) fail(path, "truncated element list");
        std::istringstream es(line);
        long id;
        int type, ntags;
        if (!(es >> id >> type >> ntags)) fail(path, "malformed element line");
        int physical = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag;
          if (!(es >> tag)) fail(path, "malformed element tags");
          if (t == 0) physical = tag;
        }
        auto resolve = [&](long nid) {
          auto it = node_id.find(nid);
          if (it == node_id.end()) fail(path, "dangling facet or element (unknown node)");
          return it->second;
        };
        if (type == 1) {
          long a, b;
          if (!(es >> a >> b)) fail(path, "malformed line element");
          facets.push_back({resolve(a), resolve(b), physical});
        } else if (type == 2) {
          long a, b, c;
          if (!(es >> a >> b >> c)) fail(path, "malformed triangle element");
          tris.push_back({{resolve(a), resolve(b), resolve(c)}, physical});
        } else if (type == 15) {
          // point elements: ignore
        } else {
          fail(path, "unsupported element type " + std::to_string(type));
        }
      }
    }
    // other sections ($PhysicalNames, ...) skipped
  }
  if (!saw_format) fail(path, "missing $MeshFormat");
  if (tris.empty()) fail(path, "no triangles");

  // Drop nodes not referenced by any triangle.
  std::vector<int> remap(nodes.size(), -1);
  Mesh mesh;
  mesh.height = height;
  for (const auto& t : tris)
    for (int v : t.v)
      if (remap[v] < 0) {
        remap[v] = mesh.n_vertices();
        mesh.vertices.push_back(nodes[v]);
      }

  for (const auto& t : tris) {
    std::array<int, 3> v{remap[t.v[0]], remap[t.v[1]], remap[t.v[2]]};
    const double area = triangle_signed_area(mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]]);
    if (area == 0.0) fail(path, "degenerate (zero-area) triangle");
    if (area < 0.0) std::swap(v[1], v[2]);  // orientation repair
    mesh.triangles.push_back(v);

    RegionMarker marker;
    if (t.tag == 10) {
      marker = {RegionKind::Fluid, -1};
    } else if (t.tag >= 11) {
      if (model == ModelKind::Darcy2D) {
        if (t.tag != 11) fail(path, "unknown surface tag " + std::to_string(t.tag) + " for darcy2d");
        marker = {RegionKind::Darcy, -1};
      } else {
        marker = {RegionKind::Channel, t.tag - 11};
      }
    } else {
      fail(path, "unknown surface tag " + std::to_string(t.tag));
    }
    mesh.cell_markers.push_back(marker);
  }

  // Directed boundary edge (as traversed CCW by its owning cell) -> cell.
  std::map<std::pair<int, int>, int> directed_owner;
  std::map<std::pair<int, int>, int> undirected_count;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      directed_owner[{a, b}] = c;
      undirected_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }

  for (const auto& f : facets) {
    const int a = remap[f.a], b = remap[f.b];
    if (a < 0 || b < 0) fail(path, "dangling facet (node not in any triangle)");
    if (f.tag < 1 || f.tag > 4) fail(path, "unknown boundary tag " + std::to_string(f.tag));
    auto uc = undirected_count.find({std::min(a, b), std::max(a, b)});
    if (uc == undirected_count.end()) fail(path, "dangling facet (not an edge of any triangle)");
    if (uc->second != 1) fail(path, "boundary facet on an interior edge");
    BoundaryFacet bf;
    bf.marker = static_cast<FacetMarker>(f.tag);
    if (auto it = directed_owner.find({a, b}); it != directed_owner.end()) {
      bf.v = {a, b};
      bf.cell = it->second;
    } else {
      bf.v = {b, a};
      bf.cell = directed_owner.at({b, a});
    }
    mesh.boundary_facets.push_back(bf);
  }

  validate_mesh(mesh);
  return mesh;
}

}  // namespace mcs
