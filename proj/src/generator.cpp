#include "mcshape/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mcs {

void GeneratorParams::validate() const {
  if (n_channels < 1) throw std::runtime_error("generator: n_channels must be >= 1");
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::runtime_error(std::string("generator: ") + name + " must be > 0");
  };
  positive(channel_width, "channel_width");
  positive(channel_gap, "channel_gap");
  positive(channel_length, "channel_length");
  positive(inlet_manifold_depth, "inlet_manifold_depth");
  positive(outlet_manifold_depth, "outlet_manifold_depth");
  positive(inlet_width, "inlet_width");
  positive(outlet_width, "outlet_width");
  positive(target_cell_size, "target_cell_size");
  if (inlet_width > inlet_manifold_depth + 1e-12)
    throw std::runtime_error("generator: inlet_width exceeds inlet manifold depth");
  if (outlet_width > outlet_manifold_depth + 1e-12)
    throw std::runtime_error("generator: outlet_width exceeds outlet manifold depth");
}

namespace {

// Appends an even subdivision of (a, b] to pts (pts already ends with a).
void subdivide(std::vector<double>& pts, double a, double b, double target, bool force_even = false) {
  int n = std::max(1, static_cast<int>(std::lround((b - a) / target)));
  if (force_even && n % 2 != 0) ++n;
  for (int i = 1; i <= n; ++i) pts.push_back(a + (b - a) * i / n);
  pts.back() = b;
}

enum class ColKind { Gap, Channel };

}  // namespace

Mesh generate_manifold(const GeneratorParams& p, double height, ModelKind model) {
  p.validate();
  if (height <= 0.0) throw std::runtime_error("generator: height must be > 0");

  const double w = p.channel_width, g = p.channel_gap, L = p.channel_length;
  const double W = p.total_width();
  const double din = p.inlet_manifold_depth, dout = p.outlet_manifold_depth;
  const double yin0 = -0.5 * (din + p.inlet_width), yin1 = -0.5 * (din - p.inlet_width);
  const double yout0 = L + 0.5 * (dout - p.outlet_width), yout1 = L + 0.5 * (dout + p.outlet_width);
  const double tol = 1e-9 * std::max(W, din + L + dout);

  // x grid: alternating gap / channel bands. The outer gaps are split at
  // their midpoints, where the homogenized Darcy block ends (one pitch of
  // porous medium per channel).
  std::vector<double> xs{0.0};
  std::vector<std::pair<ColKind, int>> col_band;  // per x-interval
  double x = 0.0;
  for (int k = 0; k <= p.n_channels; ++k) {
    auto gap_piece = [&](double a, double b) {
      const size_t before = xs.size();
      subdivide(xs, a, b, p.target_cell_size);
      for (size_t i = before; i < xs.size(); ++i) col_band.push_back({ColKind::Gap, k});
    };
    if (k == 0) {
      gap_piece(x, x + 0.5 * g);
      gap_piece(x + 0.5 * g, x + g);
    } else if (k == p.n_channels) {
      gap_piece(x, x + 0.5 * g);
      gap_piece(x + 0.5 * g, x + g);
    } else {
      gap_piece(x, x + g);
    }
    x += g;
    if (k < p.n_channels) {
      const size_t b2 = xs.size();
      subdivide(xs, x, x + w, p.target_cell_size);
      for (size_t i = b2; i < xs.size(); ++i) col_band.push_back({ColKind::Channel, k});
      x += w;
    }
  }

  // y grid: inlet manifold (with inlet segment breakpoints), channel block
  // (even count so mid-length is a node row), outlet manifold.
  std::vector<double> ys{-din};
  std::vector<int> row_band;  // 0 inlet manifold, 1 block, 2 outlet manifold
  auto add_band = [&](double a, double b, int band, bool even = false) {
    if (b - a < tol) return;
    const size_t before = ys.size();
    subdivide(ys, a, b, p.target_cell_size, even);
    for (size_t i = before; i < ys.size(); ++i) row_band.push_back(band);
  };
  add_band(-din, yin0, 0);
  add_band(std::max(-din, yin0), yin1, 0);
  add_band(yin1, 0.0, 0);
  add_band(0.0, L, 1, /*even=*/true);
  add_band(L, yout0, 2);
  add_band(yout0, std::min(L + dout, yout1), 2);
  add_band(yout1, L + dout, 2);

  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());

  // Keep a rectangle unless it lies in a gap column of the channel block;
  // the Darcy block keeps everything between the outer gap midpoints.
  auto keep = [&](int i, int j) {
    if (row_band[j] != 1) return true;
    if (model == ModelKind::Darcy2D) {
      const double mid = 0.5 * (xs[i] + xs[i + 1]);
      return mid > 0.5 * g && mid < W - 0.5 * g;
    }
    return col_band[i].first == ColKind::Channel;
  };
  auto region_of = [&](int i, int j) -> RegionMarker {
    if (row_band[j] != 1) return {RegionKind::Fluid, -1};
    if (model == ModelKind::Darcy2D) return {RegionKind::Darcy, -1};
    return {RegionKind::Channel, col_band[i].second};
  };

  Mesh mesh;
  mesh.height = height;
  std::vector<int> vid(static_cast<size_t>(nx) * ny, -1);
  auto vertex = [&](int i, int j) {
    int& id = vid[static_cast<size_t>(j) * nx + i];
    if (id < 0) {
      id = mesh.n_vertices();
      mesh.vertices.emplace_back(xs[i], ys[j]);
    }
    return id;
  };

  for (int j = 0; j + 1 < ny; ++j) {
    for (int i = 0; i + 1 < nx; ++i) {
      if (!keep(i, j)) continue;
      const int v00 = vertex(i, j), v10 = vertex(i + 1, j);
      const int v11 = vertex(i + 1, j + 1), v01 = vertex(i, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
      mesh.cell_markers.push_back(region_of(i, j));
      mesh.cell_markers.push_back(region_of(i, j));
    }
  }

  // Boundary facets: directed edges without a twin.
  std::map<std::pair<int, int>, int> directed;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    for (int e = 0; e < 3; ++e) directed[{t[e], t[(e + 1) % 3]}] = c;
  }
  for (const auto& [edge, cell] : directed) {
    if (directed.count({edge.second, edge.first})) continue;
    const Vec2 mid = 0.5 * (mesh.vertices[edge.first] + mesh.vertices[edge.second]);
    FacetMarker marker = FacetMarker::Wall;
    const bool in_block = mid.y() > tol && mid.y() < L - tol;
    if (std::abs(mid.x()) < tol) {
      if (in_block)
        marker = FacetMarker::ChannelWall;  // darcy only: left edge of the block
      else if (mid.y() > yin0 - tol && mid.y() < yin1 + tol)
        marker = FacetMarker::Inlet;
    } else if (std::abs(mid.x() - W) < tol) {
      if (in_block)
        marker = FacetMarker::ChannelWall;
      else if (mid.y() > yout0 - tol && mid.y() < yout1 + tol)
        marker = FacetMarker::Outlet;
    } else if (in_block) {
      marker = FacetMarker::ChannelWall;  // full2d channel side walls
    }
    mesh.boundary_facets.push_back({{edge.first, edge.second}, marker, cell});
  }

  validate_mesh(mesh);
  return mesh;
}

Mesh generate_rectangle(int nx, int ny, double width, double depth, double height) {
  if (nx < 1 || ny < 1) throw std::runtime_error("generate_rectangle: need nx, ny >= 1");
  Mesh mesh;
  mesh.height = height;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.vertices.emplace_back(width * i / nx, depth * j / ny);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      mesh.cell_markers.push_back({RegionKind::Fluid, -1});
      mesh.cell_markers.push_back({RegionKind::Fluid, -1});
    }
  }
  std::map<std::pair<int, int>, int> directed;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    for (int e = 0; e < 3; ++e) directed[{t[e], t[(e + 1) % 3]}] = c;
  }
  const double tol = 1e-12 * std::max(width, depth);
  for (const auto& [edge, cell] : directed) {
    if (directed.count({edge.second, edge.first})) continue;
    const Vec2 mid = 0.5 * (mesh.vertices[edge.first] + mesh.vertices[edge.second]);
    FacetMarker marker = FacetMarker::Wall;
    if (std::abs(mid.x()) < tol) marker = FacetMarker::Inlet;
    if (std::abs(mid.x() - width) < tol) marker = FacetMarker::Outlet;
    mesh.boundary_facets.push_back({{edge.first, edge.second}, marker, cell});
  }
  validate_mesh(mesh);
  return mesh;
}

}  // namespace mcs
