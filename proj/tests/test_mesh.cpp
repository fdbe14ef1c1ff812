#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mcshape/generator.hpp"
#include "mcshape/msh_io.hpp"
#include "mcshape/vtk_io.hpp"

using namespace mcs;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

const char* kTriangleFixture = R"($MeshFormat
2.2 0 8
$EndMeshFormat
$Nodes
3
1 0 0 0
2 1 0 0
3 0 1 0
$EndNodes
$Elements
4
1 2 2 10 1 1 2 3
2 1 2 1 1 1 2
3 1 2 2 1 2 3
4 1 2 3 1 3 1
$EndElements
)";

Mesh unit_square() { return generate_rectangle(1, 1, 1.0, 1.0, 1.0); }

}  // namespace

TEST_CASE("load_msh reads the one-triangle fixture") {
  const auto path = write_temp("tri.msh", kTriangleFixture);
  const Mesh mesh = load_msh(path, 3e-4);
  CHECK(mesh.n_vertices() == 3);
  CHECK(mesh.n_cells() == 1);
  CHECK(mesh.boundary_facets.size() == 3);
  CHECK(mesh.height == 3e-4);
  CHECK(mesh.cell_area(0) == doctest::Approx(0.5));
}

TEST_CASE("load_msh repairs clockwise triangles") {
  std::string fixture = kTriangleFixture;
  const auto pos = fixture.find("1 1 2 3");
  fixture.replace(pos, 7, "1 1 3 2");
  const auto path = write_temp("tri_cw.msh", fixture);
  const Mesh mesh = load_msh(path, 3e-4);
  CHECK(mesh.cell_area(0) > 0.0);
}

TEST_CASE("load_msh rejects a dangling facet") {
  std::string fixture = kTriangleFixture;
  const auto pos = fixture.find("2 1 2 1 1 1 2");
  fixture.replace(pos, 13, "2 1 2 1 1 1 9");
  const auto path = write_temp("tri_dangling.msh", fixture);
  CHECK_THROWS_WITH_AS(load_msh(path, 3e-4), doctest::Contains("dangling"), std::runtime_error);
}

TEST_CASE("load_msh rejects unknown boundary tags") {
  std::string fixture = kTriangleFixture;
  const auto pos = fixture.find("2 1 2 1 1 1 2");
  fixture.replace(pos, 13, "2 1 2 7 1 1 2");
  const auto path = write_temp("tri_badtag.msh", fixture);
  CHECK_THROWS_WITH_AS(load_msh(path, 3e-4), doctest::Contains("unknown boundary tag"),
                       std::runtime_error);
}

TEST_CASE("generator produces the expected regions and markers") {
  GeneratorParams p;
  p.n_channels = 1;
  p.channel_width = 5e-4;
  p.channel_gap = 3e-4;
  p.channel_length = 1e-3;
  p.inlet_manifold_depth = 1e-3;
  p.outlet_manifold_depth = 1e-3;
  p.inlet_width = 6e-4;
  p.outlet_width = 6e-4;
  p.target_cell_size = 2e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);
  CHECK(mesh.n_channels() == 1);
  bool fluid = false, channel = false;
  for (const auto& m : mesh.cell_markers) {
    fluid |= m.kind == RegionKind::Fluid;
    channel |= m.kind == RegionKind::Channel;
  }
  CHECK(fluid);
  CHECK(channel);
  std::set<FacetMarker> markers;
  for (const auto& f : mesh.boundary_facets) markers.insert(f.marker);
  CHECK(markers.size() == 4);
}

TEST_CASE("generator indexes eight channels") {
  GeneratorParams p;
  p.target_cell_size = 5e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);
  CHECK(mesh.n_channels() == 8);
  std::set<int> indices;
  for (const auto& m : mesh.cell_markers)
    if (m.kind == RegionKind::Channel) indices.insert(m.channel);
  CHECK(indices.size() == 8);
  CHECK(*indices.begin() == 0);
  CHECK(*indices.rbegin() == 7);
}

TEST_CASE("generator rejects a zero channel gap") {
  GeneratorParams p;
  p.channel_gap = 0.0;
  CHECK_THROWS_AS(generate_manifold(p, 3e-4), std::runtime_error);
}

TEST_CASE("darcy mesh has one pitch-per-channel block") {
  GeneratorParams p;
  p.target_cell_size = 5e-4;
  const Mesh mesh = generate_manifold(p, 3e-4, ModelKind::Darcy2D);
  double xlo = 1e300, xhi = -1e300;
  int darcy_cells = 0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_markers[c].kind != RegionKind::Darcy) continue;
    ++darcy_cells;
    for (int v : mesh.triangles[c]) {
      xlo = std::min(xlo, mesh.vertices[v].x());
      xhi = std::max(xhi, mesh.vertices[v].x());
    }
  }
  CHECK(darcy_cells > 0);
  CHECK(xlo == doctest::Approx(0.5 * p.channel_gap));
  CHECK(xhi == doctest::Approx(p.total_width() - 0.5 * p.channel_gap));
  CHECK(xhi - xlo ==
        doctest::Approx(p.n_channels * (p.channel_width + p.channel_gap)).epsilon(1e-12));
  for (const auto& f : mesh.boundary_facets) {
    if (f.marker != FacetMarker::ChannelWall) continue;
    auto [len, normal] = facet_geometry(mesh, f);
    CHECK(std::abs(normal.x()) == doctest::Approx(1.0));
  }
}

TEST_CASE("deform translates, is exact at t=0, and scales areas") {
  GeneratorParams p;
  p.n_channels = 2;
  p.channel_width = 5e-4;
  p.channel_gap = 3e-4;
  p.channel_length = 1e-3;
  p.inlet_manifold_depth = 1e-3;
  p.outlet_manifold_depth = 1e-3;
  p.inlet_width = 6e-4;
  p.outlet_width = 6e-4;
  p.target_cell_size = 3e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);

  SUBCASE("rigid translation") {
    VectorFieldP1 v = VectorFieldP1::zero(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i) v.set(i, {1.0, 0.0});
    const Mesh moved = deform(mesh, v, 1.0);
    for (int i = 0; i < mesh.n_vertices(); ++i) {
      CHECK(moved.vertices[i].x() == mesh.vertices[i].x() + 1.0);
      CHECK(moved.vertices[i].y() == mesh.vertices[i].y());
    }
    for (int c = 0; c < mesh.n_cells(); ++c)
      CHECK(moved.cell_area(c) == doctest::Approx(mesh.cell_area(c)).epsilon(1e-13));
  }

  SUBCASE("zero field is bitwise identity") {
    const VectorFieldP1 v = VectorFieldP1::zero(mesh.n_vertices());
    const Mesh same = deform(mesh, v, 0.7);
    for (int i = 0; i < mesh.n_vertices(); ++i) {
      CHECK(same.vertices[i].x() == mesh.vertices[i].x());
      CHECK(same.vertices[i].y() == mesh.vertices[i].y());
    }
  }

  SUBCASE("affine scaling multiplies areas by the determinant") {
    const Mesh square = unit_square();
    VectorFieldP1 v = VectorFieldP1::zero(square.n_vertices());
    for (int i = 0; i < square.n_vertices(); ++i) v.set(i, square.vertices[i]);
    const Mesh scaled = deform(square, v, 0.1);
    for (int i = 0; i < square.n_vertices(); ++i) {
      CHECK(scaled.vertices[i].x() == doctest::Approx(1.1 * square.vertices[i].x()));
      CHECK(scaled.vertices[i].y() == doctest::Approx(1.1 * square.vertices[i].y()));
    }
    for (int c = 0; c < square.n_cells(); ++c)
      CHECK(scaled.cell_area(c) == doctest::Approx(1.21 * square.cell_area(c)).epsilon(1e-13));
  }
}

TEST_CASE("quality gate equations at their exact boundaries") {
  SUBCASE("zero field always passes") {
    const Mesh mesh = unit_square();
    const VectorFieldP1 v = VectorFieldP1::zero(mesh.n_vertices());
    CHECK(quality_check(mesh, v, 123.0));
  }

  SUBCASE("frobenius bound at 0.3 exactly") {
    Mat2 dv = Mat2::Zero();
    dv(0, 0) = 1.0;  // ||Dv||_F = 1
    CHECK(quality_frobenius_ok(dv, 0.3));
    CHECK_FALSE(quality_frobenius_ok(dv, std::nextafter(0.3, 1.0)));
    CHECK_FALSE(quality_frobenius_ok(dv, 0.5));  // v=(x,0), t=0.5
  }

  SUBCASE("determinant bounds at 1/2 and 2 exactly") {
    Mat2 dv = Mat2::Zero();
    dv(0, 0) = 1.0;
    CHECK(quality_det_ok(dv, 1.0));  // det = 2 exactly
    CHECK_FALSE(quality_det_ok(dv, 1.0 + 1e-12));
    CHECK(quality_det_ok(dv, -0.5));  // det = 1/2 exactly
    CHECK_FALSE(quality_det_ok(dv, -0.5 - 1e-12));
  }

  SUBCASE("uniform shrink fails the determinant bound") {
    const Mesh mesh = unit_square();
    VectorFieldP1 v = VectorFieldP1::zero(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i) v.set(i, -mesh.vertices[i]);
    // det(I + 0.6 Dv) = 0.4^2 = 0.16 < 1/2
    CHECK_FALSE(quality_check(mesh, v, 0.6));
  }
}

TEST_CASE("determinant equals the deformed/original area ratio") {
  GeneratorParams p;
  p.n_channels = 2;
  p.channel_width = 5e-4;
  p.channel_gap = 3e-4;
  p.channel_length = 1e-3;
  p.inlet_manifold_depth = 1e-3;
  p.outlet_manifold_depth = 1e-3;
  p.inlet_width = 6e-4;
  p.outlet_width = 6e-4;
  p.target_cell_size = 3e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  VectorFieldP1 v = VectorFieldP1::zero(mesh.n_vertices());
  for (int i = 0; i < mesh.n_vertices(); ++i)
    v.set(i, 1e-4 * Vec2(unit(rng), unit(rng)));
  double t = 0.5;
  while (!quality_check(mesh, v, t)) t *= 0.5;
  const Mesh moved = deform(mesh, v, t);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double det = (Mat2::Identity() + t * p1_jacobian(mesh, c, v)).determinant();
    CHECK(det == doctest::Approx(moved.cell_area(c) / mesh.cell_area(c)).epsilon(1e-12));
  }
}

TEST_CASE("facet geometry of the unit square") {
  const Mesh mesh = unit_square();
  int checked = 0;
  for (const auto& f : mesh.boundary_facets) {
    auto [len, normal] = facet_geometry(mesh, f);
    CHECK(normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const Vec2 mid = 0.5 * (mesh.vertices[f.v[0]] + mesh.vertices[f.v[1]]);
    if (mid.y() == 0.0) {
      CHECK(normal.x() == doctest::Approx(0.0));
      CHECK(normal.y() == doctest::Approx(-1.0));
      CHECK(len == doctest::Approx(1.0));
      ++checked;
    }
    if (mid.x() == 1.0) {
      CHECK(normal.x() == doctest::Approx(1.0));
      CHECK(normal.y() == doctest::Approx(0.0));
      ++checked;
    }
  }
  CHECK(checked == 2);
}

TEST_CASE("relative stiffness") {
  SUBCASE("uniform mesh gives identically one") {
    const Mesh mesh = generate_rectangle(4, 4, 1.0, 1.0, 1.0);
    for (double nu : relative_stiffness(mesh)) CHECK(nu == doctest::Approx(1.0).epsilon(1e-13));
  }

  SUBCASE("areas 1 and 1/4 give stiffness 1 and 4") {
    Mesh mesh;
    mesh.height = 1.0;
    mesh.vertices = {{0, 0}, {1, 0}, {0, 2}, {1, 0.5}};
    mesh.triangles = {{0, 1, 2}, {1, 3, 2}};
    mesh.cell_markers.resize(2);
    const auto nu = relative_stiffness(mesh);
    CHECK(nu[0] == doctest::Approx(1.0));
    CHECK(nu[1] == doctest::Approx(4.0));
  }

  SUBCASE("single cell") {
    Mesh mesh;
    mesh.height = 1.0;
    mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
    mesh.triangles = {{0, 1, 2}};
    mesh.cell_markers.resize(1);
    const auto nu = relative_stiffness(mesh);
    REQUIRE(nu.size() == 1);
    CHECK(nu[0] == doctest::Approx(1.0));
  }

  SUBCASE("invariant under rigid motions") {
    GeneratorParams p;
    p.n_channels = 2;
    p.target_cell_size = 3e-4;
    const Mesh mesh = generate_manifold(p, 3e-4);
    Mesh rotated = mesh;
    const double c = std::cos(0.7), s = std::sin(0.7);
    for (auto& vert : rotated.vertices)
      vert = Vec2(c * vert.x() - s * vert.y(), s * vert.x() + c * vert.y() + 0.3);
    const auto nu0 = relative_stiffness(mesh);
    const auto nu1 = relative_stiffness(rotated);
    for (int i = 0; i < mesh.n_cells(); ++i)
      CHECK(nu0[i] == doctest::Approx(nu1[i]).epsilon(1e-12));
  }
}

TEST_CASE("quality acceptance implies deform succeeds") {
  GeneratorParams p;
  p.n_channels = 2;
  p.channel_width = 5e-4;
  p.channel_gap = 3e-4;
  p.channel_length = 1e-3;
  p.inlet_manifold_depth = 1e-3;
  p.outlet_manifold_depth = 1e-3;
  p.inlet_width = 6e-4;
  p.outlet_width = 6e-4;
  p.target_cell_size = 3e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    VectorFieldP1 v = VectorFieldP1::zero(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i)
      v.set(i, 5e-4 * Vec2(unit(rng), unit(rng)));
    double t = 1.0;
    while (!quality_check(mesh, v, t)) t *= 0.5;
    CHECK_NOTHROW(deform(mesh, v, t));
  }
}

TEST_CASE("msh to vtk round-trips vertex coordinates") {
  const auto msh = write_temp("tri_roundtrip.msh", kTriangleFixture);
  const Mesh mesh = load_msh(msh, 3e-4);
  const auto vtk = std::filesystem::temp_directory_path() / "tri_roundtrip.vtk";
  write_vtk(vtk.string(), mesh);

  std::ifstream in(vtk);
  REQUIRE(in);
  std::string line;
  int n_points = 0;
  while (std::getline(in, line))
    if (line.rfind("POINTS", 0) == 0) {
      std::istringstream ls(line);
      std::string word;
      ls >> word >> n_points;
      break;
    }
  REQUIRE(n_points == mesh.n_vertices());
  for (int i = 0; i < n_points; ++i) {
    double x, y, z;
    in >> x >> y >> z;
    CHECK(std::abs(x - mesh.vertices[i].x()) <= 1e-12);
    CHECK(std::abs(y - mesh.vertices[i].y()) <= 1e-12);
  }
}
