#include <doctest.h>

#include <cmath>
#include <numeric>

#include "mcshape/assembly.hpp"
#include "mcshape/generator.hpp"
#include "mcshape/physics.hpp"

using namespace mcs;

namespace {

Mesh one_triangle() {
  Mesh mesh;
  mesh.height = 1.0;
  mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
  mesh.triangles = {{0, 1, 2}};
  mesh.cell_markers.resize(1);
  return mesh;
}

Mesh two_triangles() {
  Mesh mesh;
  mesh.height = 1.0;
  mesh.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
  mesh.cell_markers.resize(2);
  return mesh;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("dof counts") {
  CHECK(DofMap(one_triangle(), SpaceKind::P1Scalar).n_dofs() == 3);
  CHECK(DofMap(one_triangle(), SpaceKind::P2Vector).n_dofs() == 12);
  CHECK(DofMap(two_triangles(), SpaceKind::P2Scalar).n_dofs() == 9);  // 4 vertices + 5 edges
  CHECK(DofMap(two_triangles(), SpaceKind::P1Vector).n_dofs() == 8);
}

TEST_CASE("p1 mass matrix matches the exact element integrals") {
  Mesh mesh = one_triangle();
  mesh.vertices[1] = {2, 0};  // area = 1
  DofMap p1(mesh, SpaceKind::P1Scalar);
  const SparseSystem sys = assemble_p1_mass(mesh, p1);
  const double area = mesh.cell_area(0);
  Eigen::MatrixXd dense = Eigen::MatrixXd(sys.A);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(dense(i, j) == doctest::Approx(i == j ? area / 6.0 : area / 12.0).epsilon(1e-13));
}

TEST_CASE("p1 stiffness on the unit right triangle") {
  const Mesh mesh = one_triangle();
  DofMap p1(mesh, SpaceKind::P1Scalar);
  const SparseSystem sys = assemble_p1_stiffness(mesh, p1);
  Eigen::MatrixXd expected(3, 3);
  expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.A);
  CHECK((dense - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("zero coefficient field yields the zero matrix") {
  const Mesh mesh = two_triangles();
  DofMap p1(mesh, SpaceKind::P1Scalar);
  const std::vector<double> zeros(mesh.n_cells(), 0.0);
  const SparseSystem mass = assemble_p1_mass(mesh, p1, zeros);
  const SparseSystem stiff = assemble_p1_stiffness(mesh, p1, zeros);
  CHECK(Eigen::MatrixXd(mass.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK(Eigen::MatrixXd(stiff.A).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dirichlet application") {
  const Mesh mesh = two_triangles();
  DofMap p1(mesh, SpaceKind::P1Scalar);

  SUBCASE("all dofs pinned to zero solve to zero") {
    SparseSystem sys = assemble_p1_mass(mesh, p1);
    std::vector<int> dofs(p1.n_dofs());
    std::iota(dofs.begin(), dofs.end(), 0);
    const std::vector<double> vals(dofs.size(), 0.0);
    apply_dirichlet(sys, dofs, vals);
    CHECK(solve_direct(sys).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("one pinned dof attains its value exactly") {
    SparseSystem sys = assemble_p1_mass(mesh, p1);
    const std::vector<int> dofs{2};
    const std::vector<double> vals{5.0};
    apply_dirichlet(sys, dofs, vals);
    const Eigen::VectorXd x = solve_direct(sys);
    CHECK(x[2] == 5.0);
  }

  SUBCASE("empty constraint set leaves the system unchanged") {
    SparseSystem sys = assemble_p1_mass(mesh, p1);
    const Eigen::MatrixXd before = Eigen::MatrixXd(sys.A);
    apply_dirichlet(sys, std::vector<int>{}, std::vector<double>{});
    CHECK((Eigen::MatrixXd(sys.A) - before).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("out-of-range dof throws") {
    SparseSystem sys = assemble_p1_mass(mesh, p1);
    const std::vector<int> dofs{99};
    const std::vector<double> vals{0.0};
    CHECK_THROWS_AS(apply_dirichlet(sys, dofs, vals), std::runtime_error);
  }
}

TEST_CASE("direct solver") {
  SUBCASE("identity returns the rhs") {
    SystemBuilder builder(3);
    for (int i = 0; i < 3; ++i) builder.add(i, i, 1.0);
    SparseSystem sys = builder.build();
    sys.b << 3.0, -1.0, 2.5;
    const Eigen::VectorXd x = solve_direct(sys);
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(x[1] == doctest::Approx(-1.0));
    CHECK(x[2] == doctest::Approx(2.5));
  }

  SUBCASE("diagonal system") {
    SystemBuilder builder(2);
    builder.add(0, 0, 2.0);
    builder.add(1, 1, 4.0);
    SparseSystem sys = builder.build();
    sys.b << 2.0, 4.0;
    const Eigen::VectorXd x = solve_direct(sys);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(1.0));
  }

  SUBCASE("structurally singular matrix throws") {
    SystemBuilder builder(2);
    builder.add(0, 0, 1.0);  // row 1 left empty (zero diagonal only)
    SparseSystem sys = builder.build();
    sys.b << 1.0, 1.0;
    CHECK_THROWS_WITH_AS(solve_direct(sys), doctest::Contains("singular"), std::runtime_error);
  }
}

TEST_CASE("patch test: stiffness annihilates constants, mass totals the area") {
  GeneratorParams p;
  p.n_channels = 3;
  p.target_cell_size = 2e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);
  DofMap p1(mesh, SpaceKind::P1Scalar);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p1.n_dofs());

  const SparseSystem stiff = assemble_p1_stiffness(mesh, p1);
  const double stiff_scale = Eigen::MatrixXd(stiff.A).cwiseAbs().maxCoeff();
  CHECK((stiff.A * ones).cwiseAbs().maxCoeff() <= 1e-12 * stiff_scale);

  const SparseSystem mass = assemble_p1_mass(mesh, p1);
  double area = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) area += mesh.cell_area(c);
  CHECK(ones.dot(mass.A * ones) == doctest::Approx(area).epsilon(1e-12));
}

TEST_CASE("quadrature exactness") {
  SUBCASE("triangle rule integrates monomials to degree 4") {
    const auto& quad = TriQuadrature::degree4();
    for (int a = 0; a + 0 <= 4; ++a) {
      for (int b = 0; a + b <= 4; ++b) {
        double integral = 0.0;
        for (int q = 0; q < quad.n_points; ++q) {
          const double x = quad.bary[q][1];
          const double y = quad.bary[q][2];
          integral += quad.weights[q] * std::pow(x, a) * std::pow(y, b);
        }
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        CHECK(integral == doctest::Approx(exact).epsilon(1e-13));
      }
    }
  }

  SUBCASE("facet rule integrates to degree 5") {
    const auto& fq = FacetQuadrature::gauss3();
    for (int k = 0; k <= 5; ++k) {
      double integral = 0.0;
      for (int q = 0; q < fq.n_points; ++q)
        integral += fq.weights[q] * std::pow(fq.points[q], k);
      CHECK(integral == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
    }
  }

  SUBCASE("weights sum to the reference area") {
    const auto& quad = TriQuadrature::degree4();
    double sum = 0.0;
    for (double w : quad.weights) sum += w;
    CHECK(sum == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("assembly is deterministic") {
  GeneratorParams p;
  p.n_channels = 2;
  p.target_cell_size = 3e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);
  DofMap p1(mesh, SpaceKind::P1Scalar);
  const SparseSystem a = assemble_p1_stiffness(mesh, p1);
  const SparseSystem b = assemble_p1_stiffness(mesh, p1);
  REQUIRE(a.A.nonZeros() == b.A.nonZeros());
  for (int k = 0; k < a.A.nonZeros(); ++k) CHECK(a.A.valuePtr()[k] == b.A.valuePtr()[k]);
}

TEST_CASE("taylor-hood stokes block is nonsingular on generated meshes") {
  GeneratorParams p;
  p.n_channels = 2;
  p.target_cell_size = 2.5e-4;
  const Mesh mesh = generate_manifold(p, 3e-4);
  Spaces spaces(mesh);
  PhysicalParams params;
  CHECK_NOTHROW(build_stokes_operator(mesh, spaces, params, ModelKind::Full2D, nullptr));
}
