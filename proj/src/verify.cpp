#include "mcshape/verify.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace mcs {

namespace {

constexpr double kPi = 3.14159265358979323846;

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  // least-squares slope of log(y) against log(x)
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double reduced_cost(const Mesh& mesh, const PhysicalParams& params, ModelKind model,
                    const DarcyParams* darcy, const SupgConfig& supg, const CostConfig& cfg) {
  Spaces spaces(mesh);
  const StateSolution state = solve_state(mesh, spaces, params, model, darcy, supg);
  return cost(mesh, spaces, state, cfg, params, model, darcy).J;
}

}  // namespace

ConvergenceResult manufactured_convergence(const std::vector<int>& resolutions) {
  PhysicalParams params;
  params.mu = 1e-2;
  params.rho = 1.0;
  params.kappa = 1.0;
  params.cp = 1.0;
  params.m_in = 1.0;  // unused, all-Dirichlet data
  params.T_in = 0.0;
  params.T_wall = 1.0;
  params.alpha = 1.0;
  params.height = 0.3;

  const RegionMarker fluid{RegionKind::Fluid, -1};
  const RegionCoeffs rc = region_coeffs(params, ModelKind::Full2D, nullptr, fluid);

  auto u_exact = [](const Vec2& x) {
    return Vec2(std::sin(kPi * x.x()) * std::sin(kPi * x.y()),
                std::cos(kPi * x.x()) * std::cos(kPi * x.y()));
  };
  auto p_exact = [](const Vec2& x) { return std::sin(kPi * x.x()) * std::cos(kPi * x.y()); };
  auto T_exact = [&](const Vec2& x) {
    return params.T_wall + std::sin(kPi * x.x()) * std::sin(kPi * x.y());
  };
  auto grad_p = [](const Vec2& x) {
    return Vec2(kPi * std::cos(kPi * x.x()) * std::cos(kPi * x.y()),
                -kPi * std::sin(kPi * x.x()) * std::sin(kPi * x.y()));
  };
  auto grad_T = [](const Vec2& x) {
    return Vec2(kPi * std::cos(kPi * x.x()) * std::sin(kPi * x.y()),
                kPi * std::sin(kPi * x.x()) * std::cos(kPi * x.y()));
  };

  Verification verif;
  verif.dirichlet_velocity = u_exact;
  verif.dirichlet_temperature = T_exact;
  verif.pin_pressure = true;
  verif.pin_pressure_value = 0.0;  // p_exact at the origin vertex
  verif.body_force_velocity = [&](const Vec2& x) {
    // -visc*Lap(u) + drag*u + pres*grad(p), with Lap(u) = -2 pi^2 u here
    return ((2.0 * kPi * kPi * rc.visc + rc.drag_iso) * u_exact(x) + rc.pres * grad_p(x)).eval();
  };
  verif.body_force_temperature = [&](const Vec2& x) {
    const double sins = std::sin(kPi * x.x()) * std::sin(kPi * x.y());
    return 2.0 * kPi * kPi * rc.diff * sins + rc.conv * u_exact(x).dot(grad_T(x)) +
           rc.react * sins;
  };

  ConvergenceResult out;
  const SupgConfig supg{false};
  const auto& quad = TriQuadrature::degree4();
  for (int n : resolutions) {
    Mesh mesh = generate_rectangle(n, n, 1.0, 1.0, params.height);
    // Jitter the interior vertices: the exact lattice superconverges, which
    // would hide the true approximation orders.
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double amp = 0.15 / n;
    for (auto& v : mesh.vertices) {
      const Vec2 shift(amp * unit(rng), amp * unit(rng));
      const bool interior = v.x() > 1e-12 && v.x() < 1.0 - 1e-12 && v.y() > 1e-12 &&
                            v.y() < 1.0 - 1e-12;
      if (interior) v += shift;
    }
    Spaces spaces(mesh);
    const StateSolution state =
        solve_state(mesh, spaces, params, ModelKind::Full2D, nullptr, supg, &verif);

    // Compare pressures up to their means (the field is defined up to a
    // constant under full Dirichlet data).
    double area = 0, p_h_mean = 0, p_ex_mean = 0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto geo = cell_geometry(mesh, c);
      const auto& t = mesh.triangles[c];
      for (int q = 0; q < quad.n_points; ++q) {
        const double w = quad.weights[q] * geo.det;
        Vec2 xq = Vec2::Zero();
        for (int k = 0; k < 3; ++k) xq += quad.bary[q][k] * mesh.vertices[t[k]];
        area += w;
        p_h_mean += w * eval_p1_scalar(mesh, state.pressure, c, quad.bary[q]);
        p_ex_mean += w * p_exact(xq);
      }
    }
    p_h_mean /= area;
    p_ex_mean /= area;

    double eu = 0, ep = 0, eT = 0;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      const auto geo = cell_geometry(mesh, c);
      const auto& t = mesh.triangles[c];
      for (int q = 0; q < quad.n_points; ++q) {
        const double w = quad.weights[q] * geo.det;
        Vec2 xq = Vec2::Zero();
        for (int k = 0; k < 3; ++k) xq += quad.bary[q][k] * mesh.vertices[t[k]];
        eu += w * (eval_p2_vector(spaces.velocity, state.velocity, c, quad.bary[q]) - u_exact(xq))
                      .squaredNorm();
        const double dp = (eval_p1_scalar(mesh, state.pressure, c, quad.bary[q]) - p_h_mean) -
                          (p_exact(xq) - p_ex_mean);
        ep += w * dp * dp;
        const double dT = eval_p1_scalar(mesh, state.temperature, c, quad.bary[q]) - T_exact(xq);
        eT += w * dT * dT;
      }
    }
    out.levels.push_back({1.0 / n, std::sqrt(eu), std::sqrt(ep), std::sqrt(eT)});
  }

  std::vector<double> hs, eus, eps, eTs;
  for (const auto& lv : out.levels) {
    hs.push_back(lv.h);
    eus.push_back(lv.err_velocity);
    eps.push_back(lv.err_pressure);
    eTs.push_back(lv.err_temperature);
  }
  out.velocity_order = fitted_slope(hs, eus);
  out.pressure_order = fitted_slope(hs, eps);
  out.temperature_order = fitted_slope(hs, eTs);
  return out;
}

VectorFieldP1 random_smooth_direction(const Mesh& mesh, unsigned seed, int max_wavenumber) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  Vec2 lo = mesh.vertices.front(), hi = mesh.vertices.front();
  for (const auto& p : mesh.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 span = (hi - lo).cwiseMax(1e-300);

  struct Term {
    double c, kx, ky, px, py;
  };
  std::array<std::vector<Term>, 2> terms;
  for (int comp = 0; comp < 2; ++comp)
    for (int kx = 1; kx <= max_wavenumber; ++kx)
      for (int ky = 1; ky <= max_wavenumber; ++ky)
        terms[comp].push_back({unit(rng), kPi * kx, kPi * ky, kPi * unit(rng), kPi * unit(rng)});

  VectorFieldP1 field = VectorFieldP1::zero(mesh.n_vertices());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double xr = (mesh.vertices[v].x() - lo.x()) / span.x();
    const double yr = (mesh.vertices[v].y() - lo.y()) / span.y();
    Vec2 val = Vec2::Zero();
    for (int comp = 0; comp < 2; ++comp)
      for (const Term& t : terms[comp])
        val[comp] += t.c * std::sin(t.kx * xr + t.px) * std::sin(t.ky * yr + t.py);
    field.set(v, val);
  }

  // Feasibility: fixed inlet/outlet, slide along the channel/Darcy walls.
  DofMap p1(mesh, SpaceKind::P1Scalar);
  for (int node : p1.marker_nodes(FacetMarker::Inlet)) field.set(node, Vec2::Zero());
  for (int node : p1.marker_nodes(FacetMarker::Outlet)) field.set(node, Vec2::Zero());
  for (const auto& f : mesh.boundary_facets) {
    if (f.marker != FacetMarker::ChannelWall) continue;
    auto [len, normal] = facet_geometry(mesh, f);
    const int comp = std::abs(normal.x()) > std::abs(normal.y()) ? 0 : 1;
    for (int node : {f.v[0], f.v[1]}) field.values[2 * node + comp] = 0.0;
  }

  const double maxmag = field.values.cwiseAbs().maxCoeff();
  if (maxmag > 0.0) field.values /= maxmag;
  return field;
}

FdCheck fd_gradient_check(const Mesh& mesh, const PhysicalParams& params, ModelKind model,
                          const DarcyParams* darcy, int n_directions, unsigned seed) {
  const SupgConfig supg{false};
  Spaces spaces(mesh);
  StokesOperator stokes;
  const StateSolution state = solve_state(mesh, spaces, params, model, darcy, supg, nullptr, &stokes);
  const CostConfig cfg =
      make_cost_config(mesh, spaces, state, params, model, darcy, std::nullopt, 0.05);
  const AdjointSolution adj =
      solve_adjoint(mesh, spaces, params, model, darcy, supg, state, cfg, &stokes);
  const Eigen::VectorXd dj =
      shape_derivative_functional(mesh, spaces, params, model, darcy, state, adj, cfg);

  const double t = 1e-6 * mesh.diameter();
  FdCheck out;
  for (int k = 0; k < n_directions; ++k) {
    const VectorFieldP1 v = random_smooth_direction(mesh, seed + k);
    const double dj_v = shape_derivative(dj, v);
    const double j_plus = reduced_cost(deform(mesh, v, t), params, model, darcy, supg, cfg);
    const double j_minus = reduced_cost(deform(mesh, v, -t), params, model, darcy, supg, cfg);
    const double fd = (j_plus - j_minus) / (2.0 * t);
    const double denom = std::max(std::abs(fd), 1e-300);
    out.rel_errors.push_back(std::abs(fd - dj_v) / denom);
  }
  out.max_rel_error = *std::max_element(out.rel_errors.begin(), out.rel_errors.end());
  return out;
}

TaylorCheck taylor_remainder_check(const Mesh& mesh, const PhysicalParams& params, ModelKind model,
                                   const DarcyParams* darcy, const SupgConfig& supg,
                                   unsigned seed) {
  Spaces spaces(mesh);
  StokesOperator stokes;
  const StateSolution state = solve_state(mesh, spaces, params, model, darcy, supg, nullptr, &stokes);
  const CostConfig cfg =
      make_cost_config(mesh, spaces, state, params, model, darcy, std::nullopt, 0.05);
  const AdjointSolution adj =
      solve_adjoint(mesh, spaces, params, model, darcy, supg, state, cfg, &stokes);
  const Eigen::VectorXd dj =
      shape_derivative_functional(mesh, spaces, params, model, darcy, state, adj, cfg);
  const double j0 = cost(mesh, spaces, state, cfg, params, model, darcy).J;

  const VectorFieldP1 v = random_smooth_direction(mesh, seed);
  const double dj_v = shape_derivative(dj, v);

  TaylorCheck out;
  const double diam = mesh.diameter();
  for (double rel : {1e-3, 5e-4, 2.5e-4}) {
    const double t = rel * diam;
    const double jt = reduced_cost(deform(mesh, v, t), params, model, darcy, supg, cfg);
    out.t_values.push_back(t);
    out.remainders.push_back(std::abs(jt - j0 - t * dj_v));
  }
  out.slope = fitted_slope(out.t_values, out.remainders);
  return out;
}

namespace {

/// Uniform-grid point locator over a triangulation.
class PointLocator {
 public:
  explicit PointLocator(const Mesh& mesh) : mesh_(mesh) {
    lo_ = hi_ = mesh.vertices.front();
    for (const auto& p : mesh.vertices) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    nx_ = ny_ = std::max(1, static_cast<int>(std::sqrt(mesh.n_cells() / 2.0)));
    bins_.resize(static_cast<size_t>(nx_) * ny_);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      Vec2 clo = mesh.vertices[mesh.triangles[c][0]], chi = clo;
      for (int v : mesh.triangles[c]) {
        clo = clo.cwiseMin(mesh.vertices[v]);
        chi = chi.cwiseMax(mesh.vertices[v]);
      }
      const auto [i0, j0] = bin_of(clo);
      const auto [i1, j1] = bin_of(chi);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) bins_[static_cast<size_t>(j) * nx_ + i].push_back(c);
    }
  }

  int locate(const Vec2& x, std::array<double, 3>& bary) const {
    const auto [i, j] = bin_of(x);
    const double tol = -1e-10;
    for (int c : bins_[static_cast<size_t>(j) * nx_ + i]) {
      const auto& t = mesh_.triangles[c];
      const double det = 2.0 * mesh_.cell_area(c);
      const Vec2& a = mesh_.vertices[t[0]];
      const Vec2& b = mesh_.vertices[t[1]];
      const Vec2& d = mesh_.vertices[t[2]];
      const double l1 = ((d.y() - a.y()) * (x.x() - a.x()) - (d.x() - a.x()) * (x.y() - a.y())) / det;
      const double l2 = ((a.y() - b.y()) * (x.x() - a.x()) + (b.x() - a.x()) * (x.y() - a.y())) / det;
      const double l0 = 1.0 - l1 - l2;
      if (l0 >= tol && l1 >= tol && l2 >= tol) {
        bary = {l0, l1, l2};
        return c;
      }
    }
    return -1;
  }

 private:
  std::pair<int, int> bin_of(const Vec2& x) const {
    const Vec2 span = (hi_ - lo_).cwiseMax(1e-300);
    int i = static_cast<int>((x.x() - lo_.x()) / span.x() * nx_);
    int j = static_cast<int>((x.y() - lo_.y()) / span.y() * ny_);
    return {std::clamp(i, 0, nx_ - 1), std::clamp(j, 0, ny_ - 1)};
  }

  const Mesh& mesh_;
  Vec2 lo_, hi_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> bins_;
};

}  // namespace

CompareResult compare_models(const RunConfig& full_config, const RunConfig& darcy_config) {
  if (full_config.model != ModelKind::Full2D)
    throw std::runtime_error("compare: the first config must be the full2d reference");

  const Mesh full_mesh = full_config.build_mesh();
  const Mesh darcy_mesh = darcy_config.build_mesh();
  Spaces full_spaces(full_mesh);
  Spaces darcy_spaces(darcy_mesh);
  const SupgConfig full_supg{full_config.supg};
  const SupgConfig darcy_supg{darcy_config.supg};
  const StateSolution full_state =
      solve_state(full_mesh, full_spaces, full_config.physical, ModelKind::Full2D, nullptr, full_supg);
  const StateSolution darcy_state =
      solve_state(darcy_mesh, darcy_spaces, darcy_config.physical, darcy_config.model,
                  darcy_config.darcy_ptr(), darcy_supg);

  const PointLocator locator(darcy_mesh);
  const auto& quad = TriQuadrature::degree4();
  double p_num_l2 = 0, p_den_l2 = 0, p_num_l1 = 0, p_den_l1 = 0, p_num_inf = 0, p_den_inf = 0;
  double T_num_l2 = 0, T_den_l2 = 0, T_num_l1 = 0, T_den_l1 = 0, T_num_inf = 0, T_den_inf = 0;
  const double T_in = full_config.physical.T_in;

  for (int c = 0; c < full_mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(full_mesh, c);
    const auto& t = full_mesh.triangles[c];
    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det;
      Vec2 xq = Vec2::Zero();
      for (int k = 0; k < 3; ++k) xq += quad.bary[q][k] * full_mesh.vertices[t[k]];
      std::array<double, 3> bary{};
      const int dc = locator.locate(xq, bary);
      if (dc < 0) throw std::runtime_error("compare: geometry mismatch (point not in darcy mesh)");
      const double pf = eval_p1_scalar(full_mesh, full_state.pressure, c, quad.bary[q]);
      const double pd = eval_p1_scalar(darcy_mesh, darcy_state.pressure, dc, bary);
      const double Tf = eval_p1_scalar(full_mesh, full_state.temperature, c, quad.bary[q]);
      const double Td = eval_p1_scalar(darcy_mesh, darcy_state.temperature, dc, bary);
      p_num_l2 += w * (pf - pd) * (pf - pd);
      p_den_l2 += w * pf * pf;
      p_num_l1 += w * std::abs(pf - pd);
      p_den_l1 += w * std::abs(pf);
      p_num_inf = std::max(p_num_inf, std::abs(pf - pd));
      p_den_inf = std::max(p_den_inf, std::abs(pf));
      T_num_l2 += w * (Tf - Td) * (Tf - Td);
      T_den_l2 += w * (Tf - T_in) * (Tf - T_in);
      T_num_l1 += w * std::abs(Tf - Td);
      T_den_l1 += w * std::abs(Tf - T_in);
      T_num_inf = std::max(T_num_inf, std::abs(Tf - Td));
      T_den_inf = std::max(T_den_inf, std::abs(Tf - T_in));
    }
  }

  CompareResult out;
  out.pressure = {std::sqrt(p_num_l2 / p_den_l2), p_num_inf / p_den_inf, p_num_l1 / p_den_l1};
  out.temperature = {std::sqrt(T_num_l2 / T_den_l2), T_num_inf / T_den_inf, T_num_l1 / T_den_l1};
  out.flux_full = channel_mass_fluxes(full_mesh, full_spaces, full_state, full_config.physical,
                                      ModelKind::Full2D);
  out.flux_darcy = channel_mass_fluxes(darcy_mesh, darcy_spaces, darcy_state,
                                       darcy_config.physical, darcy_config.model,
                                       full_mesh.n_channels());
  return out;
}

}  // namespace mcs
