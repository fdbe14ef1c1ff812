#include "mcshape/adjoint.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace mcs {

namespace {

RegionKind tracking_region(ModelKind model) {
  return model == ModelKind::Full2D ? RegionKind::Channel : RegionKind::Darcy;
}

// Factor in J2 = int j2f * |u - u_des|^2 over the tracking region.
double j2_factor(const PhysicalParams& params, ModelKind model) {
  return model == ModelKind::Full2D ? 8.0 * params.height / 15.0 : params.height;
}

struct RawCost {
  double Q = 0, J2 = 0, J3 = 0;
};

RawCost raw_cost(const Mesh& mesh, const Spaces& spaces, const StateSolution& state,
                 const DesiredVelocity& u_des, const PhysicalParams& params, ModelKind model,
                 const DarcyParams* darcy) {
  const auto& quad = TriQuadrature::degree4();
  const RegionKind track = tracking_region(model);
  const double j2f = j2_factor(params, model);
  RawCost out;

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const auto& marker = mesh.cell_markers[c];
    const RegionCoeffs rc = region_coeffs(params, model, darcy, marker);
    const auto& t = mesh.triangles[c];
    out.J3 += geo.det;  // 2 * area
    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det;
      const auto& l = quad.bary[q];
      const double T = eval_p1_scalar(mesh, state.temperature, c, l);
      out.Q += w * rc.react * (params.T_wall - T);
      if (marker.kind == track) {
        Vec2 xq = Vec2::Zero();
        for (int k = 0; k < 3; ++k) xq += l[k] * mesh.vertices[t[k]];
        const Vec2 diff =
            eval_p2_vector(spaces.velocity, state.velocity, c, l) - u_des.value(xq, marker);
        out.J2 += w * j2f * diff.squaredNorm();
      }
    }
  }

  const auto& fq = FacetQuadrature::gauss3();
  const double ha = params.height * params.alpha;
  for (const auto& f : mesh.boundary_facets) {
    auto [len, normal] = facet_geometry(mesh, f);
    out.J3 += params.height * len;
    if (!robin_marker(model, f.marker)) continue;
    for (int q = 0; q < fq.n_points; ++q) {
      const double t1 = fq.points[q];
      const double T = (1.0 - t1) * state.temperature[f.v[0]] + t1 * state.temperature[f.v[1]];
      out.Q += fq.weights[q] * len * ha * (params.T_wall - T);
    }
  }
  return out;
}

}  // namespace

CostConfig make_cost_config(const Mesh& mesh, const Spaces& spaces, const StateSolution& state,
                            const PhysicalParams& params, ModelKind model, const DarcyParams* darcy,
                            std::optional<double> q_des_absolute, double q_des_relative) {
  CostConfig cfg;
  cfg.u_des = model == ModelKind::Full2D ? DesiredVelocity::full2d(mesh, params)
                                         : DesiredVelocity::darcy2d(mesh, params, *darcy);
  const RawCost raw = raw_cost(mesh, spaces, state, cfg.u_des, params, model, darcy);
  cfg.q_des = q_des_absolute.value_or((1.0 + q_des_relative) * raw.Q);
  const double j1 = (raw.Q - cfg.q_des) * (raw.Q - cfg.q_des);
  auto weight = [](double target, double value, const char* name) {
    if (value > 0.0) return target / value;
    std::fprintf(stderr, "warning: %s vanishes on the initial geometry, weight kept at 1\n", name);
    return 1.0;
  };
  cfg.lambda1 = weight(1.0, j1, "J1");
  cfg.lambda2 = weight(1.0, raw.J2, "J2");
  cfg.lambda3 = weight(1e-2, raw.J3, "J3");
  return cfg;
}

CostValue cost(const Mesh& mesh, const Spaces& spaces, const StateSolution& state,
               const CostConfig& cfg, const PhysicalParams& params, ModelKind model,
               const DarcyParams* darcy) {
  const RawCost raw = raw_cost(mesh, spaces, state, cfg.u_des, params, model, darcy);
  CostValue out;
  out.Q = raw.Q;
  out.J1 = (raw.Q - cfg.q_des) * (raw.Q - cfg.q_des);
  out.J2 = raw.J2;
  out.J3 = raw.J3;
  out.J = cfg.lambda1 * out.J1 + cfg.lambda2 * out.J2 + cfg.lambda3 * out.J3;
  return out;
}

AdjointSolution solve_adjoint(const Mesh& mesh, const Spaces& spaces, const PhysicalParams& params,
                              ModelKind model, const DarcyParams* darcy, const SupgConfig& supg,
                              const StateSolution& state, const CostConfig& cfg,
                              const StokesOperator* reuse_stokes) {
  const DofMap& sca = spaces.scalar;
  const DofMap& vel = spaces.velocity;
  const auto& quad = TriQuadrature::degree4();

  const CostValue cv = cost(mesh, spaces, state, cfg, params, model, darcy);
  const double qfac = 2.0 * cfg.lambda1 * (cv.Q - cfg.q_des);

  // Adjoint temperature: transposed convection, same diffusion/reaction/Robin.
  SystemBuilder builder(sca.n_dofs());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const RegionCoeffs rc = region_coeffs(params, model, darcy, mesh.cell_markers[c]);
    const auto nodes = sca.cell_nodes(c);

    double tau = 0.0;
    if (supg.enabled) {
      const double speed = cell_average_speed(spaces, state.velocity, c);
      tau = supg_tau(speed, cell_diameter(mesh, c), rc.conv, rc.diff);
    }

    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det;
      const auto& l = quad.bary[q];
      const Vec2 uq = eval_p2_vector(vel, state.velocity, c, l);
      for (int i = 0; i < 3; ++i) {
        const double conv_test = rc.conv * uq.dot(geo.grad_bary[i]);
        const double supg_test = tau * (-uq.dot(geo.grad_bary[i]));
        for (int j = 0; j < 3; ++j) {
          double entry = rc.diff * geo.grad_bary[i].dot(geo.grad_bary[j]);
          entry += conv_test * l[j];
          entry += rc.react * l[i] * l[j];
          entry += supg_test * (-rc.conv * uq.dot(geo.grad_bary[j]) + rc.react * l[j]);
          builder.add(nodes[i], nodes[j], w * entry);
        }
        const double rhs_density = qfac * rc.react;
        builder.add_rhs(nodes[i], w * rhs_density * (l[i] + supg_test));
      }
    }
  }
  const auto& fq = FacetQuadrature::gauss3();
  const double ha = params.height * params.alpha;
  for (const auto& f : mesh.boundary_facets) {
    if (!robin_marker(model, f.marker)) continue;
    auto [len, normal] = facet_geometry(mesh, f);
    for (int q = 0; q < fq.n_points; ++q) {
      const double w = fq.weights[q] * len;
      const double t1 = fq.points[q];
      const std::array<double, 2> nv{1.0 - t1, t1};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) builder.add(f.v[i], f.v[j], w * ha * nv[i] * nv[j]);
        builder.add_rhs(f.v[i], w * qfac * ha * nv[i]);
      }
    }
  }
  SparseSystem tsys = builder.build();
  {
    const auto& inlet = sca.marker_nodes(FacetMarker::Inlet);
    const std::vector<double> zeros(inlet.size(), 0.0);
    apply_dirichlet(tsys, inlet, zeros);
  }

  AdjointSolution adj;
  adj.temperature = solve_direct(tsys);

  // Adjoint Stokes: same symmetric operator, tracking and grad(T) S sources.
  StokesOperator local;
  const StokesOperator* op = reuse_stokes;
  if (op == nullptr) {
    local = build_stokes_operator(mesh, spaces, params, model, darcy, nullptr);
    op = &local;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(op->system.size());
  const RegionKind track = tracking_region(model);
  const double j2f = j2_factor(params, model);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const auto& marker = mesh.cell_markers[c];
    const RegionCoeffs rc = region_coeffs(params, model, darcy, marker);
    const auto unodes = vel.cell_nodes(c);
    const auto& t = mesh.triangles[c];
    const Vec2 grad_T = grad_p1_scalar(mesh, state.temperature, c);
    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det;
      const auto& l = quad.bary[q];
      const auto nval = P2Basis::values(l);
      const double S = eval_p1_scalar(mesh, adj.temperature, c, l);
      Vec2 density = -rc.conv * S * grad_T;
      if (marker.kind == track) {
        Vec2 xq = Vec2::Zero();
        for (int k = 0; k < 3; ++k) xq += l[k] * mesh.vertices[t[k]];
        const Vec2 diff = eval_p2_vector(vel, state.velocity, c, l) - cfg.u_des.value(xq, marker);
        density -= 2.0 * cfg.lambda2 * j2f * diff;
      }
      for (int i = 0; i < 6; ++i) {
        rhs[vel.dof(unodes[i], 0)] += w * nval[i] * density.x();
        rhs[vel.dof(unodes[i], 1)] += w * nval[i] * density.y();
      }
    }
  }
  for (const auto& [dof, value] : op->constraints) rhs[dof] = 0.0;
  const Eigen::VectorXd vp = op->solver->solve(rhs);
  adj.velocity = vp.head(op->n_vel);
  adj.pressure = vp.tail(sca.n_dofs());
  if (!adj.velocity.allFinite() || !adj.temperature.allFinite())
    throw std::runtime_error("solve_adjoint: non-finite solution");
  return adj;
}

Eigen::VectorXd shape_derivative_functional(const Mesh& mesh, const Spaces& spaces,
                                            const PhysicalParams& params, ModelKind model,
                                            const DarcyParams* darcy, const StateSolution& state,
                                            const AdjointSolution& adjoint, const CostConfig& cfg) {
  const DofMap& vel = spaces.velocity;
  const auto& quad = TriQuadrature::degree4();
  const CostValue cv = cost(mesh, spaces, state, cfg, params, model, darcy);
  const double qfac = 2.0 * cfg.lambda1 * (cv.Q - cfg.q_des);
  const RegionKind track = tracking_region(model);
  const double j2f = j2_factor(params, model);

  Eigen::VectorXd dj = Eigen::VectorXd::Zero(2 * mesh.n_vertices());

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const auto& marker = mesh.cell_markers[c];
    const RegionCoeffs rc = region_coeffs(params, model, darcy, marker);
    const auto& t = mesh.triangles[c];
    const Vec2 grad_T = grad_p1_scalar(mesh, state.temperature, c);
    const Vec2 grad_S = grad_p1_scalar(mesh, adjoint.temperature, c);

    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det;
      const auto& l = quad.bary[q];
      Vec2 xq = Vec2::Zero();
      for (int k = 0; k < 3; ++k) xq += l[k] * mesh.vertices[t[k]];
      const Vec2 u = eval_p2_vector(vel, state.velocity, c, l);
      const Vec2 v = eval_p2_vector(vel, adjoint.velocity, c, l);
      const Mat2 Du = grad_p2_vector(mesh, vel, state.velocity, c, l);
      const Mat2 Dva = grad_p2_vector(mesh, vel, adjoint.velocity, c, l);
      const double p = eval_p1_scalar(mesh, state.pressure, c, l);
      const double q_adj = eval_p1_scalar(mesh, adjoint.pressure, c, l);
      const double T = eval_p1_scalar(mesh, state.temperature, c, l);
      const double S = eval_p1_scalar(mesh, adjoint.temperature, c, l);
      Vec2 udiff = Vec2::Zero();
      Mat2 judes = Mat2::Zero();
      if (marker.kind == track) {
        udiff = u - cfg.u_des.value(xq, marker);
        judes = cfg.u_des.jacobian(xq, marker);
      }

      for (int a = 0; a < 3; ++a) {
        for (int d = 0; d < 2; ++d) {
          Mat2 DV = Mat2::Zero();
          DV.row(d) = geo.grad_bary[a].transpose();
          const double divV = DV(0, 0) + DV(1, 1);
          const Mat2 M = divV * Mat2::Identity() - DV - DV.transpose();  // divV I - 2 eps(V)
          const Mat2 N = divV * Mat2::Identity() - DV;
          const Mat2 Nt = divV * Mat2::Identity() - DV.transpose();
          const Vec2 Vq = l[a] * Vec2::Unit(d);

          double term = rc.visc * (Du * M).cwiseProduct(Dva).sum();
          term += rc.drag_iso * u.dot(v) * divV;
          if (rc.has_drag_mat) term += (rc.drag_mat * u).dot(v) * divV;
          term -= rc.pres * p * (Dva * N).trace();
          term -= rc.pres * q_adj * (Du * N).trace();
          term += rc.diff * (M * grad_T).dot(grad_S);
          term += rc.conv * u.dot(Nt * grad_T) * S;
          term += rc.react * (T - params.T_wall) * S * divV;
          term += qfac * rc.react * (params.T_wall - T) * divV;
          term += cfg.lambda3 * 2.0 * divV;
          if (marker.kind == track)
            term += cfg.lambda2 *
                    (j2f * udiff.squaredNorm() * divV - 2.0 * j2f * udiff.dot(judes * Vq));

          dj[2 * t[a] + d] += w * term;
        }
      }
    }
  }

  // Boundary terms: perimeter regularization everywhere, heat tracking and
  // the Robin adjoint term on the wall. For a P1 basis function attached to a
  // facet endpoint, div_Gamma = +-tangent/len.
  const auto& fq = FacetQuadrature::gauss3();
  const double ha = params.height * params.alpha;
  for (const auto& f : mesh.boundary_facets) {
    auto [len, normal] = facet_geometry(mesh, f);
    const Vec2 tangent = (mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]]) / len;
    double g_integral = cfg.lambda3 * params.height * len;
    if (robin_marker(model, f.marker)) {
      for (int q = 0; q < fq.n_points; ++q) {
        const double t1 = fq.points[q];
        const double T = (1.0 - t1) * state.temperature[f.v[0]] + t1 * state.temperature[f.v[1]];
        const double S =
            (1.0 - t1) * adjoint.temperature[f.v[0]] + t1 * adjoint.temperature[f.v[1]];
        g_integral +=
            fq.weights[q] * len * ha * (qfac * (params.T_wall - T) + (T - params.T_wall) * S);
      }
    }
    for (int d = 0; d < 2; ++d) {
      dj[2 * f.v[0] + d] -= g_integral * tangent[d] / len;
      dj[2 * f.v[1] + d] += g_integral * tangent[d] / len;
    }
  }
  return dj;
}

double tangential_divergence_term(const Mesh& mesh, FacetMarker marker,
                                  const std::function<double(const Vec2&)>& g,
                                  const VectorFieldP1& v) {
  const auto& fq = FacetQuadrature::gauss3();
  double out = 0.0;
  for (const auto& f : mesh.boundary_facets) {
    if (f.marker != marker) continue;
    auto [len, normal] = facet_geometry(mesh, f);
    const Vec2 tangent = (mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]]) / len;
    const double div_gamma = tangent.dot(v.at(f.v[1]) - v.at(f.v[0])) / len;
    for (int q = 0; q < fq.n_points; ++q) {
      const double t1 = fq.points[q];
      const Vec2 xq = (1.0 - t1) * mesh.vertices[f.v[0]] + t1 * mesh.vertices[f.v[1]];
      out += fq.weights[q] * len * g(xq) * div_gamma;
    }
  }
  return out;
}

void ElasticityConfig::validate() const {
  if (!(mu_elas > 0.0)) throw std::runtime_error("elasticity: mu_elas must be > 0");
  if (lambda_elas < 0.0) throw std::runtime_error("elasticity: lambda_elas must be >= 0");
  if (delta < 0.0) throw std::runtime_error("elasticity: delta must be >= 0");
  if (c_aniso < 1.0) throw std::runtime_error("elasticity: c_aniso must be >= 1");
}

SparseSystem elasticity_operator(const Mesh& mesh, const ElasticityConfig& elas, ModelKind model) {
  elas.validate();
  if (static_cast<int>(elas.nu.size()) != mesh.n_cells())
    throw std::runtime_error("elasticity_operator: nu not frozen for this mesh");

  const int n = 2 * mesh.n_vertices();
  SystemBuilder builder(n);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const double area = 0.5 * geo.det;
    const auto& t = mesh.triangles[c];
    const bool aniso =
        model == ModelKind::Darcy2D && mesh.cell_markers[c].kind == RegionKind::Darcy;
    const double scale = mesh.height * elas.nu[c];

    std::array<std::array<Mat2, 2>, 3> eps{};
    for (int a = 0; a < 3; ++a) {
      for (int d = 0; d < 2; ++d) {
        Mat2 m = Mat2::Zero();
        m.row(d) = 0.5 * geo.grad_bary[a].transpose();
        eps[a][d] = m + m.transpose();
      }
    }

    for (int a = 0; a < 3; ++a) {
      for (int d = 0; d < 2; ++d) {
        const Mat2& epsU = eps[a][d];
        for (int b = 0; b < 3; ++b) {
          for (int e = 0; e < 2; ++e) {
            const Mat2& epsV = eps[b][e];
            double strain = elas.lambda_elas * epsU.trace() * epsV.trace();
            const double c00 = aniso ? elas.c_aniso : 1.0;
            strain += 2.0 * elas.mu_elas *
                      (c00 * epsU(0, 0) * epsV(0, 0) + epsU(0, 1) * epsV(0, 1) +
                       epsU(1, 0) * epsV(1, 0) + epsU(1, 1) * epsV(1, 1));
            double entry = strain * area;
            if (d == e) entry += elas.delta * area * (a == b ? 1.0 / 6.0 : 1.0 / 12.0);
            builder.add(2 * t[a] + d, 2 * t[b] + e, scale * entry);
          }
        }
      }
    }
  }
  return builder.build();
}

ShapeGradientResult shape_gradient(const Mesh& mesh, const Eigen::VectorXd& dj,
                                   const ElasticityConfig& elas, ModelKind model) {
  if (dj.size() != 2 * mesh.n_vertices())
    throw std::runtime_error("shape_gradient: functional size mismatch");

  SparseSystem sys = elasticity_operator(mesh, elas, model);
  const Eigen::SparseMatrix<double, Eigen::RowMajor> a_raw = sys.A;

  std::map<int, double> cmap;
  DofMap p1v(mesh, SpaceKind::P1Vector);
  for (int node : p1v.marker_nodes(FacetMarker::Inlet)) {
    cmap[2 * node] = 0.0;
    cmap[2 * node + 1] = 0.0;
  }
  for (int node : p1v.marker_nodes(FacetMarker::Outlet)) {
    cmap[2 * node] = 0.0;
    cmap[2 * node + 1] = 0.0;
  }
  for (const auto& f : mesh.boundary_facets) {
    if (f.marker != FacetMarker::ChannelWall) continue;
    auto [len, normal] = facet_geometry(mesh, f);
    int comp;
    if (std::abs(std::abs(normal.x()) - 1.0) < 1e-9)
      comp = 0;
    else if (std::abs(std::abs(normal.y()) - 1.0) < 1e-9)
      comp = 1;
    else
      throw std::runtime_error("shape_gradient: channel/Darcy wall facet is not axis-aligned");
    for (int node : {f.v[0], f.v[1]}) cmap.emplace(2 * node + comp, 0.0);
  }

  sys.b = dj;
  std::vector<std::pair<int, double>> constraints(cmap.begin(), cmap.end());
  for (const auto& [dof, value] : constraints) sys.b[dof] = value;
  apply_dirichlet(sys, constraints);

  ShapeGradientResult out;
  out.field.values = solve_direct(sys);
  const double energy = out.field.values.dot(a_raw * out.field.values);
  out.norm = std::sqrt(std::max(0.0, energy));
  return out;
}

}  // namespace mcs
