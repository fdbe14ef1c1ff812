#include "mcshape/physics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace mcs {

void PhysicalParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::runtime_error(std::string("physical params: ") + name + " must be > 0");
  };
  positive(mu, "mu");
  positive(rho, "rho");
  positive(kappa, "kappa");
  positive(cp, "cp");
  positive(m_in, "m_in");
  positive(alpha, "alpha");
  positive(height, "height");
  if (T_wall < T_in)
    std::fprintf(stderr, "warning: T_wall < T_in, the problem heats the wall, not the fluid\n");
}

void DarcyParams::validate() const {
  if (!(phi > 0.0 && phi < 1.0)) throw std::runtime_error("darcy params: phi must be in (0,1)");
  if (!(k_hat > 0.0)) throw std::runtime_error("darcy params: k_hat must be > 0");
  if (!(h_fs > 0.0)) throw std::runtime_error("darcy params: h_fs must be > 0");
  if (!(eps_relax > 0.0 && eps_relax < 1.0))
    throw std::runtime_error("darcy params: eps_relax must be in (0,1); K is singular otherwise");
  if (std::abs(channel_axis.norm() - 1.0) > 1e-12)
    throw std::runtime_error("darcy params: channel_axis must be a unit vector");
}

Mat2 DarcyParams::permeability_inverse() const {
  validate();
  const Mat2 proj = channel_axis * channel_axis.transpose();
  return ((Mat2::Identity() - proj) / eps_relax + proj) / k_hat;
}

RegionCoeffs region_coeffs(const PhysicalParams& p, ModelKind model, const DarcyParams* darcy,
                           const RegionMarker& marker) {
  const double h = p.height;
  RegionCoeffs c;
  if (model == ModelKind::Full2D) {
    c.visc = 8.0 * h / 15.0 * p.mu;
    c.drag_iso = 16.0 / (3.0 * h) * p.mu;
    c.pres = 2.0 * h / 3.0;
    c.diff = h * p.kappa;
    c.conv = 2.0 * h / 3.0 * p.rho * p.cp;
    c.react = 2.0 * p.alpha;
    return c;
  }
  if (darcy == nullptr) throw std::runtime_error("darcy2d model requires Darcy parameters");
  c.pres = h;
  c.conv = h * p.rho * p.cp;
  if (marker.kind == RegionKind::Darcy) {
    c.visc = h * p.mu;
    c.drag_mat = h * p.mu * darcy->permeability_inverse();
    c.has_drag_mat = true;
    c.diff = h * darcy->phi * p.kappa;
    c.react = h * darcy->h_fs;
  } else {
    c.visc = 6.0 / 5.0 * h * p.mu;
    c.drag_iso = 12.0 / h * p.mu;
    c.diff = h * p.kappa;
    c.react = 2.0 * p.alpha;
  }
  return c;
}

bool robin_marker(ModelKind model, FacetMarker marker) {
  if (marker == FacetMarker::Wall) return true;
  return model == ModelKind::Full2D && marker == FacetMarker::ChannelWall;
}

double flux_thickness_factor(const PhysicalParams& params, ModelKind model) {
  return model == ModelKind::Full2D ? 2.0 * params.height / 3.0 : params.height;
}

Vec2 InflowProfile::value(const Vec2& x) const {
  if (width <= 0.0) return Vec2::Zero();
  const Vec2 tangent = (b - a) / width;
  const double s = (x - a).dot(tangent);
  return peak * 4.0 * s * (width - s) / (width * width) * direction;
}

InflowProfile inflow_profile(const Mesh& mesh, const PhysicalParams& params, ModelKind model) {
  // The inlet facets must form a single open chain.
  std::map<int, int> incidence;
  std::vector<const BoundaryFacet*> inlet_facets;
  for (const auto& f : mesh.boundary_facets) {
    if (f.marker != FacetMarker::Inlet) continue;
    inlet_facets.push_back(&f);
    incidence[f.v[0]]++;
    incidence[f.v[1]]++;
  }
  if (inlet_facets.empty()) throw std::runtime_error("inflow_profile: no inlet facets");
  std::vector<int> ends;
  for (const auto& [v, count] : incidence) {
    if (count == 1)
      ends.push_back(v);
    else if (count != 2)
      throw std::runtime_error("inflow_profile: disconnected inlet");
  }
  if (ends.size() != 2) throw std::runtime_error("inflow_profile: disconnected inlet");

  InflowProfile prof;
  prof.a = mesh.vertices[ends[0]];
  prof.b = mesh.vertices[ends[1]];
  prof.width = (prof.b - prof.a).norm();
  auto [len, outward] = facet_geometry(mesh, *inlet_facets.front());
  prof.direction = -outward;
  // m_in = rho * c * int u.n ds and the parabola integrates to (2/3)*w*peak.
  const double c = flux_thickness_factor(params, model);
  prof.peak = 3.0 * params.m_in / (2.0 * params.rho * c * prof.width);
  return prof;
}

DesiredVelocity DesiredVelocity::full2d(const Mesh& mesh, const PhysicalParams& params, Vec2 axis) {
  DesiredVelocity out;
  out.axis_ = axis.normalized();
  out.perp_ = Vec2(out.axis_.y(), -out.axis_.x());
  const int n = mesh.n_channels();
  if (n == 0) throw std::runtime_error("desired_velocity: mesh has no channels");
  out.strips_.resize(n);
  std::vector<double> lo(n, 1e300), hi(n, -1e300);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& m = mesh.cell_markers[c];
    if (m.kind != RegionKind::Channel) continue;
    for (int v : mesh.triangles[c]) {
      const double s = mesh.vertices[v].dot(out.perp_);
      lo[m.channel] = std::min(lo[m.channel], s);
      hi[m.channel] = std::max(hi[m.channel], s);
    }
  }
  for (int k = 0; k < n; ++k) {
    const double w = hi[k] - lo[k];
    if (!(w > 0.0)) throw std::runtime_error("desired_velocity: degenerate channel strip");
    out.strips_[k] = {lo[k], w, 9.0 * (params.m_in / n) / (4.0 * params.rho * params.height * w)};
  }
  return out;
}

DesiredVelocity DesiredVelocity::darcy2d(const Mesh& mesh, const PhysicalParams& params,
                                         const DarcyParams& darcy) {
  DesiredVelocity out;
  out.darcy_ = true;
  out.axis_ = darcy.channel_axis.normalized();
  out.perp_ = Vec2(out.axis_.y(), -out.axis_.x());
  double lo = 1e300, hi = -1e300;
  bool any = false;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_markers[c].kind != RegionKind::Darcy) continue;
    any = true;
    for (int v : mesh.triangles[c]) {
      const double s = mesh.vertices[v].dot(out.perp_);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  if (!any) throw std::runtime_error("desired_velocity: mesh has no Darcy block");
  const double W = hi - lo;
  out.darcy_value_ = params.m_in / (params.rho * params.height * W) * out.axis_;
  return out;
}

Vec2 DesiredVelocity::value(const Vec2& x, const RegionMarker& marker) const {
  if (darcy_) return marker.kind == RegionKind::Darcy ? darcy_value_ : Vec2::Zero();
  if (marker.kind != RegionKind::Channel) return Vec2::Zero();
  const Strip& st = strips_[marker.channel];
  const double s = x.dot(perp_) - st.lo;
  return st.peak * 4.0 * s * (st.width - s) / (st.width * st.width) * axis_;
}

Mat2 DesiredVelocity::jacobian(const Vec2& x, const RegionMarker& marker) const {
  if (darcy_ || marker.kind != RegionKind::Channel) return Mat2::Zero();
  const Strip& st = strips_[marker.channel];
  const double s = x.dot(perp_) - st.lo;
  const double dprof = st.peak * 4.0 * (st.width - 2.0 * s) / (st.width * st.width);
  return dprof * axis_ * perp_.transpose();
}

namespace {

// 1D quadratic trace of P2 on a facet, parameterized by t in [0,1].
std::array<double, 3> facet_p2_values(double t) {
  return {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)};
}

std::vector<std::pair<int, double>> stokes_constraints(const Mesh& mesh, const Spaces& spaces,
                                                       const PhysicalParams& params,
                                                       ModelKind model,
                                                       const Verification* verification) {
  const DofMap& vel = spaces.velocity;
  std::map<int, double> cmap;

  if (verification != nullptr && verification->dirichlet_velocity) {
    std::set<int> bnodes;
    for (const auto& f : mesh.boundary_facets)
      for (int n : vel.facet_nodes(f)) bnodes.insert(n);
    for (int n : bnodes) {
      const Vec2 val = verification->dirichlet_velocity(vel.node_position(mesh, n));
      cmap[vel.dof(n, 0)] = val.x();
      cmap[vel.dof(n, 1)] = val.y();
    }
    std::vector<std::pair<int, double>> out(cmap.begin(), cmap.end());
    return out;
  }

  // Slip on the outer Darcy boundary: the normal component vanishes. Facets
  // must be axis-aligned so the constraint is a per-component Dirichlet one.
  if (model == ModelKind::Darcy2D) {
    for (const auto& f : mesh.boundary_facets) {
      if (f.marker != FacetMarker::ChannelWall) continue;
      auto [len, normal] = facet_geometry(mesh, f);
      int comp;
      if (std::abs(std::abs(normal.x()) - 1.0) < 1e-9)
        comp = 0;
      else if (std::abs(std::abs(normal.y()) - 1.0) < 1e-9)
        comp = 1;
      else
        throw std::runtime_error("darcy2d: outer Darcy boundary facet is not axis-aligned");
      for (int n : vel.facet_nodes(f)) cmap[vel.dof(n, comp)] = 0.0;
    }
  }

  const InflowProfile prof = inflow_profile(mesh, params, model);
  for (int n : vel.marker_nodes(FacetMarker::Inlet)) {
    const Vec2 val = prof.value(vel.node_position(mesh, n));
    cmap[vel.dof(n, 0)] = val.x();
    cmap[vel.dof(n, 1)] = val.y();
  }

  auto no_slip = [&](FacetMarker marker) {
    for (int n : vel.marker_nodes(marker)) {
      cmap[vel.dof(n, 0)] = 0.0;
      cmap[vel.dof(n, 1)] = 0.0;
    }
  };
  no_slip(FacetMarker::Wall);
  if (model == ModelKind::Full2D) no_slip(FacetMarker::ChannelWall);

  return {cmap.begin(), cmap.end()};
}

}  // namespace

StokesOperator build_stokes_operator(const Mesh& mesh, const Spaces& spaces,
                                     const PhysicalParams& params, ModelKind model,
                                     const DarcyParams* darcy, const Verification* verification) {
  const DofMap& vel = spaces.velocity;
  const DofMap& sca = spaces.scalar;
  const int n_vel = vel.n_dofs();
  const int n = n_vel + sca.n_dofs();
  SystemBuilder builder(n);
  const auto& quad = TriQuadrature::degree4();

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const RegionCoeffs rc = region_coeffs(params, model, darcy, mesh.cell_markers[c]);
    const auto unodes = vel.cell_nodes(c);
    const auto pnodes = sca.cell_nodes(c);

    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det;
      const auto& l = quad.bary[q];
      const auto nval = P2Basis::values(l);
      const auto bg = P2Basis::bary_gradients(l);
      std::array<Vec2, 6> ngrad;
      for (int i = 0; i < 6; ++i) {
        ngrad[i] = Vec2::Zero();
        for (int k = 0; k < 3; ++k) ngrad[i] += bg[i][k] * geo.grad_bary[k];
      }

      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          const double visc_mass = rc.visc * ngrad[i].dot(ngrad[j]);
          const double iso = rc.drag_iso * nval[i] * nval[j];
          for (int comp = 0; comp < 2; ++comp)
            builder.add(vel.dof(unodes[i], comp), vel.dof(unodes[j], comp), w * (visc_mass + iso));
          if (rc.has_drag_mat) {
            const double m = nval[i] * nval[j];
            for (int ci = 0; ci < 2; ++ci)
              for (int cj = 0; cj < 2; ++cj)
                builder.add(vel.dof(unodes[i], ci), vel.dof(unodes[j], cj),
                            w * m * rc.drag_mat(ci, cj));
          }
        }
        // pressure coupling, both blocks
        for (int j = 0; j < 3; ++j) {
          for (int comp = 0; comp < 2; ++comp) {
            const double entry = -rc.pres * l[j] * ngrad[i][comp];
            builder.add(vel.dof(unodes[i], comp), n_vel + pnodes[j], w * entry);
            builder.add(n_vel + pnodes[j], vel.dof(unodes[i], comp), w * entry);
          }
        }
        if (verification != nullptr && verification->body_force_velocity) {
          Vec2 xq = Vec2::Zero();
          const auto& t = mesh.triangles[c];
          for (int k = 0; k < 3; ++k) xq += l[k] * mesh.vertices[t[k]];
          const Vec2 f = verification->body_force_velocity(xq);
          builder.add_rhs(vel.dof(unodes[i], 0), w * nval[i] * f.x());
          builder.add_rhs(vel.dof(unodes[i], 1), w * nval[i] * f.y());
        }
      }
    }
  }

  StokesOperator op;
  op.n_vel = n_vel;
  op.constraints = stokes_constraints(mesh, spaces, params, model, verification);
  if (verification != nullptr && verification->pin_pressure)
    op.constraints.emplace_back(n_vel + 0, verification->pin_pressure_value);
  op.system = builder.build();
  apply_dirichlet(op.system, op.constraints);
  op.solver = std::make_shared<DirectSolver>(op.system);
  return op;
}

double cell_diameter(const Mesh& mesh, int cell) {
  const auto& t = mesh.triangles[cell];
  const Vec2& a = mesh.vertices[t[0]];
  const Vec2& b = mesh.vertices[t[1]];
  const Vec2& c = mesh.vertices[t[2]];
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

double cell_average_speed(const Spaces& spaces, const Eigen::VectorXd& velocity, int cell) {
  const auto& quad = TriQuadrature::degree4();
  double speed = 0.0;
  for (int q = 0; q < quad.n_points; ++q)
    speed += 2.0 * quad.weights[q] * eval_p2_vector(spaces.velocity, velocity, cell, quad.bary[q]).norm();
  return speed;
}

double supg_tau(double speed, double h_cell, double conv, double diff) {
  if (!(speed > 0.0) || !(h_cell > 0.0)) return 0.0;
  if (!(diff > 0.0)) return h_cell / (2.0 * speed);
  const double pe = speed * h_cell * conv / (2.0 * diff);
  double factor;
  if (pe < 1e-4)
    factor = pe / 3.0 - pe * pe * pe / 45.0;
  else
    factor = 1.0 / std::tanh(pe) - 1.0 / pe;
  return h_cell / (2.0 * speed) * factor;
}

namespace {

SparseSystem assemble_temperature(const Mesh& mesh, const Spaces& spaces,
                                  const PhysicalParams& params, ModelKind model,
                                  const DarcyParams* darcy, const SupgConfig& supg,
                                  const Eigen::VectorXd& velocity,
                                  const Verification* verification) {
  const DofMap& sca = spaces.scalar;
  SystemBuilder builder(sca.n_dofs());
  const auto& quad = TriQuadrature::degree4();

  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto geo = cell_geometry(mesh, c);
    const RegionCoeffs rc = region_coeffs(params, model, darcy, mesh.cell_markers[c]);
    const auto nodes = sca.cell_nodes(c);
    const auto& t = mesh.triangles[c];

    double tau = 0.0;
    if (supg.enabled) {
      const double speed = cell_average_speed(spaces, velocity, c);
      tau = supg_tau(speed, cell_diameter(mesh, c), rc.conv, rc.diff);
    }

    for (int q = 0; q < quad.n_points; ++q) {
      const double w = quad.weights[q] * geo.det;
      const auto& l = quad.bary[q];
      const Vec2 uq = eval_p2_vector(spaces.velocity, velocity, c, l);
      Vec2 xq = Vec2::Zero();
      for (int k = 0; k < 3; ++k) xq += l[k] * mesh.vertices[t[k]];
      const double f_T =
          (verification != nullptr && verification->body_force_temperature)
              ? verification->body_force_temperature(xq)
              : 0.0;

      for (int i = 0; i < 3; ++i) {
        const double test_supg = tau * uq.dot(geo.grad_bary[i]);
        for (int j = 0; j < 3; ++j) {
          double entry = rc.diff * geo.grad_bary[i].dot(geo.grad_bary[j]);
          entry += rc.conv * uq.dot(geo.grad_bary[j]) * l[i];
          entry += rc.react * l[i] * l[j];
          entry += test_supg * (rc.conv * uq.dot(geo.grad_bary[j]) + rc.react * l[j]);
          builder.add(nodes[i], nodes[j], w * entry);
        }
        double rhs = rc.react * params.T_wall * l[i] + f_T * l[i];
        rhs += test_supg * (rc.react * params.T_wall + f_T);
        builder.add_rhs(nodes[i], w * rhs);
      }
    }
  }

  // Robin wall term h*alpha*(T - T_wall).
  const auto& fq = FacetQuadrature::gauss3();
  const double ha = params.height * params.alpha;
  for (const auto& f : mesh.boundary_facets) {
    if (!robin_marker(model, f.marker)) continue;
    auto [len, normal] = facet_geometry(mesh, f);
    const std::array<int, 2> nodes{f.v[0], f.v[1]};
    for (int q = 0; q < fq.n_points; ++q) {
      const double w = fq.weights[q] * len;
      const double t1 = fq.points[q];
      const std::array<double, 2> nv{1.0 - t1, t1};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) builder.add(nodes[i], nodes[j], w * ha * nv[i] * nv[j]);
        builder.add_rhs(nodes[i], w * ha * params.T_wall * nv[i]);
      }
    }
  }

  SparseSystem sys = builder.build();

  std::map<int, double> cmap;
  if (verification != nullptr && verification->dirichlet_temperature) {
    std::set<int> bnodes;
    for (const auto& f : mesh.boundary_facets)
      for (int n : sca.facet_nodes(f)) bnodes.insert(n);
    for (int n : bnodes) cmap[n] = verification->dirichlet_temperature(sca.node_position(mesh, n));
  } else {
    for (int n : sca.marker_nodes(FacetMarker::Inlet)) cmap[n] = params.T_in;
  }
  std::vector<std::pair<int, double>> constraints(cmap.begin(), cmap.end());
  apply_dirichlet(sys, constraints);
  return sys;
}

}  // namespace

StateSolution solve_state(const Mesh& mesh, const Spaces& spaces, const PhysicalParams& params,
                          ModelKind model, const DarcyParams* darcy, const SupgConfig& supg,
                          const Verification* verification, StokesOperator* keep_stokes) {
  StokesOperator op = build_stokes_operator(mesh, spaces, params, model, darcy, verification);
  const Eigen::VectorXd up = op.solver->solve();

  StateSolution state;
  state.velocity = up.head(op.n_vel);
  state.pressure = up.tail(spaces.scalar.n_dofs());

  const SparseSystem temp =
      assemble_temperature(mesh, spaces, params, model, darcy, supg, state.velocity, verification);
  state.temperature = solve_direct(temp);

  if (!state.velocity.allFinite() || !state.pressure.allFinite() || !state.temperature.allFinite())
    throw std::runtime_error("solve_state: non-finite solution");
  if (keep_stokes != nullptr) *keep_stokes = std::move(op);
  return state;
}

double boundary_mass_flux(const Mesh& mesh, const Spaces& spaces, const StateSolution& state,
                          const PhysicalParams& params, ModelKind model, FacetMarker marker) {
  const auto& fq = FacetQuadrature::gauss3();
  double flux = 0.0;
  for (const auto& f : mesh.boundary_facets) {
    if (f.marker != marker) continue;
    auto [len, normal] = facet_geometry(mesh, f);
    const auto fnodes = spaces.velocity.facet_nodes(f);
    for (int q = 0; q < fq.n_points; ++q) {
      const auto nv = facet_p2_values(fq.points[q]);
      Vec2 u = Vec2::Zero();
      for (int i = 0; i < 3; ++i) {
        u.x() += nv[i] * state.velocity[spaces.velocity.dof(fnodes[i], 0)];
        u.y() += nv[i] * state.velocity[spaces.velocity.dof(fnodes[i], 1)];
      }
      flux += fq.weights[q] * len * u.dot(normal);
    }
  }
  return params.rho * flux_thickness_factor(params, model) * flux;
}

std::vector<double> channel_mass_fluxes(const Mesh& mesh, const Spaces& spaces,
                                        const StateSolution& state, const PhysicalParams& params,
                                        ModelKind model, int n_bins) {
  const RegionKind block_kind =
      model == ModelKind::Full2D ? RegionKind::Channel : RegionKind::Darcy;
  int n_out;
  if (model == ModelKind::Full2D) {
    n_out = mesh.n_channels();
    if (n_out == 0) throw std::runtime_error("channel_mass_fluxes: mesh has no channels");
  } else {
    if (n_bins < 1) throw std::runtime_error("channel_mass_fluxes: darcy2d needs n_bins >= 1");
    n_out = n_bins;
  }

  double xlo = 1e300, xhi = -1e300;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_markers[c].kind != block_kind) continue;
    for (int v : mesh.triangles[c]) {
      xlo = std::min(xlo, mesh.vertices[v].x());
      xhi = std::max(xhi, mesh.vertices[v].x());
    }
  }
  if (!(xhi > xlo)) throw std::runtime_error("channel_mass_fluxes: empty block region");

  auto flux_index = [&](int cell) {
    if (model == ModelKind::Full2D) return mesh.cell_markers[cell].channel;
    const double cx = mesh.cell_centroid(cell).x();
    return std::clamp(static_cast<int>((cx - xlo) / (xhi - xlo) * n_out), 0, n_out - 1);
  };

  // The P1 plateau chi is 0 on the inlet manifold, 1 on the outlet manifold,
  // and transitions across each channel's own mid-length cut, so arbitrarily
  // translated channels keep their transition band inside the block. Each
  // cell integral of u.grad(chi) is a band-averaged cross-section flux, and
  // the per-channel sums are exactly mass-conservative against the discrete
  // divergence constraint.
  std::vector<double> ext_lo(n_out, 1e300), ext_hi(n_out, -1e300);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_markers[c].kind != block_kind) continue;
    const int g = flux_index(c);
    for (int v : mesh.triangles[c]) {
      ext_lo[g] = std::min(ext_lo[g], mesh.vertices[v].y());
      ext_hi[g] = std::max(ext_hi[g], mesh.vertices[v].y());
    }
  }
  std::vector<double> cut(n_out);
  for (int g = 0; g < n_out; ++g) {
    if (ext_lo[g] > ext_hi[g])
      throw std::runtime_error("channel_mass_fluxes: cut line misses the channel region");
    cut[g] = 0.5 * (ext_lo[g] + ext_hi[g]);
  }

  std::vector<signed char> chi(mesh.n_vertices(), -1);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    if (mesh.cell_markers[c].kind != block_kind) continue;
    const double ycut = cut[flux_index(c)];
    for (int v : mesh.triangles[c]) chi[v] = mesh.vertices[v].y() >= ycut ? 1 : 0;
  }
  // Manifold nodes take the value of their side: 0 where connected to the
  // inlet, 1 where connected to the outlet (flood fill over non-block cells).
  {
    std::map<std::pair<int, int>, std::array<int, 2>> edge_cells;
    for (int c = 0; c < mesh.n_cells(); ++c) {
      if (mesh.cell_markers[c].kind == block_kind) continue;
      const auto& t = mesh.triangles[c];
      for (int e = 0; e < 3; ++e) {
        auto& slot = edge_cells[std::minmax(t[e], t[(e + 1) % 3])];
        if (slot[0] == 0 && slot[1] == 0) slot = {c + 1, 0};
        else slot[1] = c + 1;
      }
    }
    std::vector<std::vector<int>> adj(mesh.n_cells());
    for (const auto& [edge, cells] : edge_cells)
      if (cells[0] > 0 && cells[1] > 0) {
        adj[cells[0] - 1].push_back(cells[1] - 1);
        adj[cells[1] - 1].push_back(cells[0] - 1);
      }
    std::vector<signed char> side(mesh.n_cells(), -1);
    std::vector<int> stack;
    auto seed = [&](FacetMarker marker, signed char value) {
      for (const auto& f : mesh.boundary_facets)
        if (f.marker == marker && side[f.cell] < 0) {
          side[f.cell] = value;
          stack.push_back(f.cell);
        }
      while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        for (int n : adj[c])
          if (side[n] < 0) {
            side[n] = value;
            stack.push_back(n);
          }
      }
    };
    seed(FacetMarker::Inlet, 0);
    seed(FacetMarker::Outlet, 1);
    for (int c = 0; c < mesh.n_cells(); ++c) {
      if (mesh.cell_markers[c].kind == block_kind || side[c] < 0) continue;
      for (int v : mesh.triangles[c]) chi[v] = side[c];
    }
  }

  const double scale = params.rho * flux_thickness_factor(params, model);
  const auto& quad = TriQuadrature::degree4();
  std::vector<double> fluxes(n_out, 0.0);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const auto& t = mesh.triangles[c];
    if (chi[t[0]] == chi[t[1]] && chi[t[1]] == chi[t[2]]) continue;
    const auto& marker = mesh.cell_markers[c];
    if (marker.kind != block_kind)
      throw std::runtime_error("channel_mass_fluxes: cut line misses the channel region");
    const auto geo = cell_geometry(mesh, c);
    Vec2 grad_chi = Vec2::Zero();
    for (int k = 0; k < 3; ++k) grad_chi += static_cast<double>(chi[t[k]]) * geo.grad_bary[k];
    Vec2 u_int = Vec2::Zero();
    for (int q = 0; q < quad.n_points; ++q)
      u_int += quad.weights[q] * geo.det *
               eval_p2_vector(spaces.velocity, state.velocity, c, quad.bary[q]);
    fluxes[flux_index(c)] += scale * u_int.dot(grad_chi);
  }
  return fluxes;
}

}  // namespace mcs
