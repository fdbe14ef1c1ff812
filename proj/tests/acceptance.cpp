// Acceptance suite: end-to-end checks of the shipped toolkit on the default
// 8-channel geometry at the default coolant/porous parameters. Prints one PASS/FAIL
// line per criterion; the exit status is the number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "mcshape/optimizer.hpp"
#include "mcshape/verify.hpp"

using namespace mcs;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& details) {
  std::printf("criterion %d [%s]: %s  (%s)\n", id, name, pass ? "PASS" : "FAIL", details.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double cov(const std::vector<double>& v) {
  double mean = 0, var = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size())) / std::abs(mean);
}

}  // namespace

int main() {
  const GeneratorParams geometry;  // default 8-channel manifold
  const PhysicalParams params;     // default coolant
  const DarcyParams darcy;         // default porous block
  const Mesh full_mesh = generate_manifold(geometry, params.height);
  const Mesh darcy_mesh = generate_manifold(geometry, params.height, ModelKind::Darcy2D);
  std::printf("default geometry: %d cells (full2d), %d cells (darcy2d)\n", full_mesh.n_cells(),
              darcy_mesh.n_cells());

  // --- 1. shape-derivative correctness -------------------------------------
  {
    PhysicalParams diffusive = params;
    diffusive.kappa *= 100.0;
    const unsigned seed = 2024;
    const FdCheck fd_full = fd_gradient_check(full_mesh, diffusive, ModelKind::Full2D, nullptr, 5, seed);
    const FdCheck fd_darcy =
        fd_gradient_check(darcy_mesh, diffusive, ModelKind::Darcy2D, &darcy, 5, seed);

    std::vector<double> slopes_full, slopes_darcy;
    for (unsigned k = 0; k < 5; ++k) {
      slopes_full.push_back(
          taylor_remainder_check(full_mesh, params, ModelKind::Full2D, nullptr, SupgConfig{true}, seed + k)
              .slope);
      slopes_darcy.push_back(taylor_remainder_check(darcy_mesh, params, ModelKind::Darcy2D, &darcy,
                                                    SupgConfig{true}, seed + k)
                                 .slope);
    }
    const double med_full = median(slopes_full), med_darcy = median(slopes_darcy);
    const bool pass = fd_full.max_rel_error <= 1e-3 && fd_darcy.max_rel_error <= 1e-3 &&
                      med_full >= 1.8 && med_darcy >= 1.8;
    report(1, "shape derivative", pass,
           fmt("fd rel err full2d %.2e, darcy2d %.2e (<= 1e-3); taylor slope median full2d %.2f, "
               "darcy2d %.2f (>= 1.8, supg on)",
               fd_full.max_rel_error, fd_darcy.max_rel_error, med_full, med_darcy));
  }

  // --- 2. discretization orders --------------------------------------------
  {
    const ConvergenceResult conv = manufactured_convergence();
    const bool pass = std::abs(conv.velocity_order - 3.0) <= 0.3 &&
                      std::abs(conv.pressure_order - 2.0) <= 0.3 &&
                      std::abs(conv.temperature_order - 2.0) <= 0.3;
    report(2, "discretization orders", pass,
           fmt("velocity %.2f (3.0+-0.3), pressure %.2f (2.0+-0.3), temperature %.2f (2.0+-0.3)",
               conv.velocity_order, conv.pressure_order, conv.temperature_order));
  }

  // --- 3. conservation ------------------------------------------------------
  {
    bool pass = true;
    std::string details;
    for (int m = 0; m < 2; ++m) {
      const ModelKind model = m == 0 ? ModelKind::Full2D : ModelKind::Darcy2D;
      const Mesh& mesh = m == 0 ? full_mesh : darcy_mesh;
      Spaces spaces(mesh);
      const StateSolution state = solve_state(mesh, spaces, params, model,
                                              m == 0 ? nullptr : &darcy, SupgConfig{true});
      const double in = boundary_mass_flux(mesh, spaces, state, params, model, FacetMarker::Inlet);
      const double out = boundary_mass_flux(mesh, spaces, state, params, model, FacetMarker::Outlet);
      const auto fluxes =
          channel_mass_fluxes(mesh, spaces, state, params, model, geometry.n_channels);
      double sum = 0;
      for (double f : fluxes) sum += f;
      const double balance = std::abs(in + out) / std::abs(in);
      const double channel_sum = std::abs(sum + in) / std::abs(in);
      pass = pass && balance <= 1e-8 && channel_sum <= 1e-6;
      details += fmt("%s balance %.2e (<= 1e-8), channel sum %.2e (<= 1e-6)%s",
                     m == 0 ? "full2d" : "darcy2d", balance, channel_sum, m == 0 ? "; " : "");
    }
    report(3, "mass conservation", pass, details);
  }

  // --- 4-6. optimizer behavior, flow uniformity, heat tracking --------------
  {
    OptimizerConfig opt;  // sigma 1e-4, eps_rel 1e-3
    opt.max_iter = 30;
    ElasticityConfig elas;  // mu 1, lambda 0.1, delta 0.1, C 1e5

    std::vector<double> initial_fluxes;
    auto grab = [&](int iter, const Mesh& mesh, const Spaces& spaces, const StateSolution& state) {
      if (iter == 0)
        initial_fluxes = channel_mass_fluxes(mesh, spaces, state, params, ModelKind::Full2D);
    };
    const RunResult res = run(full_mesh, params, ModelKind::Full2D, nullptr, SupgConfig{true}, elas,
                              opt, std::nullopt, 0.05, grab);
    const auto& rec = res.history.records;

    bool monotone = true;
    for (size_t k = 1; k < rec.size(); ++k) monotone = monotone && rec[k].J <= rec[k - 1].J;
    monotone = monotone && res.final_cost.J <= rec.back().J;
    double min_rel = 1.0;
    for (const auto& r : rec) min_rel = std::min(min_rel, r.grad_norm_rel);
    const bool pass4 = monotone && rec.front().grad_norm_rel == 1.0 && min_rel < 0.1;
    report(4, "optimizer behavior", pass4,
           fmt("J %.3f -> %.3f %s, grad_norm_rel[0] = %g, min grad_norm_rel %.3f (< 0.1) in %zu "
               "iterations",
               rec.front().J, res.final_cost.J, monotone ? "non-increasing" : "NOT monotone",
               rec.front().grad_norm_rel, min_rel, rec.size()));

    Spaces final_spaces(res.mesh);
    const auto final_fluxes =
        channel_mass_fluxes(res.mesh, final_spaces, res.final_state, params, ModelKind::Full2D);
    const double cov0 = cov(initial_fluxes), cov1 = cov(final_fluxes);
    report(5, "flow uniformity", cov1 <= 0.5 * cov0,
           fmt("flux cov %.4f -> %.4f, ratio %.3f (<= 0.5)", cov0, cov1, cov1 / cov0));

    const double q0 = rec.front().Q;
    const double q_des = 1.05 * q0;
    const double closure = std::abs(res.final_cost.Q - q_des) / std::abs(q0 - q_des);
    report(6, "heat tracking", closure <= 0.5,
           fmt("Q %.4f W -> %.4f W toward Q_des %.4f W, residual ratio %.3f (<= 0.5)", q0,
               res.final_cost.Q, q_des, closure));
  }

  // --- 7. model agreement ----------------------------------------------------
  {
    RunConfig full_cfg;
    full_cfg.generator = geometry;
    RunConfig darcy_cfg;
    darcy_cfg.model = ModelKind::Darcy2D;
    darcy_cfg.darcy = darcy;
    darcy_cfg.generator = geometry;
    const CompareResult res = compare_models(full_cfg, darcy_cfg);
    const bool pass = res.pressure.l2 <= 0.05 && res.temperature.l2 <= 0.10;
    report(7, "model agreement", pass,
           fmt("pressure L2 diff %.4f (<= 0.05), temperature L2 diff %.4f (<= 0.10)",
               res.pressure.l2, res.temperature.l2));
  }

  // --- 8. gate equations ------------------------------------------------------
  {
    const double j_old = 1.0, t = 0.5, descent = -2.0, sigma = 1e-4;
    const bool armijo_boundary = armijo_accept(j_old, j_old + sigma * t * descent, t, descent, sigma) &&
                                 !armijo_accept(j_old, j_old, t, descent, sigma);
    Mat2 dv = Mat2::Zero();
    dv(0, 0) = 1.0;  // ||Dv||_F = 1, det(I + t Dv) = 1 + t
    const bool frobenius = quality_frobenius_ok(dv, 0.3) &&
                           !quality_frobenius_ok(dv, std::nextafter(0.3, 1.0));
    const bool det_bounds = quality_det_ok(dv, 1.0) && !quality_det_ok(dv, 1.0 + 1e-12) &&
                            quality_det_ok(dv, -0.5) && !quality_det_ok(dv, -0.5 - 1e-12);
    const bool stop_eq = stopping(1e-3, 1.0, 1e-3) && !stopping(1e-3 + 1e-18, 1e0, 1e-3) &&
                         stopping(0.0, 1.0, 1e-3) && stopping(1.0, 0.0, 1e-3);
    const bool pass = armijo_boundary && frobenius && det_bounds && stop_eq;
    report(8, "gate equations", pass,
           fmt("armijo boundary %s, frobenius 0.3 %s, det bounds [1/2,2] %s, stopping equality %s",
               armijo_boundary ? "ok" : "bad", frobenius ? "ok" : "bad", det_bounds ? "ok" : "bad",
               stop_eq ? "ok" : "bad"));
  }

  // --- 9. descent identity -----------------------------------------------------
  {
    bool pass = true;
    std::string details;
    for (int m = 0; m < 2; ++m) {
      const ModelKind model = m == 0 ? ModelKind::Full2D : ModelKind::Darcy2D;
      const Mesh& mesh = m == 0 ? full_mesh : darcy_mesh;
      const DarcyParams* dp = m == 0 ? nullptr : &darcy;
      Spaces spaces(mesh);
      StokesOperator stokes;
      const StateSolution state =
          solve_state(mesh, spaces, params, model, dp, SupgConfig{true}, nullptr, &stokes);
      const CostConfig cfg =
          make_cost_config(mesh, spaces, state, params, model, dp, std::nullopt, 0.05);
      const AdjointSolution adj =
          solve_adjoint(mesh, spaces, params, model, dp, SupgConfig{true}, state, cfg, &stokes);
      const Eigen::VectorXd dj =
          shape_derivative_functional(mesh, spaces, params, model, dp, state, adj, cfg);
      ElasticityConfig elas;
      elas.nu = relative_stiffness(mesh);
      const ShapeGradientResult grad = shape_gradient(mesh, dj, elas, model);
      const double lhs = -dj.dot(grad.field.values);  // dj[-G]
      const double rhs = -grad.norm * grad.norm;      // -a(G,G)
      const double rel = std::abs(lhs - rhs) / std::abs(rhs);
      pass = pass && lhs <= 0.0 && rel <= 1e-10;
      details += fmt("%s rel %.2e (<= 1e-10), sign %s%s", m == 0 ? "full2d" : "darcy2d", rel,
                     lhs <= 0 ? "ok" : "bad", m == 0 ? "; " : "");
    }
    report(9, "descent identity", pass, details);
  }

  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
