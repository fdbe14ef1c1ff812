#include "mcshape/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "mcshape/vtk_io.hpp"

namespace mcs {

using nlohmann::json;

namespace {

std::string out_path(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.output_dir);
  return (std::filesystem::path(config.output_dir) / name).string();
}

json flux_json(const std::vector<double>& fluxes) {
  json arr = json::array();
  for (double f : fluxes) arr.push_back(f);
  return arr;
}

double coefficient_of_variation(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(v.size())) / std::abs(mean);
}

int darcy_bins(const RunConfig& config) {
  return config.generator.n_channels;
}

}  // namespace

void cmd_solve(const RunConfig& config) {
  const Mesh mesh = config.build_mesh();
  Spaces spaces(mesh);
  const SupgConfig supg{config.supg};
  const StateSolution state =
      solve_state(mesh, spaces, config.physical, config.model, config.darcy_ptr(), supg);
  const CostConfig cost_cfg = make_cost_config(mesh, spaces, state, config.physical, config.model,
                                               config.darcy_ptr(), config.q_des,
                                               config.q_des_relative);
  const CostValue cv =
      cost(mesh, spaces, state, cost_cfg, config.physical, config.model, config.darcy_ptr());
  const auto fluxes = channel_mass_fluxes(mesh, spaces, state, config.physical, config.model,
                                          darcy_bins(config));

  write_vtk(out_path(config, "state_0000.vtk"), mesh, &spaces, &state);

  json summary;
  summary["model"] = config.model == ModelKind::Full2D ? "full2d" : "darcy2d";
  summary["Q"] = cv.Q;
  summary["q_des"] = cost_cfg.q_des;
  summary["J"] = cv.J;
  summary["J1"] = cv.J1;
  summary["J2"] = cv.J2;
  summary["J3"] = cv.J3;
  summary["mass_flux_inlet"] =
      boundary_mass_flux(mesh, spaces, state, config.physical, config.model, FacetMarker::Inlet);
  summary["mass_flux_outlet"] =
      boundary_mass_flux(mesh, spaces, state, config.physical, config.model, FacetMarker::Outlet);
  summary["channel_fluxes"] = flux_json(fluxes);
  write_text_file(out_path(config, "summary.json"), summary.dump(2) + "\n");
}

void cmd_optimize(const RunConfig& config) {
  const Mesh mesh0 = config.build_mesh();
  const SupgConfig supg{config.supg};

  std::vector<double> initial_fluxes;
  auto writer = [&](int iter, const Mesh& mesh, const Spaces& spaces, const StateSolution& state) {
    char name[32];
    std::snprintf(name, sizeof(name), "mesh_%04d.vtk", iter);
    write_vtk(out_path(config, name), mesh, &spaces, &state);
    if (iter == 0)
      initial_fluxes = channel_mass_fluxes(mesh, spaces, state, config.physical, config.model,
                                           darcy_bins(config));
  };

  const RunResult result = run(mesh0, config.physical, config.model, config.darcy_ptr(), supg,
                               config.elasticity, config.optimizer, config.q_des,
                               config.q_des_relative, writer);
  write_history_csv(out_path(config, "history.csv"), result.history);

  Spaces final_spaces(result.mesh);
  const auto final_fluxes = channel_mass_fluxes(result.mesh, final_spaces, result.final_state,
                                                config.physical, config.model, darcy_bins(config));

  json summary;
  summary["model"] = config.model == ModelKind::Full2D ? "full2d" : "darcy2d";
  summary["termination"] = result.history.termination;
  summary["iterations"] = result.history.records.size();
  const auto& first = result.history.records.front();
  summary["initial"]["J"] = first.J;
  summary["initial"]["Q"] = first.Q;
  summary["initial"]["channel_fluxes"] = flux_json(initial_fluxes);
  summary["initial"]["flux_cov"] = coefficient_of_variation(initial_fluxes);
  summary["final"]["J"] = result.final_cost.J;
  summary["final"]["Q"] = result.final_cost.Q;
  summary["final"]["channel_fluxes"] = flux_json(final_fluxes);
  summary["final"]["flux_cov"] = coefficient_of_variation(final_fluxes);
  write_text_file(out_path(config, "summary.json"), summary.dump(2) + "\n");
}

void cmd_verify(const RunConfig& config) {
  json report;
  auto entry = [&](const char* name, double value, double lo, double hi) {
    const bool pass = value >= lo && value <= hi;
    report[name] = {{"value", value}, {"min", lo}, {"max", hi}, {"pass", pass}};
    std::printf("%-28s %12.5g   [%g, %g]   %s\n", name, value, lo, hi, pass ? "PASS" : "FAIL");
  };

  const ConvergenceResult conv = manufactured_convergence();
  entry("velocity_order", conv.velocity_order, 2.7, 3.3);
  entry("pressure_order", conv.pressure_order, 1.7, 2.3);
  entry("temperature_order", conv.temperature_order, 1.7, 2.3);

  PhysicalParams diffusive = config.physical;
  diffusive.kappa *= 100.0;
  const DarcyParams darcy = config.darcy.value_or(DarcyParams{});

  if (config.mesh_path.empty() || config.model == ModelKind::Full2D) {
    const Mesh mesh = config.mesh_path.empty()
                          ? generate_manifold(config.generator, config.physical.height)
                          : config.build_mesh();
    const FdCheck fd = fd_gradient_check(mesh, diffusive, ModelKind::Full2D, nullptr, 5, 2024);
    entry("fd_rel_error_full2d", fd.max_rel_error, 0.0, 1e-3);
    const TaylorCheck taylor =
        taylor_remainder_check(mesh, config.physical, ModelKind::Full2D, nullptr, SupgConfig{true}, 77);
    entry("taylor_slope_full2d", taylor.slope, 1.8, 1e300);
  }
  if (config.mesh_path.empty() || config.model == ModelKind::Darcy2D) {
    const Mesh mesh = config.mesh_path.empty()
                          ? generate_manifold(config.generator, config.physical.height,
                                              ModelKind::Darcy2D)
                          : config.build_mesh();
    const FdCheck fd = fd_gradient_check(mesh, diffusive, ModelKind::Darcy2D, &darcy, 5, 4048);
    entry("fd_rel_error_darcy2d", fd.max_rel_error, 0.0, 1e-3);
    const TaylorCheck taylor =
        taylor_remainder_check(mesh, config.physical, ModelKind::Darcy2D, &darcy, SupgConfig{true}, 77);
    entry("taylor_slope_darcy2d", taylor.slope, 1.8, 1e300);
  }

  write_text_file(out_path(config, "verify_report.json"), report.dump(2) + "\n");
}

void cmd_compare(const RunConfig& reference, const RunConfig& other) {
  const CompareResult res = compare_models(reference, other);
  std::string csv = "name,value\n";
  char line[96];
  auto add = [&](const char* name, double value) {
    std::snprintf(line, sizeof(line), "%s,%.17g\n", name, value);
    csv += line;
  };
  add("pressure_l2_rel", res.pressure.l2);
  add("pressure_linf_rel", res.pressure.linf);
  add("pressure_l1_rel", res.pressure.l1);
  add("temperature_l2_rel", res.temperature.l2);
  add("temperature_linf_rel", res.temperature.linf);
  add("temperature_l1_rel", res.temperature.l1);
  char name[32];
  for (size_t k = 0; k < res.flux_full.size(); ++k) {
    std::snprintf(name, sizeof(name), "flux_full_%zu", k);
    add(name, res.flux_full[k]);
  }
  for (size_t k = 0; k < res.flux_darcy.size(); ++k) {
    std::snprintf(name, sizeof(name), "flux_other_%zu", k);
    add(name, res.flux_darcy[k]);
  }
  write_text_file(out_path(reference, "compare.csv"), csv);
  std::printf("pressure  rel diff: L2 %.4g  Linf %.4g  L1 %.4g\n", res.pressure.l2,
              res.pressure.linf, res.pressure.l1);
  std::printf("temperature rel diff: L2 %.4g  Linf %.4g  L1 %.4g\n", res.temperature.l2,
              res.temperature.linf, res.temperature.l1);
}

}  // namespace mcs
