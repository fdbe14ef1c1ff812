#include "mcshape/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mcs {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& pointer, const std::string& what) {
  throw std::runtime_error("config error at " + pointer + ": " + what);
}

template <typename T>
void read_field(const json& obj, const std::string& pointer, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(pointer + "/" + key, e.what());
  }
}

void read_physical(const json& obj, PhysicalParams& p) {
  const std::string ptr = "/physical";
  read_field(obj, ptr, "mu", p.mu);
  read_field(obj, ptr, "rho", p.rho);
  read_field(obj, ptr, "kappa", p.kappa);
  read_field(obj, ptr, "cp", p.cp);
  read_field(obj, ptr, "m_in", p.m_in);
  read_field(obj, ptr, "T_in", p.T_in);
  read_field(obj, ptr, "T_wall", p.T_wall);
  read_field(obj, ptr, "alpha", p.alpha);
  read_field(obj, ptr, "h", p.height);
}

void read_generator(const json& obj, GeneratorParams& g) {
  const std::string ptr = "/mesh/generator";
  read_field(obj, ptr, "n_channels", g.n_channels);
  read_field(obj, ptr, "channel_width", g.channel_width);
  read_field(obj, ptr, "channel_gap", g.channel_gap);
  read_field(obj, ptr, "channel_length", g.channel_length);
  read_field(obj, ptr, "inlet_manifold_depth", g.inlet_manifold_depth);
  read_field(obj, ptr, "outlet_manifold_depth", g.outlet_manifold_depth);
  read_field(obj, ptr, "inlet_width", g.inlet_width);
  read_field(obj, ptr, "outlet_width", g.outlet_width);
  read_field(obj, ptr, "target_cell_size", g.target_cell_size);
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error("", e.what());
  }
  RunConfig cfg;

  if (root.contains("model")) {
    const std::string model = root.at("model").get<std::string>();
    if (model == "full2d")
      cfg.model = ModelKind::Full2D;
    else if (model == "darcy2d")
      cfg.model = ModelKind::Darcy2D;
    else
      config_error("/model", "expected \"full2d\" or \"darcy2d\", got \"" + model + "\"");
  }

  if (root.contains("mesh")) {
    const json& mesh = root.at("mesh");
    if (mesh.contains("path") && mesh.contains("generator"))
      config_error("/mesh", "give either path or generator, not both");
    if (mesh.contains("path")) cfg.mesh_path = mesh.at("path").get<std::string>();
    if (mesh.contains("generator")) read_generator(mesh.at("generator"), cfg.generator);
  }

  if (root.contains("physical")) read_physical(root.at("physical"), cfg.physical);

  if (root.contains("darcy")) {
    DarcyParams d;
    const json& obj = root.at("darcy");
    read_field(obj, "/darcy", "phi", d.phi);
    read_field(obj, "/darcy", "k_hat", d.k_hat);
    read_field(obj, "/darcy", "h_fs", d.h_fs);
    read_field(obj, "/darcy", "eps_relax", d.eps_relax);
    if (obj.contains("channel_axis")) {
      const auto axis = obj.at("channel_axis").get<std::vector<double>>();
      if (axis.size() != 2) config_error("/darcy/channel_axis", "expected a 2-vector");
      d.channel_axis = Vec2(axis[0], axis[1]);
    }
    cfg.darcy = d;
  }

  if (root.contains("cost")) {
    const json& obj = root.at("cost");
    const bool has_abs = obj.contains("q_des");
    const bool has_rel = obj.contains("q_des_relative");
    if (has_abs && has_rel) config_error("/cost", "exactly one of q_des and q_des_relative");
    if (has_abs) cfg.q_des = obj.at("q_des").get<double>();
    if (has_rel) cfg.q_des_relative = obj.at("q_des_relative").get<double>();
  }

  if (root.contains("elasticity")) {
    const json& obj = root.at("elasticity");
    read_field(obj, "/elasticity", "mu_elas", cfg.elasticity.mu_elas);
    read_field(obj, "/elasticity", "lambda_elas", cfg.elasticity.lambda_elas);
    read_field(obj, "/elasticity", "delta", cfg.elasticity.delta);
    read_field(obj, "/elasticity", "c_aniso", cfg.elasticity.c_aniso);
  }

  if (root.contains("optimizer")) {
    const json& obj = root.at("optimizer");
    read_field(obj, "/optimizer", "sigma", cfg.optimizer.sigma);
    read_field(obj, "/optimizer", "t0", cfg.optimizer.t0);
    read_field(obj, "/optimizer", "eps_rel", cfg.optimizer.eps_rel);
    read_field(obj, "/optimizer", "max_iter", cfg.optimizer.max_iter);
    read_field(obj, "/optimizer", "max_linesearch", cfg.optimizer.max_linesearch);
  }

  read_field(root, "", "supg", cfg.supg);
  read_field(root, "", "output_dir", cfg.output_dir);

  if (root.contains("verification")) {
    const std::string mode = root.at("verification").value("body_force", "off");
    if (mode == "off")
      cfg.verification = VerificationMode::Off;
    else if (mode == "manufactured")
      cfg.verification = VerificationMode::Manufactured;
    else
      config_error("/verification/body_force", "expected \"off\" or \"manufactured\"");
  }

  // Cross-field invariants.
  if (cfg.model == ModelKind::Darcy2D && !cfg.darcy)
    config_error("/darcy", "required for model darcy2d");
  if (cfg.model == ModelKind::Full2D && cfg.darcy)
    config_error("/darcy", "only valid for model darcy2d");
  try {
    cfg.physical.validate();
    if (cfg.darcy) cfg.darcy->validate();
    cfg.elasticity.validate();
    cfg.optimizer.validate();
    if (cfg.mesh_path.empty()) cfg.generator.validate();
  } catch (const std::exception& e) {
    config_error("", e.what());
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& c) {
  json root;
  root["model"] = c.model == ModelKind::Full2D ? "full2d" : "darcy2d";
  if (!c.mesh_path.empty()) {
    root["mesh"]["path"] = c.mesh_path;
  } else {
    json g;
    g["n_channels"] = c.generator.n_channels;
    g["channel_width"] = c.generator.channel_width;
    g["channel_gap"] = c.generator.channel_gap;
    g["channel_length"] = c.generator.channel_length;
    g["inlet_manifold_depth"] = c.generator.inlet_manifold_depth;
    g["outlet_manifold_depth"] = c.generator.outlet_manifold_depth;
    g["inlet_width"] = c.generator.inlet_width;
    g["outlet_width"] = c.generator.outlet_width;
    g["target_cell_size"] = c.generator.target_cell_size;
    root["mesh"]["generator"] = g;
  }
  json p;
  p["mu"] = c.physical.mu;
  p["rho"] = c.physical.rho;
  p["kappa"] = c.physical.kappa;
  p["cp"] = c.physical.cp;
  p["m_in"] = c.physical.m_in;
  p["T_in"] = c.physical.T_in;
  p["T_wall"] = c.physical.T_wall;
  p["alpha"] = c.physical.alpha;
  p["h"] = c.physical.height;
  root["physical"] = p;
  if (c.darcy) {
    json d;
    d["phi"] = c.darcy->phi;
    d["k_hat"] = c.darcy->k_hat;
    d["h_fs"] = c.darcy->h_fs;
    d["eps_relax"] = c.darcy->eps_relax;
    d["channel_axis"] = {c.darcy->channel_axis.x(), c.darcy->channel_axis.y()};
    root["darcy"] = d;
  }
  if (c.q_des)
    root["cost"]["q_des"] = *c.q_des;
  else
    root["cost"]["q_des_relative"] = c.q_des_relative;
  json e;
  e["mu_elas"] = c.elasticity.mu_elas;
  e["lambda_elas"] = c.elasticity.lambda_elas;
  e["delta"] = c.elasticity.delta;
  e["c_aniso"] = c.elasticity.c_aniso;
  root["elasticity"] = e;
  json o;
  o["sigma"] = c.optimizer.sigma;
  o["t0"] = c.optimizer.t0;
  o["eps_rel"] = c.optimizer.eps_rel;
  o["max_iter"] = c.optimizer.max_iter;
  o["max_linesearch"] = c.optimizer.max_linesearch;
  root["optimizer"] = o;
  root["supg"] = c.supg;
  root["output_dir"] = c.output_dir;
  root["verification"]["body_force"] =
      c.verification == VerificationMode::Off ? "off" : "manufactured";
  return root.dump(2);
}

Mesh RunConfig::build_mesh() const {
  if (!mesh_path.empty()) return load_msh(mesh_path, physical.height, model);
  return generate_manifold(generator, physical.height, model);
}

}  // namespace mcs
