#pragma once

#include <optional>
#include <string>

#include "mcshape/generator.hpp"
#include "mcshape/optimizer.hpp"

namespace mcs {

enum class VerificationMode { Off, Manufactured };

/// One JSON document drives a run; flags are reserved for the subcommand,
/// --config and --output-dir.
struct RunConfig {
  ModelKind model = ModelKind::Full2D;
  std::string mesh_path;  // empty: use the generator
  GeneratorParams generator;
  PhysicalParams physical;
  std::optional<DarcyParams> darcy;
  std::optional<double> q_des;  // absolute [W]; else relative increment
  double q_des_relative = 0.05;
  ElasticityConfig elasticity;
  OptimizerConfig optimizer;
  bool supg = true;
  std::string output_dir = "out";
  VerificationMode verification = VerificationMode::Off;

  Mesh build_mesh() const;
  const DarcyParams* darcy_ptr() const { return darcy ? &*darcy : nullptr; }
};

/// Parses and validates; errors carry JSON-pointer paths.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

/// Serializes with every default materialized; parse(serialize(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace mcs
