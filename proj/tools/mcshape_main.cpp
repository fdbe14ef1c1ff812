#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mcshape/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"2D microchannel cooler solver and shape optimizer"};
  app.require_subcommand(1);

  std::string config_path, config_b_path, output_dir;

  CLI::App* solve = app.add_subcommand("solve", "solve the state system and write fields");
  CLI::App* optimize = app.add_subcommand("optimize", "run the shape optimization loop");
  CLI::App* verify = app.add_subcommand("verify", "run convergence, gradient and Taylor checks");
  CLI::App* compare = app.add_subcommand("compare", "compare two model configurations");

  for (CLI::App* sub : {solve, optimize, verify, compare}) {
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--output-dir", output_dir, "override the configured output directory");
  }
  compare->add_option("--config-b", config_b_path, "second configuration (compared model)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    mcs::RunConfig config = mcs::load_config_file(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (solve->parsed()) {
      mcs::cmd_solve(config);
    } else if (optimize->parsed()) {
      mcs::cmd_optimize(config);
    } else if (verify->parsed()) {
      mcs::cmd_verify(config);
    } else if (compare->parsed()) {
      mcs::RunConfig other = mcs::load_config_file(config_b_path);
      if (!output_dir.empty()) other.output_dir = output_dir;
      mcs::cmd_compare(config, other);
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
