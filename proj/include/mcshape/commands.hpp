#pragma once

#include "mcshape/config.hpp"
#include "mcshape/verify.hpp"

namespace mcs {

/// Command drivers behind the CLI subcommands. Each writes its artifacts
/// under config.output_dir.

/// Solves the configured state system; writes state_0000.vtk and
/// summary.json (Q, cost components, per-channel mass fluxes).
void cmd_solve(const RunConfig& config);

/// Runs the shape optimization; writes mesh_%04d.vtk per iterate,
/// history.csv, and summary.json with the termination reason.
void cmd_optimize(const RunConfig& config);

/// Runs the manufactured-solution convergence study plus the FD-gradient and
/// Taylor-remainder checks; writes verify_report.json. Failures are report
/// entries, not errors.
void cmd_verify(const RunConfig& config);

/// Solves both configurations and writes their field differences and flux
/// tables to compare.csv. The first config is the full-2D reference.
void cmd_compare(const RunConfig& reference, const RunConfig& other);

}  // namespace mcs
