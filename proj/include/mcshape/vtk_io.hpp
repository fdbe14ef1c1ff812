#pragma once

#include <string>

#include "mcshape/optimizer.hpp"

namespace mcs {

/// VTK legacy ASCII writer (unstructured grid, triangle cells). Velocity is
/// written as 3-component VECTORS with a zero z entry; pressure, temperature
/// and the region id accompany it when a state is given. Writes are atomic
/// (temp file + rename).
void write_vtk(const std::string& path, const Mesh& mesh, const Spaces* spaces = nullptr,
               const StateSolution* state = nullptr);

/// history.csv with the fixed header
/// iter,J,J1,J2,J3,Q,grad_norm,grad_norm_rel,step,n_backtracks.
void write_history_csv(const std::string& path, const OptimizationHistory& history);

/// Atomic write of arbitrary text.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mcs
