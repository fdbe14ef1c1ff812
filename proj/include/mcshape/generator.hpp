#pragma once

#include "mcshape/mesh.hpp"
#include "mcshape/msh_io.hpp"

namespace mcs {

/// Parameters of the built-in manifold/channel mesh generator. Defaults give
/// the 8-channel desk-scale cooler used throughout the tests; the channel
/// width/gap pair is chosen so the resolved channels and the homogenized
/// porous block have the same hydraulic resistance, and the wide
/// channels plus deep manifolds keep the block's interfacial heat exchange
/// close to the resolved walls' as well.
struct GeneratorParams {
  int n_channels = 8;
  double channel_width = 3e-3;
  double channel_gap = 3.67e-3;
  double channel_length = 6e-3;
  double inlet_manifold_depth = 1.8e-2;
  double outlet_manifold_depth = 1.8e-2;
  double inlet_width = 6e-3;
  double outlet_width = 6e-3;
  double target_cell_size = 9e-4;

  double total_width() const {
    return n_channels * channel_width + (n_channels + 1) * channel_gap;
  }
  void validate() const;
};

/// Structured triangulation of an inlet manifold, n parallel channels along
/// +y, and an outlet manifold. The inlet sits on the left edge of the lower
/// manifold, the outlet on the right edge of the upper one. For Darcy meshes
/// the channel block is one homogenized region spanning the full width.
Mesh generate_manifold(const GeneratorParams& params, double height,
                       ModelKind model = ModelKind::Full2D);

/// Structured rectangle [0,width] x [0,depth]: left edge Inlet, right edge
/// Outlet, bottom/top Wall, all cells Fluid. Used by tests and the
/// manufactured-solution study.
Mesh generate_rectangle(int nx, int ny, double width, double depth, double height);

}  // namespace mcs
