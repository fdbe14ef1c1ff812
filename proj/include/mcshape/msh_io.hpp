#pragma once

#include <string>

#include "mcshape/mesh.hpp"

namespace mcs {

enum class ModelKind { Full2D, Darcy2D };

/// Reads a Gmsh MSH 2.2 ASCII file. Physical line tags: 1=Inlet, 2=Outlet,
/// 3=Wall, 4=ChannelWall (outer Darcy boundary for darcy meshes). Surface
/// tags: 10=Fluid and 11+k=channel k for full2d, 11=Darcy for darcy2d.
/// Clockwise triangles are repaired; `height` comes from the caller, not the
/// file.
Mesh load_msh(const std::string& path, double height, ModelKind model = ModelKind::Full2D);

}  // namespace mcs
