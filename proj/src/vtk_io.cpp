#include "mcshape/vtk_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mcs {

namespace {

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("rename failed: " + path + " (" + std::strerror(errno) + ")");
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  atomic_write(path, content);
}

void write_vtk(const std::string& path, const Mesh& mesh, const Spaces* spaces,
               const StateSolution* state) {
  std::string out;
  out.reserve(static_cast<size_t>(mesh.n_vertices()) * 80);
  out += "# vtk DataFile Version 3.0\n";
  out += "mcshape state\n";
  out += "ASCII\n";
  out += "DATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(mesh.n_vertices()) + " double\n";
  for (const auto& v : mesh.vertices) {
    append_number(out, v.x());
    out += ' ';
    append_number(out, v.y());
    out += " 0\n";
  }
  out += "CELLS " + std::to_string(mesh.n_cells()) + " " + std::to_string(4 * mesh.n_cells()) + "\n";
  for (const auto& t : mesh.triangles)
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  out += "CELL_TYPES " + std::to_string(mesh.n_cells()) + "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) out += "5\n";

  out += "CELL_DATA " + std::to_string(mesh.n_cells()) + "\n";
  out += "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const auto& m : mesh.cell_markers) {
    int id = 10;
    if (m.kind == RegionKind::Channel) id = 11 + m.channel;
    if (m.kind == RegionKind::Darcy) id = 11;
    out += std::to_string(id) + "\n";
  }

  if (spaces != nullptr && state != nullptr) {
    out += "POINT_DATA " + std::to_string(mesh.n_vertices()) + "\n";
    out += "VECTORS velocity double\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      append_number(out, state->velocity[spaces->velocity.dof(v, 0)]);
      out += ' ';
      append_number(out, state->velocity[spaces->velocity.dof(v, 1)]);
      out += " 0\n";
    }
    out += "SCALARS pressure double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      append_number(out, state->pressure[v]);
      out += '\n';
    }
    out += "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      append_number(out, state->temperature[v]);
      out += '\n';
    }
  }
  atomic_write(path, out);
}

void write_history_csv(const std::string& path, const OptimizationHistory& history) {
  std::string out = "iter,J,J1,J2,J3,Q,grad_norm,grad_norm_rel,step,n_backtracks\n";
  for (const auto& r : history.records) {
    out += std::to_string(r.iter);
    for (double v : {r.J, r.J1, r.J2, r.J3, r.Q, r.grad_norm, r.grad_norm_rel, r.step}) {
      out += ',';
      append_number(out, v);
    }
    out += ',' + std::to_string(r.n_backtracks) + '\n';
  }
  atomic_write(path, out);
}

}  // namespace mcs
