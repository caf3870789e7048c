#pragma once

#include "sll/geometry.hpp"

#include <iosfwd>
#include <string>

namespace sll {

// Line-based mesh format, first line `SLLMESH 1`:
//   nv nt nb
//   nv lines `x y`, nt lines `i j k`, nb lines `i j tag`
//   nc, then nc lines `edge_i edge_j mx my` (optional block)
// All indices are 0-based; floats carry 17 significant digits.
inline constexpr const char* kMeshMagic = "SLLMESH 1";

void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);

void write_mesh_file(const std::string& path, const Mesh& mesh);
Mesh read_mesh_file(const std::string& path);

/// Reads a polygon description: one `x y` pair per line, counterclockwise.
DomainSpec read_polygon_file(const std::string& path);

} // namespace sll
