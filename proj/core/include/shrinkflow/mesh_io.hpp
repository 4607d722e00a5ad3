#pragma once

#include <filesystem>
#include <string>

#include "shrinkflow/mesh.hpp"

namespace shrinkflow {

TriangulatedHypersurface read_off(const std::filesystem::path& path);
void write_off(const std::filesystem::path& path, const TriangulatedHypersurface& mesh);

/// ASCII OBJ, triangle faces only.
TriangulatedHypersurface read_obj(const std::filesystem::path& path);

/// Dispatch on extension (.off / .obj).
TriangulatedHypersurface read_mesh(const std::filesystem::path& path);

}  // namespace shrinkflow
