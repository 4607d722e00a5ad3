#include "shrinkflow/mesh_io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace shrinkflow {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

// Next non-empty, non-comment line.
bool next_line(std::ifstream& in, std::string& line, char comment) {
  while (std::getline(in, line)) {
    size_t i = line.find_first_not_of(" \t\r\n");
    if (i == std::string::npos) continue;
    if (line[i] == comment) continue;
    return true;
  }
  return false;
}

}  // namespace

TriangulatedHypersurface read_off(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!next_line(in, line, '#')) fail(ErrorCode::IoError, "empty OFF file " + path.string());
  {
    std::istringstream ls(line);
    std::string magic;
    ls >> magic;
    if (magic != "OFF") fail(ErrorCode::IoError, "missing OFF header in " + path.string());
  }
  if (!next_line(in, line, '#')) fail(ErrorCode::IoError, "truncated OFF file");
  long nv = 0, nf = 0, ne = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> nv >> nf >> ne)) fail(ErrorCode::IoError, "bad OFF count line");
  }
  if (nv <= 0 || nf <= 0) fail(ErrorCode::IoError, "OFF file with no geometry");
  std::vector<Vec3> pos(nv);
  for (long v = 0; v < nv; ++v) {
    if (!next_line(in, line, '#')) fail(ErrorCode::IoError, "truncated OFF vertex block");
    std::istringstream ls(line);
    if (!(ls >> pos[v][0] >> pos[v][1] >> pos[v][2]))
      fail(ErrorCode::IoError, "bad OFF vertex line");
  }
  std::vector<std::array<int, 3>> tris(nf);
  for (long f = 0; f < nf; ++f) {
    if (!next_line(in, line, '#')) fail(ErrorCode::IoError, "truncated OFF face block");
    std::istringstream ls(line);
    int cnt = 0;
    if (!(ls >> cnt)) fail(ErrorCode::IoError, "bad OFF face line");
    if (cnt != 3) fail(ErrorCode::IoError, "only triangle faces are supported");
    if (!(ls >> tris[f][0] >> tris[f][1] >> tris[f][2]))
      fail(ErrorCode::IoError, "bad OFF face line");
  }
  return TriangulatedHypersurface::from_data(std::move(pos), std::move(tris));
}

void write_off(const std::filesystem::path& path, const TriangulatedHypersurface& mesh) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) fail(ErrorCode::IoError, "cannot write " + path.string());
  std::fprintf(f, "OFF\n%d %d 0\n", mesh.n_vertices(), mesh.n_triangles());
  for (const auto& p : mesh.positions())
    std::fprintf(f, "%.17g %.17g %.17g\n", p[0], p[1], p[2]);
  for (const auto& t : mesh.topology().triangles)
    std::fprintf(f, "3 %d %d %d\n", t[0], t[1], t[2]);
  std::fclose(f);
}

TriangulatedHypersurface read_obj(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> tris;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p[0] >> p[1] >> p[2])) fail(ErrorCode::IoError, "bad OBJ vertex line");
      pos.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> tri{};
      std::string tok;
      int k = 0;
      while (ls >> tok) {
        if (k >= 3) fail(ErrorCode::IoError, "only triangle faces are supported");
        // "i", "i/t", "i/t/n", "i//n": vertex index is the leading integer
        int idx = 0;
        auto res = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
        if (res.ec != std::errc()) fail(ErrorCode::IoError, "bad OBJ face token '" + tok + "'");
        if (idx < 0) idx = static_cast<int>(pos.size()) + idx + 1;  // negative = relative
        tri[k++] = idx - 1;
      }
      if (k != 3) fail(ErrorCode::IoError, "only triangle faces are supported");
      tris.push_back(tri);
    }
  }
  if (pos.empty() || tris.empty()) fail(ErrorCode::IoError, "OBJ file with no geometry");
  return TriangulatedHypersurface::from_data(std::move(pos), std::move(tris));
}

TriangulatedHypersurface read_mesh(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == ".off") return read_off(path);
  if (ext == ".obj") return read_obj(path);
  fail(ErrorCode::IoError, "unsupported mesh format: " + path.string());
}

}  // namespace shrinkflow
