#include "shrinkflow/builtin_meshes.hpp"

#include <cmath>
#include <cstdint>
#include <map>

namespace shrinkflow {

namespace {

struct IcoBuilder {
  std::vector<Vec3> pos;
  std::vector<std::array<int, 3>> tris;
  std::vector<int> origin;
  std::map<std::pair<int, int>, int> midpoint;

  int mid(int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec3 m = (pos[a] + pos[b]).normalized();
    pos.push_back(m);
    midpoint.emplace(key, static_cast<int>(pos.size()) - 1);
    return static_cast<int>(pos.size()) - 1;
  }
};

}  // namespace

TriangulatedHypersurface icosphere(int subdiv, double radius) {
  if (subdiv < 0 || subdiv > 7) fail(ErrorCode::BadParams, "icosphere subdiv must be in [0,7]");
  if (!(radius > 0)) fail(ErrorCode::BadParams, "icosphere radius must be positive");

  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  IcoBuilder b;
  b.pos = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
  };
  for (auto& p : b.pos) p.normalize();
  // Outward-oriented icosahedron faces.
  b.tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };
  b.origin.resize(b.tris.size());
  for (size_t i = 0; i < b.tris.size(); ++i) b.origin[i] = static_cast<int>(i);

  for (int level = 0; level < subdiv; ++level) {
    std::vector<std::array<int, 3>> next;
    std::vector<int> next_origin;
    next.reserve(b.tris.size() * 4);
    next_origin.reserve(b.tris.size() * 4);
    for (size_t f = 0; f < b.tris.size(); ++f) {
      const auto [v0, v1, v2] = b.tris[f];
      const int a = b.mid(v0, v1);
      const int c = b.mid(v1, v2);
      const int e = b.mid(v2, v0);
      next.push_back({v0, a, e});
      next.push_back({v1, c, a});
      next.push_back({v2, e, c});
      next.push_back({a, c, e});
      for (int k = 0; k < 4; ++k) next_origin.push_back(b.origin[f]);
    }
    b.tris = std::move(next);
    b.origin = std::move(next_origin);
    b.midpoint.clear();
  }

  for (auto& p : b.pos) p *= radius;
  return TriangulatedHypersurface::from_data(std::move(b.pos), std::move(b.tris),
                                             std::move(b.origin));
}

TriangulatedHypersurface ellipsoid(double a, double b, double c, int subdiv) {
  if (!(a > 0 && b > 0 && c > 0)) fail(ErrorCode::BadParams, "ellipsoid semi-axes must be positive");
  auto sphere = icosphere(subdiv, 1.0);
  std::vector<Vec3> pos = sphere.positions();
  for (auto& p : pos) {
    p[0] *= a;
    p[1] *= b;
    p[2] *= c;
  }
  auto tris = sphere.topology().triangles;
  auto origin = sphere.topology().face_origin;
  return TriangulatedHypersurface::from_data(std::move(pos), std::move(tris), std::move(origin));
}

}  // namespace shrinkflow
