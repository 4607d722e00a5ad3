#include <doctest.h>

#include <cmath>

#include "shrinkflow/builtin_meshes.hpp"
#include "shrinkflow/mesh.hpp"

using namespace shrinkflow;

namespace {

TriangulatedHypersurface regular_tetrahedron(double edge) {
  const double s = edge / (2.0 * std::sqrt(2.0));
  std::vector<Vec3> pos = {
      {s, s, s}, {s, -s, -s}, {-s, s, -s}, {-s, -s, s}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return TriangulatedHypersurface::from_data(std::move(pos), std::move(tris));
}

}  // namespace

TEST_CASE("icosphere construction counts") {
  auto ico = icosphere(0, 1.0);
  CHECK(ico.n_vertices() == 12);
  CHECK(ico.n_triangles() == 20);

  auto s4 = icosphere(4, 1.0);
  CHECK(s4.n_vertices() == 2562);  // 10*4^k + 2
  for (const auto& p : s4.positions()) CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(icosphere(8, 1.0), Error);
  CHECK_THROWS_AS(icosphere(3, -1.0), Error);
}

TEST_CASE("closed manifold invariants") {
  auto mesh = icosphere(2, 1.0);
  const auto& topo = mesh.topology();
  // every edge shared by exactly two triangles
  for (const auto& e : topo.edges) {
    CHECK(e.tri[0] >= 0);
    CHECK(e.tri[1] >= 0);
  }
  // Euler characteristic of the sphere
  CHECK(topo.n_vertices - static_cast<int>(topo.edges.size()) + topo.n_triangles() == 2);
  CHECK(mesh.signed_volume() > 0);
}

TEST_CASE("lumped areas sum to the total area") {
  for (int subdiv : {1, 2, 3}) {
    auto mesh = icosphere(subdiv, 1.0);
    const auto& vg = mesh.vertex_geometry();
    double sum = 0;
    for (double a : vg.vertex_area) sum += a;
    CHECK(sum == doctest::Approx(mesh.total_area()).epsilon(1e-12));
  }
}

TEST_CASE("non-manifold input is rejected") {
  // two triangles sharing an edge plus a third on the same edge
  std::vector<Vec3> pos = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}, {0, 2, 4}};
  bool threw = false;
  try {
    TriangulatedHypersurface::from_data(std::move(pos), std::move(tris));
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == ErrorCode::NonManifold);
  }
  CHECK(threw);
}

TEST_CASE("degenerate triangle is rejected") {
  auto base = regular_tetrahedron(1.0);
  auto pos = base.positions();
  pos[0] = pos[1];  // collapse an edge
  bool threw = false;
  try {
    TriangulatedHypersurface::from_data(pos, base.topology().triangles);
  } catch (const Error& e) {
    threw = true;
    CHECK((e.code() == ErrorCode::Degenerate || e.code() == ErrorCode::NonManifold));
  }
  CHECK(threw);
}

TEST_CASE("edge metric: regular tetrahedron and homothety") {
  auto tet = regular_tetrahedron(1.0);
  auto m = edge_metric(tet);
  CHECK(m.lengths.size() == 6);
  for (double l : m.lengths) CHECK(l == doctest::Approx(1.0).epsilon(1e-12));

  // homothety scales all lengths exactly
  const double lambda = 2.75;
  auto pos = tet.positions();
  for (auto& p : pos) p *= lambda;
  auto scaled = TriangulatedHypersurface(tet.topology_ptr(), pos);
  auto ms = edge_metric(scaled);
  for (size_t i = 0; i < m.lengths.size(); ++i)
    CHECK(ms.lengths[i] == doctest::Approx(lambda * m.lengths[i]).epsilon(1e-15));

  // icosphere quality ratio is a recorded mesh statistic
  auto s3 = icosphere(3, 1.0);
  auto m3 = edge_metric(s3);
  CHECK(m3.quality_ratio > 1.0);
  CHECK(m3.quality_ratio < 1.5);
}

TEST_CASE("convexity validation") {
  auto sphere = icosphere(4, 1.0);
  auto report = validate_convex_mesh(sphere);
  CHECK(report.strictly_convex);
  CHECK(report.min_dihedral_indicator > 0);

  auto ell = ellipsoid(1.0, 1.0, 1.5, 3);
  CHECK(validate_convex_mesh(ell).strictly_convex);

  // push one vertex inward: local concavity must be detected, and the
  // brute-force dihedral sign over all edges agrees
  auto pos = sphere.positions();
  pos[100] *= 0.8;
  auto dented = TriangulatedHypersurface(sphere.topology_ptr(), pos);
  auto bad = validate_convex_mesh(dented);
  CHECK_FALSE(bad.strictly_convex);
  CHECK(bad.min_dihedral_indicator < 0);
}

TEST_CASE("convex containment test") {
  auto sphere = icosphere(3, 1.0);
  CHECK(sphere.convex_contains(Vec3(0, 0, 0)));
  CHECK(sphere.convex_contains(Vec3(0.5, 0.3, -0.2)));
  CHECK_FALSE(sphere.convex_contains(Vec3(1.5, 0, 0)));
}
