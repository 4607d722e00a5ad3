#include <doctest.h>

#include <cmath>

#include "shrinkflow/builtin_meshes.hpp"
#include "shrinkflow/geodesic.hpp"
#include "shrinkflow/rng.hpp"

using namespace shrinkflow;

namespace {

SurfacePoint at_direction(const TriangulatedHypersurface& mesh, const Vec3& dir) {
  return locate_on_convex(mesh, dir.normalized() * mesh.max_vertex_radius());
}

Vec3 random_direction(RngStream& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  while (v.norm() < 1e-3) v = Vec3(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

}  // namespace

TEST_CASE("quarter great circle on the unit sphere") {
  auto mesh = icosphere(5, 1.0);
  auto p = at_direction(mesh, Vec3(0.123, 0.456, 0.88));
  // rotate the direction by 90 degrees around a perpendicular axis
  const Vec3 d1 = Vec3(0.123, 0.456, 0.88).normalized();
  const Vec3 axis = d1.cross(Vec3::UnitX()).normalized();
  const Vec3 d2 = std::cos(M_PI / 2) * d1 + std::sin(M_PI / 2) * axis.cross(d1);
  auto q = at_direction(mesh, d2);
  auto path = minimal_geodesic(mesh, p, q);
  CHECK(path.length == doctest::Approx(M_PI / 2).epsilon(1e-2));
  CHECK(path.max_deviation <= 1e-8);
  // never shorter than the ambient chord
  CHECK(path.length >= (mesh.ambient(p) - mesh.ambient(q)).norm());
}

TEST_CASE("coincident endpoints give the trivial path") {
  auto mesh = icosphere(3, 1.0);
  auto p = at_direction(mesh, Vec3(1, 0.2, 0.1));
  auto path = minimal_geodesic(mesh, p, p);
  CHECK(path.length == 0.0);
}

TEST_CASE("antipodal points sit on the cut locus") {
  auto mesh = icosphere(4, 1.0);
  const Vec3 d(0.3, 0.75, 0.59);
  auto p = at_direction(mesh, d);
  auto q = at_direction(mesh, -d);
  CHECK_THROWS_AS((void)minimal_geodesic(mesh, p, q), Error);
  // distance remains well-defined near the cut locus
  const double dist = intrinsic_distance(mesh, p, q);
  CHECK(dist == doctest::Approx(M_PI).epsilon(2e-2));
}

TEST_CASE("length symmetry p<->q") {
  auto mesh = icosphere(4, 1.0);
  RngStream rng(11);
  for (int it = 0; it < 8; ++it) {
    auto p = at_direction(mesh, random_direction(rng));
    auto q = at_direction(mesh, random_direction(rng));
    const double dpq = intrinsic_distance(mesh, p, q);
    const double dqp = intrinsic_distance(mesh, q, p);
    CHECK(std::abs(dpq - dqp) <= 1e-8 * std::max(1.0, dpq));
  }
}

TEST_CASE("triangle inequality on random triples") {
  auto mesh = icosphere(3, 1.0);
  RngStream rng(5);
  for (int it = 0; it < 12; ++it) {
    auto a = at_direction(mesh, random_direction(rng));
    auto b = at_direction(mesh, random_direction(rng));
    auto c = at_direction(mesh, random_direction(rng));
    const double ab = intrinsic_distance(mesh, a, b);
    const double bc = intrinsic_distance(mesh, b, c);
    const double ac = intrinsic_distance(mesh, a, c);
    CHECK(ac <= ab + bc + 1e-6);
  }
}

TEST_CASE("geodesic lengths track the sphere oracle") {
  auto mesh = icosphere(5, 1.0);
  RngStream rng(23);
  for (int it = 0; it < 6; ++it) {
    const Vec3 u = random_direction(rng);
    const Vec3 v = random_direction(rng);
    const double angle = std::acos(std::clamp(u.dot(v), -1.0, 1.0));
    if (angle > 2.8 || angle < 0.2) continue;  // stay away from the cut locus
    const double dist = intrinsic_distance(mesh, at_direction(mesh, u), at_direction(mesh, v));
    CHECK(dist == doctest::Approx(angle).epsilon(1.5e-2));
  }
}

TEST_CASE("tangents are unit and aligned with travel direction") {
  auto mesh = icosphere(4, 1.0);
  auto p = at_direction(mesh, Vec3(1, 0.1, 0));
  auto q = at_direction(mesh, Vec3(0.2, 1, 0.1));
  auto path = minimal_geodesic(mesh, p, q);
  CHECK(path.start_tangent.dir.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(path.end_tangent.dir.norm() == doctest::Approx(1.0).epsilon(1e-10));
  // departure roughly toward q, arrival roughly from p
  CHECK(path.start_tangent.dir.dot(mesh.ambient(q) - mesh.ambient(p)) > 0);
  CHECK(path.end_tangent.dir.dot(mesh.ambient(q) - mesh.ambient(p)) > 0);
}
