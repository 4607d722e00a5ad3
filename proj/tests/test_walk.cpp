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

TangentVector tangent_at(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                         const Vec3& raw, double length) {
  TangentVector v;
  v.base = p;
  Vec3 d = mesh.project_to_plane(p.triangle, raw);
  v.dir = d.normalized() * length;
  return v;
}

}  // namespace

TEST_CASE("zero step is the identity") {
  auto mesh = icosphere(3, 1.0);
  auto p = at_direction(mesh, Vec3(0.3, 0.5, 0.81));
  TangentVector v;
  v.base = p;
  v.dir = Vec3::Zero();
  auto res = walk_exponential(mesh, p, v);
  CHECK((mesh.ambient(res.end) - mesh.ambient(p)).norm() <= 1e-15);
  CHECK(res.crossings == 0);
}

TEST_CASE("base mismatch is rejected") {
  auto mesh = icosphere(3, 1.0);
  auto p = at_direction(mesh, Vec3(1, 0, 0));
  auto q = at_direction(mesh, Vec3(0, 1, 0));
  TangentVector v;
  v.base = q;
  v.dir = mesh.project_to_plane(q.triangle, Vec3(0, 0, 1));
  bool threw = false;
  try {
    (void)walk_exponential(mesh, p, v);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == ErrorCode::BaseMismatch);
  }
  CHECK(threw);
}

TEST_CASE("overlong steps are rejected") {
  auto mesh = icosphere(3, 1.0);
  auto p = at_direction(mesh, Vec3(1, 0.1, 0.1));
  auto v = tangent_at(mesh, p, Vec3(0, 1, 0), 0.26 * M_PI * mesh.diameter_hint());
  bool threw = false;
  try {
    (void)walk_exponential(mesh, p, v);
  } catch (const Error& e) {
    threw = true;
    CHECK(e.code() == ErrorCode::StepTooLong);
  }
  CHECK(threw);
}

TEST_CASE("walk forward then back returns to the start") {
  auto mesh = icosphere(4, 1.0);
  RngStream rng(3);
  for (int it = 0; it < 10; ++it) {
    Vec3 dir(rng.normal(), rng.normal(), rng.normal());
    auto p = at_direction(mesh, Vec3(rng.normal(), rng.normal(), rng.normal()));
    const double len = 0.3 + 0.2 * rng.uniform();
    auto v = tangent_at(mesh, p, dir, len);
    auto out = walk_exponential(mesh, p, v);
    // transported direction, negated
    Vec3 back_dir = -(out.transport * v.dir.normalized());
    TangentVector back;
    back.base = out.end;
    back.dir = mesh.project_to_plane(out.end.triangle, back_dir).normalized() * len;
    auto home = walk_exponential(mesh, out.end, back);
    const double miss = intrinsic_distance(mesh, home.end, p);
    CHECK(miss <= 1e-9);
  }
}

TEST_CASE("walked distance equals the step length") {
  auto mesh = icosphere(5, 1.0);
  RngStream rng(17);
  for (int it = 0; it < 6; ++it) {
    auto p = at_direction(mesh, Vec3(rng.normal(), rng.normal(), rng.normal()));
    const double len = 0.2 + 0.3 * rng.uniform();
    auto v = tangent_at(mesh, p, Vec3(rng.normal(), rng.normal(), rng.normal()), len);
    auto out = walk_exponential(mesh, p, v);
    const double dist = intrinsic_distance(mesh, p, out.end);
    CHECK(dist == doctest::Approx(len).epsilon(2e-3));
  }
}

TEST_CASE("quarter-turn walk from the pole lands on the equator") {
  auto mesh = icosphere(5, 1.0);
  auto pole = at_direction(mesh, Vec3(0.02, 0.013, 1.0));  // generic near-pole point
  const Vec3 start = mesh.ambient(pole);
  auto v = tangent_at(mesh, pole, Vec3(1, 0.2, 0), M_PI / 2);
  auto out = walk_exponential(mesh, pole, v);
  const Vec3 y = mesh.ambient(out.end);
  // latitude relative to the start's polar axis
  const double lat = M_PI / 2 - std::acos(std::clamp(y.dot(start.normalized()), -1.0, 1.0));
  CHECK(std::abs(lat) <= 1e-2);
}

TEST_CASE("transport along a walk preserves norms exactly") {
  auto mesh = icosphere(4, 1.0);
  auto p = at_direction(mesh, Vec3(0.4, -0.8, 0.45));
  auto v = tangent_at(mesh, p, Vec3(0, 1, 1), 0.8);
  auto out = walk_exponential(mesh, p, v);
  Vec3 w = mesh.project_to_plane(p.triangle, Vec3(0.3, 0.4, -0.1));
  Vec3 moved = out.transport * w;
  CHECK(moved.norm() == doctest::Approx(w.norm()).epsilon(1e-12));
  // arrival vector lies in the arrival plane
  CHECK(std::abs(moved.dot(mesh.triangle_normal(out.end.triangle))) <= 1e-9 * moved.norm());
}

TEST_CASE("path inside one triangle leaves vectors unchanged") {
  auto mesh = icosphere(2, 1.0);
  SurfacePoint p;
  p.triangle = 7;
  p.bary = Vec3(0.6, 0.25, 0.15);
  SurfacePoint q;
  q.triangle = 7;
  q.bary = Vec3(0.2, 0.5, 0.3);
  auto path = minimal_geodesic(mesh, p, q);
  TangentVector v;
  v.base = p;
  v.dir = mesh.project_to_plane(7, Vec3(0.1, -0.2, 0.3));
  auto moved = parallel_transport(mesh, path, v);
  CHECK((moved.dir - v.dir).norm() <= 1e-14);
}

TEST_CASE("transport around a spherical triangle picks up the enclosed area") {
  auto mesh = icosphere(5, 1.0);
  // generic spherical triangle, well inside the injectivity radius
  const Vec3 a = Vec3(1.0, 0.15, 0.1).normalized();
  const Vec3 b = Vec3(0.2, 1.0, 0.12).normalized();
  const Vec3 c = Vec3(0.1, 0.2, 1.0).normalized();
  auto pa = at_direction(mesh, a), pb = at_direction(mesh, b), pc = at_direction(mesh, c);

  auto leg1 = minimal_geodesic(mesh, pa, pb);
  auto leg2 = minimal_geodesic(mesh, pb, pc);
  auto leg3 = minimal_geodesic(mesh, pc, pa);

  TangentVector v;
  v.base = pa;
  v.dir = leg1.start_tangent.dir;  // unit tangent at a
  auto v1 = parallel_transport(mesh, leg1, v);
  v1.base = leg2.points.front();
  v1.base.triangle = leg2.strip.front();
  v1.dir = mesh.project_to_plane(v1.base.triangle, v1.dir);
  auto v2 = parallel_transport(mesh, leg2, v1);
  v2.base = leg3.points.front();
  v2.base.triangle = leg3.strip.front();
  v2.dir = mesh.project_to_plane(v2.base.triangle, v2.dir);
  auto v3 = parallel_transport(mesh, leg3, v2);

  // norm preserved through the three legs
  CHECK(v3.dir.norm() == doctest::Approx(1.0).epsilon(1e-9));

  // holonomy angle vs exact spherical excess (Gauss-Bonnet oracle computed
  // from the exact sphere triangle with vertices a, b, c)
  auto angle_at = [](const Vec3& x, const Vec3& y, const Vec3& z) {
    const Vec3 ty = (y - x * x.dot(y)).normalized();
    const Vec3 tz = (z - x * x.dot(z)).normalized();
    return std::acos(std::clamp(ty.dot(tz), -1.0, 1.0));
  };
  const double excess = angle_at(a, b, c) + angle_at(b, c, a) + angle_at(c, a, b) - M_PI;

  Vec3 ref = mesh.project_to_plane(pa.triangle, v.dir).normalized();
  Vec3 got = mesh.project_to_plane(pa.triangle, v3.dir).normalized();
  const double holonomy = std::acos(std::clamp(ref.dot(got), -1.0, 1.0));
  CHECK(holonomy == doctest::Approx(excess).epsilon(0.05));
}
