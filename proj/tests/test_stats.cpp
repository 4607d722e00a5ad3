#include <doctest.h>

#include <cmath>

#include "shrinkflow/builtin_meshes.hpp"
#include "shrinkflow/rng.hpp"
#include "shrinkflow/stats.hpp"

using namespace shrinkflow;

TEST_CASE("Kolmogorov survival function reference values") {
  CHECK(kolmogorov_survival(1.36) == doctest::Approx(0.0505).epsilon(0.02));
  CHECK(kolmogorov_survival(1.63) == doctest::Approx(0.0102).epsilon(0.05));
  CHECK(kolmogorov_survival(0.0) == 1.0);
}

TEST_CASE("one-sample KS accepts its own distribution and rejects shifts") {
  RngStream rng(42);
  std::vector<double> u(4000);
  for (auto& x : u) x = rng.uniform();
  auto ok = ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ok.p_value > 0.01);
  auto bad = ks_test(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); });
  CHECK(bad.p_value < 1e-6);
}

TEST_CASE("two-sample KS") {
  RngStream a(1), b(2);
  std::vector<double> xa(3000), xb(3000), xc(3000);
  for (auto& x : xa) x = a.normal();
  for (auto& x : xb) x = b.normal();
  for (auto& x : xc) x = b.normal() + 0.25;
  CHECK(ks_test_two_sample(xa, xb).p_value > 0.01);
  CHECK(ks_test_two_sample(xa, xc).p_value < 1e-6);
}

TEST_CASE("linear fit recovers an exact line") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(0.1 * i);
    y.push_back(3.0 - 2.0 * 0.1 * i);
  }
  auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("moment summary z-scores") {
  std::vector<double> xs(10000);
  RngStream rng(9);
  for (auto& x : xs) x = 2.0 * rng.normal();
  auto s = summarize(xs);
  CHECK(std::abs(s.z_score()) < 3.0);
  CHECK(s.variance == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("vertex histograms and total variation") {
  auto mesh = icosphere(2, 1.0);
  auto u = VertexHistogram::uniform(mesh);
  CHECK(u.mass.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tv_vertexwise(u.mass, u.mass) == 0.0);

  auto bins = coarse_partition(mesh);
  CHECK(partition_size(bins) == 20);  // icosahedron provenance
  CHECK(tv_binned(u.mass, u.mass, bins) == 0.0);

  // a point mass against uniform has TV close to 1
  std::vector<SurfacePoint> pts(1);
  pts[0].triangle = 0;
  pts[0].bary = Vec3(1, 0, 0);
  auto h = VertexHistogram::from_points(mesh, pts);
  CHECK(h.mass.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tv_vertexwise(h.mass, u.mass) > 0.9);
  CHECK(tv_binned(h.mass, u.mass, bins) > 0.85);
  // binned TV lower-bounds the per-vertex TV
  CHECK(tv_binned(h.mass, u.mass, bins) <= tv_vertexwise(h.mass, u.mass) + 1e-12);
}

TEST_CASE("BFS fallback partition covers every vertex") {
  // strip the provenance by rebuilding the topology without face origins
  auto mesh = icosphere(3, 1.0);
  auto bare = TriangulatedHypersurface::from_data(mesh.positions(), mesh.topology().triangles);
  auto bins = coarse_partition(bare, 16);
  const int nb = partition_size(bins);
  CHECK(nb >= 8);
  for (int b : bins) CHECK(b >= 0);
}

TEST_CASE("sphere angular heat kernel CDF") {
  // long time: uniform on the sphere, CDF(theta) = (1 - cos theta)/2
  CHECK(sphere_angle_cdf(M_PI / 2, 50.0, 0.5) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sphere_angle_cdf(M_PI / 3, 50.0, 0.5) == doctest::Approx(0.25).epsilon(1e-6));
  // short time: matches the flat Rayleigh law, CDF = 1 - exp(-th^2/(4 a t))
  const double a = 0.5, t = 1e-3;
  for (double th : {0.02, 0.05, 0.1}) {
    const double rayleigh = 1.0 - std::exp(-th * th / (4.0 * a * t));
    CHECK(sphere_angle_cdf(th, t, a) == doctest::Approx(rayleigh).epsilon(5e-3));
  }
  // monotone in theta
  double prev = 0;
  for (double th = 0.05; th < M_PI; th += 0.05) {
    const double c = sphere_angle_cdf(th, 0.2, 0.5);
    CHECK(c >= prev - 1e-14);
    prev = c;
  }
}
