#include <doctest.h>

#include <cmath>

#include "shrinkflow/builtin_meshes.hpp"
#include "shrinkflow/curvature.hpp"

using namespace shrinkflow;

namespace {

double max_relative_h_error(const TriangulatedHypersurface& mesh, double exact_h) {
  const auto& vg = mean_curvature_data(mesh);
  double worst = 0;
  for (double h : vg.mean_curvature) worst = std::max(worst, std::abs(h - exact_h) / exact_h);
  return worst;
}

}  // namespace

TEST_CASE("sphere mean curvature H = n/R") {
  // unit sphere, n = 2: H = 2 with <= 2% relative error at subdiv 5
  auto s5 = icosphere(5, 1.0);
  CHECK(max_relative_h_error(s5, 2.0) <= 2e-2);

  // radius 0.5: H = 4
  auto half = icosphere(4, 0.5);
  const auto& vg = mean_curvature_data(half);
  double mean_h = 0;
  for (double h : vg.mean_curvature) mean_h += h;
  mean_h /= half.n_vertices();
  CHECK(mean_h == doctest::Approx(4.0).epsilon(2e-2));
}

TEST_CASE("refinement decreases the curvature error monotonically") {
  double prev = std::numeric_limits<double>::infinity();
  for (int subdiv : {3, 4, 5}) {
    const double err = max_relative_h_error(icosphere(subdiv, 1.0), 2.0);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("Laplacian of the embedding points inward on convex surfaces") {
  for (int subdiv : {2, 3, 4}) {
    auto mesh = icosphere(subdiv, 1.0);
    CHECK(min_laplace_normal_angle_deg(mesh) >= 179.0);
  }
  CHECK(min_laplace_normal_angle_deg(ellipsoid(1, 1, 1.5, 4)) >= 179.0);
}

TEST_CASE("normal convention: outward, opposite the embedding Laplacian") {
  auto mesh = icosphere(3, 1.0);
  const auto& vg = mean_curvature_data(mesh);
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    // outward means pointing away from the origin on the sphere
    CHECK(vg.normal[v].dot(mesh.positions()[v]) > 0.9);
    CHECK(vg.normal[v].norm() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("stiffness matrix: symmetric, zero row sums, PSD diag") {
  auto mesh = icosphere(2, 1.0);
  auto ops = assemble_laplacian(mesh);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_vertices());
  CHECK((ops.stiffness * ones).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SparseMatrix<double> diff = Eigen::SparseMatrix<double>(ops.stiffness.transpose()) - ops.stiffness;
  CHECK(diff.coeffs().cwiseAbs().maxCoeff() < 1e-14);
  for (int v = 0; v < mesh.n_vertices(); ++v) CHECK(ops.stiffness.coeff(v, v) > 0);
}

TEST_CASE("discrete Gaussian curvature of spheres") {
  auto mesh = icosphere(4, 1.0);
  CHECK(max_gaussian_curvature(mesh) == doctest::Approx(1.0).epsilon(0.05));
  auto half = icosphere(4, 0.5);
  CHECK(max_gaussian_curvature(half) == doctest::Approx(4.0).epsilon(0.05));
}
