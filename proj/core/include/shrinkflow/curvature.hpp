#pragma once

#include <Eigen/SparseCore>
#include <memory>

#include "shrinkflow/mesh.hpp"

namespace shrinkflow {

/// Per-vertex {normal, mean curvature, Laplacian of the embedding}; the
/// discrete form of the identity that the surface Laplacian of the position
/// equals minus the mean curvature vector.
const VertexGeometry& mean_curvature_data(const TriangulatedHypersurface& mesh);

/// Cotangent stiffness matrix K (symmetric positive semidefinite, K*1 = 0)
/// and mixed-Voronoi lumped vertex areas. The discrete Laplace-Beltrami
/// operator is -diag(area)^{-1} K.
struct LaplaceOperators {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd lumped_area;
};

LaplaceOperators assemble_laplacian(const TriangulatedHypersurface& mesh);

/// Worst-case angle (degrees) between the Laplacian of the embedding and the
/// area-weighted outward normal over vertices; 180 means exactly opposed.
double min_laplace_normal_angle_deg(const TriangulatedHypersurface& mesh);

/// Max discrete Gaussian curvature (angle defect over lumped area).
double max_gaussian_curvature(const TriangulatedHypersurface& mesh);

std::shared_ptr<const VertexGeometry> detail_build_vertex_geometry(
    const TriangulatedHypersurface& mesh);

}  // namespace shrinkflow
