#pragma once

#include <optional>
#include <vector>

#include "shrinkflow/mesh.hpp"

namespace shrinkflow {

/// Locally shortest polyline across triangles. Interior points lie on edges;
/// unfolding consecutive triangles about shared edges makes it straight.
struct GeodesicPath {
  std::vector<SurfacePoint> points;  // start, edge crossings..., end
  double length = 0;
  TangentVector start_tangent;  // unit direction of departure at the start
  TangentVector end_tangent;    // unit direction of travel at arrival
  double max_deviation = 0;     // radians, after shortening converged
  std::vector<int> strip;       // triangle corridor, points.size()-1 entries

  Vec3 point_at_arclength(const TriangulatedHypersurface& mesh, double s) const;
};

struct GeodesicOptions {
  bool check_ambiguity = true;
  /// Skip the second-corridor search when the first candidate is shorter
  /// than this (uniqueness certified by an injectivity-radius proxy).
  double ambiguity_skip_below = 0;
  double ambiguity_rel_tol = 1e-6;
  int max_sweeps = 4000;
};

/// Dijkstra-seeded iterative unfolding/shortening. Throws AmbiguousGeodesic
/// when a second straightened candidate ties within the relative tolerance
/// (near the cut locus).
GeodesicPath minimal_geodesic(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                              const SurfacePoint& q, const GeodesicOptions& opts = {});

/// Length of the shortest straightened candidate; tolerates cut-locus ties.
double intrinsic_distance(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                          const SurfacePoint& q);

/// Transports `v` along the path by composing the dihedral rotations of the
/// crossed edges. Norm-preserving; throws BaseMismatch if `v` is not based
/// at the path start.
TangentVector parallel_transport(const TriangulatedHypersurface& mesh, const GeodesicPath& path,
                                 const TangentVector& v);

struct WalkResult {
  SurfacePoint end;
  Eigen::Matrix3d transport = Eigen::Matrix3d::Identity();
  int crossings = 0;
};

/// Discrete exponential map: straight walk of length |v| from p, crossing
/// edges by unfolding. Throws StepTooLong past half the mesh diameter.
WalkResult walk_exponential(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                            const TangentVector& v);

/// Containing triangle of an ambient point on a convex mesh via central
/// projection from the centroid (used for CLI start-point parsing and tests).
SurfacePoint locate_on_convex(const TriangulatedHypersurface& mesh, const Vec3& ambient);

}  // namespace shrinkflow
