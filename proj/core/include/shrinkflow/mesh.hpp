#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "shrinkflow/types.hpp"

namespace shrinkflow {

/// Connectivity of a closed oriented triangle mesh. Shared between all
/// time slices of a flow (the flow is Lagrangian, only positions change).
struct MeshTopology {
  struct Edge {
    int v0 = -1, v1 = -1;        // endpoint vertices, v0 < v1
    int tri[2] = {-1, -1};       // incident triangles
    int opp[2] = {-1, -1};       // local index of the opposite vertex in tri[k]
  };

  int n_vertices = 0;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Edge> edges;
  // tri_edges[t][k]: edge opposite local vertex k (spanning vertices k+1, k+2)
  std::vector<std::array<int, 3>> tri_edges;
  // tri_neighbors[t][k]: triangle across the edge opposite local vertex k
  std::vector<std::array<int, 3>> tri_neighbors;
  std::vector<std::vector<int>> vertex_triangles;
  // For generated meshes: index of the generating coarse face (icosahedron
  // face id), used for coarse histogram partitions. Empty if unknown.
  std::vector<int> face_origin;

  /// Builds the edge/adjacency tables. Throws NonManifold when an edge is not
  /// shared by exactly two triangles, or when orientations disagree.
  static std::shared_ptr<const MeshTopology> build(
      std::vector<std::array<int, 3>> triangles, int n_vertices,
      std::vector<int> face_origin = {});

  int n_triangles() const { return static_cast<int>(triangles.size()); }
  /// Local index (0..2) of vertex v in triangle t, or -1.
  int local_index(int t, int v) const;
  int edge_between(int t_a, int t_b) const;
};

struct VertexGeometry {
  std::vector<double> vertex_area;     // lumped (mixed Voronoi) area weights
  std::vector<Vec3> area_normal;       // area-weighted outward unit normal
  std::vector<Vec3> laplace_position;  // discrete Laplace-Beltrami of the embedding
  std::vector<double> mean_curvature;  // |laplace_position|
  std::vector<Vec3> normal;            // -laplace/|laplace|, falls back to area_normal
};

/// One time slice of an embedded surface: shared connectivity plus vertex
/// positions, with cached per-triangle and (lazily) per-vertex geometry.
/// Immutable after construction; safe for concurrent read access.
class TriangulatedHypersurface {
public:
  TriangulatedHypersurface(std::shared_ptr<const MeshTopology> topology,
                           std::vector<Vec3> positions);

  /// Builds connectivity and validates the structural invariants
  /// (closed 2-manifold, consistent outward orientation, positive areas).
  static TriangulatedHypersurface from_data(std::vector<Vec3> positions,
                                            std::vector<std::array<int, 3>> triangles,
                                            std::vector<int> face_origin = {});

  const MeshTopology& topology() const { return *topology_; }
  std::shared_ptr<const MeshTopology> topology_ptr() const { return topology_; }
  const std::vector<Vec3>& positions() const { return positions_; }
  int n_vertices() const { return topology_->n_vertices; }
  int n_triangles() const { return topology_->n_triangles(); }

  const Vec3& triangle_normal(int t) const { return tri_normals_[t]; }
  double triangle_area(int t) const { return tri_areas_[t]; }
  double total_area() const { return total_area_; }
  Vec3 centroid() const { return centroid_; }
  /// 2 * max distance from the area centroid; equals the diameter for
  /// centrally symmetric surfaces and bounds it from above for convex ones.
  double diameter_hint() const { return diameter_hint_; }
  double max_vertex_radius() const { return diameter_hint_ / 2.0; }
  double mean_edge_length() const;
  double min_edge_length() const;
  double edge_length(int e) const;

  Vec3 ambient(const SurfacePoint& p) const;
  /// Projects `v` into the plane of p's triangle.
  Vec3 project_to_plane(int triangle, const Vec3& v) const;
  /// Rotation carrying vectors in the plane of `t_from` to the plane of
  /// `t_to` across their shared edge (the discrete Levi-Civita connection).
  Eigen::Matrix3d edge_rotation(int t_from, int t_to) const;

  /// Signed volume enclosed by the surface (positive for outward orientation).
  double signed_volume() const;

  /// True if the ambient point lies strictly inside the surface. Valid for
  /// convex surfaces only (uses the face-plane half-space test).
  bool convex_contains(const Vec3& point, double tol = 0.0) const;

  /// Per-vertex curvature data (cotangent Laplacian with mixed-Voronoi
  /// lumping). Built on first use, cached, thread-safe.
  const VertexGeometry& vertex_geometry() const;

  double max_mean_curvature() const;

private:
  void build_triangle_cache();

  struct LazyVertexGeometry {
    std::once_flag once;
    std::shared_ptr<const VertexGeometry> data;
  };

  std::shared_ptr<const MeshTopology> topology_;
  std::vector<Vec3> positions_;
  std::vector<Vec3> tri_normals_;
  std::vector<double> tri_areas_;
  double total_area_ = 0;
  Vec3 centroid_ = Vec3::Zero();
  double diameter_hint_ = 0;
  std::shared_ptr<LazyVertexGeometry> lazy_ = std::make_shared<LazyVertexGeometry>();
};

/// Per-edge Euclidean lengths: the discrete realization of the induced
/// metric of one slice.
struct EdgeMetric {
  std::vector<double> lengths;  // indexed by topology edge id
  double min = 0, max = 0;
  double quality_ratio = 0;  // max/min
};

EdgeMetric edge_metric(const TriangulatedHypersurface& mesh);

struct ConvexityReport {
  double min_dihedral_indicator = 0;  // positive iff locally convex everywhere
  bool strictly_convex = false;
  int worst_edge = -1;
  double tolerance = 1e-10;
};

/// Signed dihedral convexity check over all edges. Throws NonManifold /
/// Degenerate if the structural invariants fail.
ConvexityReport validate_convex_mesh(const TriangulatedHypersurface& mesh);

}  // namespace shrinkflow
