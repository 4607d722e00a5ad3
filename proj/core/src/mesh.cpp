#include "shrinkflow/mesh.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <map>

#include "shrinkflow/curvature.hpp"

namespace shrinkflow {

std::shared_ptr<const MeshTopology> MeshTopology::build(
    std::vector<std::array<int, 3>> triangles, int n_vertices,
    std::vector<int> face_origin) {
  auto topo = std::make_shared<MeshTopology>();
  topo->n_vertices = n_vertices;
  topo->triangles = std::move(triangles);
  topo->face_origin = std::move(face_origin);
  const int nt = topo->n_triangles();

  for (const auto& tri : topo->triangles) {
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= n_vertices)
        fail(ErrorCode::IoError, "triangle references vertex out of range");
      if (tri[k] == tri[(k + 1) % 3])
        fail(ErrorCode::Degenerate, "triangle repeats a vertex");
    }
  }

  std::map<std::pair<int, int>, int> edge_ids;
  topo->tri_edges.assign(nt, {-1, -1, -1});
  topo->tri_neighbors.assign(nt, {-1, -1, -1});
  for (int t = 0; t < nt; ++t) {
    const auto& tri = topo->triangles[t];
    for (int k = 0; k < 3; ++k) {
      int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      auto key = std::minmax(a, b);
      auto it = edge_ids.find(key);
      if (it == edge_ids.end()) {
        Edge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.tri[0] = t;
        e.opp[0] = k;
        edge_ids.emplace(key, static_cast<int>(topo->edges.size()));
        topo->tri_edges[t][k] = static_cast<int>(topo->edges.size());
        topo->edges.push_back(e);
      } else {
        Edge& e = topo->edges[it->second];
        if (e.tri[1] != -1)
          fail(ErrorCode::NonManifold, "edge shared by more than two triangles");
        e.tri[1] = t;
        e.opp[1] = k;
        topo->tri_edges[t][k] = it->second;
      }
    }
  }
  for (const auto& e : topo->edges) {
    if (e.tri[1] == -1)
      fail(ErrorCode::NonManifold, "boundary edge in a closed mesh");
    // Consistent orientation: the shared edge must be traversed in opposite
    // directions by its two triangles.
    const auto& ta = topo->triangles[e.tri[0]];
    const auto& tb = topo->triangles[e.tri[1]];
    auto directed = [](const std::array<int, 3>& tri, int opp) {
      return std::pair<int, int>{tri[(opp + 1) % 3], tri[(opp + 2) % 3]};
    };
    auto da = directed(ta, e.opp[0]);
    auto db = directed(tb, e.opp[1]);
    if (!(da.first == db.second && da.second == db.first))
      fail(ErrorCode::NonManifold, "inconsistent triangle orientation across an edge");
  }
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const Edge& e = topo->edges[topo->tri_edges[t][k]];
      topo->tri_neighbors[t][k] = (e.tri[0] == t) ? e.tri[1] : e.tri[0];
    }
  }
  topo->vertex_triangles.assign(n_vertices, {});
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) topo->vertex_triangles[topo->triangles[t][k]].push_back(t);
  return topo;
}

int MeshTopology::local_index(int t, int v) const {
  for (int k = 0; k < 3; ++k)
    if (triangles[t][k] == v) return k;
  return -1;
}

int MeshTopology::edge_between(int t_a, int t_b) const {
  for (int k = 0; k < 3; ++k)
    if (tri_neighbors[t_a][k] == t_b) return tri_edges[t_a][k];
  return -1;
}

TriangulatedHypersurface::TriangulatedHypersurface(
    std::shared_ptr<const MeshTopology> topology, std::vector<Vec3> positions)
    : topology_(std::move(topology)), positions_(std::move(positions)) {
  if (static_cast<int>(positions_.size()) != topology_->n_vertices)
    fail(ErrorCode::IoError, "position count does not match topology");
  build_triangle_cache();
}

TriangulatedHypersurface TriangulatedHypersurface::from_data(
    std::vector<Vec3> positions, std::vector<std::array<int, 3>> triangles,
    std::vector<int> face_origin) {
  auto topo = MeshTopology::build(std::move(triangles), static_cast<int>(positions.size()),
                                  std::move(face_origin));
  TriangulatedHypersurface mesh(topo, std::move(positions));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!(mesh.triangle_area(t) > 0))
      fail(ErrorCode::Degenerate, "zero-area triangle " + std::to_string(t));
  }
  if (mesh.signed_volume() <= 0)
    fail(ErrorCode::NonManifold, "orientation is not outward (negative enclosed volume)");
  return mesh;
}

void TriangulatedHypersurface::build_triangle_cache() {
  const int nt = n_triangles();
  tri_normals_.resize(nt);
  tri_areas_.resize(nt);
  total_area_ = 0;
  Vec3 weighted = Vec3::Zero();
  for (int t = 0; t < nt; ++t) {
    const auto& tri = topology_->triangles[t];
    const Vec3& a = positions_[tri[0]];
    const Vec3& b = positions_[tri[1]];
    const Vec3& c = positions_[tri[2]];
    Vec3 n = (b - a).cross(c - a);
    const double n2 = n.norm();
    tri_areas_[t] = 0.5 * n2;
    tri_normals_[t] = (n2 > 0) ? Vec3(n / n2) : Vec3::Zero();
    total_area_ += tri_areas_[t];
    weighted += tri_areas_[t] * (a + b + c) / 3.0;
  }
  centroid_ = (total_area_ > 0) ? Vec3(weighted / total_area_) : Vec3::Zero();
  double max_r2 = 0;
  for (const auto& p : positions_) max_r2 = std::max(max_r2, (p - centroid_).squaredNorm());
  diameter_hint_ = 2.0 * std::sqrt(max_r2);
}

double TriangulatedHypersurface::mean_edge_length() const {
  double sum = 0;
  for (const auto& e : topology_->edges) sum += (positions_[e.v0] - positions_[e.v1]).norm();
  return sum / static_cast<double>(topology_->edges.size());
}

double TriangulatedHypersurface::min_edge_length() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : topology_->edges)
    m = std::min(m, (positions_[e.v0] - positions_[e.v1]).norm());
  return m;
}

double TriangulatedHypersurface::edge_length(int e) const {
  const auto& ed = topology_->edges[e];
  return (positions_[ed.v0] - positions_[ed.v1]).norm();
}

Vec3 TriangulatedHypersurface::ambient(const SurfacePoint& p) const {
  const auto& tri = topology_->triangles[p.triangle];
  return p.bary[0] * positions_[tri[0]] + p.bary[1] * positions_[tri[1]] +
         p.bary[2] * positions_[tri[2]];
}

Vec3 TriangulatedHypersurface::project_to_plane(int triangle, const Vec3& v) const {
  const Vec3& n = tri_normals_[triangle];
  return v - n.dot(v) * n;
}

Eigen::Matrix3d TriangulatedHypersurface::edge_rotation(int t_from, int t_to) const {
  const int e = topology_->edge_between(t_from, t_to);
  if (e < 0) fail(ErrorCode::InvariantFailure, "triangles do not share an edge");
  const auto& ed = topology_->edges[e];
  Vec3 axis = positions_[ed.v1] - positions_[ed.v0];
  const double len = axis.norm();
  if (len <= 0) fail(ErrorCode::Degenerate, "zero-length edge");
  axis /= len;
  const Vec3& n_from = tri_normals_[t_from];
  const Vec3& n_to = tri_normals_[t_to];
  const double angle = std::atan2(axis.dot(n_from.cross(n_to)), n_from.dot(n_to));
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

double TriangulatedHypersurface::signed_volume() const {
  double vol = 0;
  for (const auto& tri : topology_->triangles) {
    const Vec3& a = positions_[tri[0]];
    const Vec3& b = positions_[tri[1]];
    const Vec3& c = positions_[tri[2]];
    vol += a.dot(b.cross(c)) / 6.0;
  }
  return vol;
}

bool TriangulatedHypersurface::convex_contains(const Vec3& point, double tol) const {
  for (int t = 0; t < n_triangles(); ++t) {
    const Vec3& a = positions_[topology_->triangles[t][0]];
    if (tri_normals_[t].dot(point - a) >= -tol) return false;
  }
  return true;
}

const VertexGeometry& TriangulatedHypersurface::vertex_geometry() const {
  std::call_once(lazy_->once, [this] { lazy_->data = detail_build_vertex_geometry(*this); });
  return *lazy_->data;
}

double TriangulatedHypersurface::max_mean_curvature() const {
  const auto& vg = vertex_geometry();
  double h = 0;
  for (double v : vg.mean_curvature) h = std::max(h, v);
  return h;
}

EdgeMetric edge_metric(const TriangulatedHypersurface& mesh) {
  EdgeMetric m;
  const auto& edges = mesh.topology().edges;
  m.lengths.resize(edges.size());
  m.min = std::numeric_limits<double>::infinity();
  m.max = 0;
  for (size_t i = 0; i < edges.size(); ++i) {
    m.lengths[i] = (mesh.positions()[edges[i].v0] - mesh.positions()[edges[i].v1]).norm();
    m.min = std::min(m.min, m.lengths[i]);
    m.max = std::max(m.max, m.lengths[i]);
  }
  m.quality_ratio = (m.min > 0) ? m.max / m.min : std::numeric_limits<double>::infinity();
  return m;
}

ConvexityReport validate_convex_mesh(const TriangulatedHypersurface& mesh) {
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (!(mesh.triangle_area(t) > 0))
      fail(ErrorCode::Degenerate, "zero-area triangle " + std::to_string(t));

  ConvexityReport report;
  report.min_dihedral_indicator = std::numeric_limits<double>::infinity();
  const auto& topo = mesh.topology();
  for (size_t e = 0; e < topo.edges.size(); ++e) {
    const auto& ed = topo.edges[e];
    // The hinge is locally convex iff each triangle's opposite vertex lies
    // strictly below the other triangle's plane.
    double indicator = std::numeric_limits<double>::infinity();
    for (int side = 0; side < 2; ++side) {
      const int t_here = ed.tri[side];
      const int t_there = ed.tri[1 - side];
      const int v_opp = topo.triangles[t_there][ed.opp[1 - side]];
      const Vec3& base = mesh.positions()[ed.v0];
      const Vec3 d = mesh.positions()[v_opp] - base;
      const double dn = d.norm();
      if (dn <= 0) fail(ErrorCode::Degenerate, "coincident vertices across an edge");
      indicator = std::min(indicator, -mesh.triangle_normal(t_here).dot(d) / dn);
    }
    if (indicator < report.min_dihedral_indicator) {
      report.min_dihedral_indicator = indicator;
      report.worst_edge = static_cast<int>(e);
    }
  }
  report.strictly_convex = report.min_dihedral_indicator > report.tolerance;
  return report;
}

}  // namespace shrinkflow
