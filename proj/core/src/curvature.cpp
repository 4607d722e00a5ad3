#include "shrinkflow/curvature.hpp"

#include <cmath>
#include <vector>

namespace shrinkflow {

namespace {

double cot_angle(const Vec3& at, const Vec3& p, const Vec3& q) {
  const Vec3 u = p - at;
  const Vec3 v = q - at;
  const double cross = u.cross(v).norm();
  if (cross <= 0) fail(ErrorCode::Degenerate, "cotangent weight undefined on a degenerate triangle");
  return u.dot(v) / cross;
}

}  // namespace

std::shared_ptr<const VertexGeometry> detail_build_vertex_geometry(
    const TriangulatedHypersurface& mesh) {
  const auto& topo = mesh.topology();
  const auto& pos = mesh.positions();
  const int nv = topo.n_vertices;
  auto out = std::make_shared<VertexGeometry>();
  out->vertex_area.assign(nv, 0.0);
  out->area_normal.assign(nv, Vec3::Zero());
  out->laplace_position.assign(nv, Vec3::Zero());
  out->mean_curvature.assign(nv, 0.0);
  out->normal.assign(nv, Vec3::Zero());

  std::vector<Vec3> weighted_diff(nv, Vec3::Zero());

  for (int t = 0; t < topo.n_triangles(); ++t) {
    const auto& tri = topo.triangles[t];
    const Vec3& a = pos[tri[0]];
    const Vec3& b = pos[tri[1]];
    const Vec3& c = pos[tri[2]];
    const double area = mesh.triangle_area(t);
    if (!(area > 0)) fail(ErrorCode::Degenerate, "zero-area triangle " + std::to_string(t));

    // cotangent at each corner (opposite the edge spanning the other two)
    const double cot[3] = {cot_angle(a, b, c), cot_angle(b, c, a), cot_angle(c, a, b)};
    const Vec3* p[3] = {&a, &b, &c};

    for (int k = 0; k < 3; ++k) {
      const int i = tri[(k + 1) % 3];
      const int j = tri[(k + 2) % 3];
      const Vec3 diff = *p[(k + 2) % 3] - *p[(k + 1) % 3];
      // Half the cotangent weight from this triangle; the opposite triangle
      // contributes the other half of w_ij.
      weighted_diff[i] += 0.5 * cot[k] * diff;
      weighted_diff[j] -= 0.5 * cot[k] * diff;
    }

    // Mixed Voronoi lumping: circumcentric areas on non-obtuse triangles,
    // area/2 at the obtuse corner and area/4 at the others otherwise.
    const bool obtuse[3] = {cot[0] < 0, cot[1] < 0, cot[2] < 0};
    if (obtuse[0] || obtuse[1] || obtuse[2]) {
      for (int k = 0; k < 3; ++k)
        out->vertex_area[tri[k]] += obtuse[k] ? area / 2.0 : area / 4.0;
    } else {
      for (int k = 0; k < 3; ++k) {
        const Vec3 e1 = *p[(k + 1) % 3] - *p[k];
        const Vec3 e2 = *p[(k + 2) % 3] - *p[k];
        // |e1|^2 * cot(angle opposite e1) + |e2|^2 * cot(angle opposite e2)
        out->vertex_area[tri[k]] +=
            (e1.squaredNorm() * cot[(k + 2) % 3] + e2.squaredNorm() * cot[(k + 1) % 3]) / 8.0;
      }
    }

    const Vec3 an = area * mesh.triangle_normal(t);
    for (int k = 0; k < 3; ++k) out->area_normal[tri[k]] += an;
  }

  for (int v = 0; v < nv; ++v) {
    if (!(out->vertex_area[v] > 0)) fail(ErrorCode::Degenerate, "vertex with zero lumped area");
    out->laplace_position[v] = weighted_diff[v] / out->vertex_area[v];
    const double norm_an = out->area_normal[v].norm();
    if (norm_an > 0) out->area_normal[v] /= norm_an;
    const double h = out->laplace_position[v].norm();
    out->mean_curvature[v] = h;
    out->normal[v] = (h > 1e-12) ? Vec3(-out->laplace_position[v] / h) : out->area_normal[v];
  }
  return out;
}

const VertexGeometry& mean_curvature_data(const TriangulatedHypersurface& mesh) {
  return mesh.vertex_geometry();
}

LaplaceOperators assemble_laplacian(const TriangulatedHypersurface& mesh) {
  const auto& topo = mesh.topology();
  const auto& pos = mesh.positions();
  const int nv = topo.n_vertices;
  LaplaceOperators ops;
  ops.lumped_area.resize(nv);
  const auto& vg = mesh.vertex_geometry();
  for (int v = 0; v < nv; ++v) ops.lumped_area[v] = vg.vertex_area[v];

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(topo.triangles.size() * 12);
  for (int t = 0; t < topo.n_triangles(); ++t) {
    const auto& tri = topo.triangles[t];
    const Vec3& a = pos[tri[0]];
    const Vec3& b = pos[tri[1]];
    const Vec3& c = pos[tri[2]];
    const double cot[3] = {cot_angle(a, b, c), cot_angle(b, c, a), cot_angle(c, a, b)};
    for (int k = 0; k < 3; ++k) {
      const int i = tri[(k + 1) % 3];
      const int j = tri[(k + 2) % 3];
      const double w = 0.5 * cot[k];
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
    }
  }
  ops.stiffness.resize(nv, nv);
  ops.stiffness.setFromTriplets(trip.begin(), trip.end());
  return ops;
}

double min_laplace_normal_angle_deg(const TriangulatedHypersurface& mesh) {
  const auto& vg = mesh.vertex_geometry();
  double worst = 180.0;
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double h = vg.laplace_position[v].norm();
    if (h <= 1e-12) continue;
    const double c = vg.laplace_position[v].dot(vg.area_normal[v]) / h;
    worst = std::min(worst, std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI);
  }
  return worst;
}

double max_gaussian_curvature(const TriangulatedHypersurface& mesh) {
  const auto& topo = mesh.topology();
  const auto& pos = mesh.positions();
  const auto& vg = mesh.vertex_geometry();
  std::vector<double> defect(topo.n_vertices, 2.0 * M_PI);
  for (int t = 0; t < topo.n_triangles(); ++t) {
    const auto& tri = topo.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const Vec3 u = pos[tri[(k + 1) % 3]] - pos[tri[k]];
      const Vec3 v = pos[tri[(k + 2) % 3]] - pos[tri[k]];
      defect[tri[k]] -= std::atan2(u.cross(v).norm(), u.dot(v));
    }
  }
  double kmax = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < topo.n_vertices; ++v) kmax = std::max(kmax, defect[v] / vg.vertex_area[v]);
  return kmax;
}

}  // namespace shrinkflow
