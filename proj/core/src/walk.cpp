#include "shrinkflow/geodesic.hpp"

#include <cmath>

namespace shrinkflow {

WalkResult walk_exponential(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                            const TangentVector& v) {
  if (v.base.triangle != p.triangle ||
      (mesh.ambient(v.base) - mesh.ambient(p)).norm() >
          1e-9 * std::max(1.0, mesh.diameter_hint()))
    fail(ErrorCode::BaseMismatch, "walk direction is not based at the start point");

  WalkResult out;
  out.end = p;
  out.end.normalize();

  Vec3 dir = mesh.project_to_plane(p.triangle, v.dir);
  double remaining = dir.norm();
  if (remaining == 0) return out;
  // Guard against wrap-around: half the intrinsic diameter, estimated from
  // the ambient one by the round-sphere ratio pi/2 (exact for spheres).
  if (remaining > 0.25 * M_PI * mesh.diameter_hint())
    fail(ErrorCode::StepTooLong, "step length " + std::to_string(remaining) +
                                     " exceeds half the intrinsic diameter");
  Vec3 d = dir / remaining;

  const auto& topo = mesh.topology();
  const auto& pos = mesh.positions();
  int tri = p.triangle;
  Vec3 bary = out.end.bary;

  const int max_crossings =
      128 + 8 * static_cast<int>(remaining / std::max(mesh.min_edge_length(), 1e-300));
  for (int iter = 0;; ++iter) {
    if (iter > max_crossings)
      fail(ErrorCode::InvariantFailure, "walk did not terminate (mesh quality?)");
    const auto& t = topo.triangles[tri];
    const Vec3& a = pos[t[0]];
    const Vec3& b = pos[t[1]];
    const Vec3& c = pos[t[2]];
    // barycentric velocity of a unit ambient step along d
    const Vec3 e1 = b - a, e2 = c - a;
    const double g11 = e1.dot(e1), g12 = e1.dot(e2), g22 = e2.dot(e2);
    const double det = g11 * g22 - g12 * g12;
    if (det <= 0) fail(ErrorCode::Degenerate, "degenerate triangle in walk");
    const double r1 = d.dot(e1), r2 = d.dot(e2);
    const double u = (r1 * g22 - r2 * g12) / det;
    const double w = (g11 * r2 - g12 * r1) / det;
    const Vec3 db(-u - w, u, w);

    double s_exit = std::numeric_limits<double>::infinity();
    int exit_k = -1;
    for (int k = 0; k < 3; ++k) {
      if (db[k] < -1e-300) {
        const double s = -bary[k] / db[k];
        if (s < s_exit) {
          s_exit = s;
          exit_k = k;
        }
      }
    }
    if (remaining <= s_exit || exit_k < 0) {
      bary += remaining * db;
      break;
    }
    bary += s_exit * db;
    remaining -= s_exit;
    bary[exit_k] = 0;

    const int e = topo.tri_edges[tri][exit_k];
    const auto& ed = topo.edges[e];
    const int next = (ed.tri[0] == tri) ? ed.tri[1] : ed.tri[0];

    // carry barycentric mass on the shared edge over by global vertex id
    double val_v0 = 0, val_v1 = 0;
    for (int k = 0; k < 3; ++k) {
      if (t[k] == ed.v0) val_v0 = bary[k];
      if (t[k] == ed.v1) val_v1 = bary[k];
    }
    // nudge exact corner hits inward along the edge
    constexpr double kCorner = 1e-12;
    const double tot = val_v0 + val_v1;
    if (tot > 0) {
      double f = val_v0 / tot;
      f = std::clamp(f, kCorner, 1.0 - kCorner);
      val_v0 = f;
      val_v1 = 1.0 - f;
    } else {
      val_v0 = val_v1 = 0.5;
    }

    const Eigen::Matrix3d rot = mesh.edge_rotation(tri, next);
    out.transport = rot * out.transport;
    d = rot * d;
    d = mesh.project_to_plane(next, d);
    const double dn = d.norm();
    if (dn <= 0) fail(ErrorCode::InvariantFailure, "walk direction vanished at an edge");
    d /= dn;

    const auto& tn = topo.triangles[next];
    Vec3 nb = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      if (tn[k] == ed.v0) nb[k] = val_v0;
      else if (tn[k] == ed.v1) nb[k] = val_v1;
    }
    bary = nb;
    tri = next;
    out.crossings += 1;
  }

  out.end.triangle = tri;
  out.end.bary = bary;
  out.end.normalize();
  return out;
}

}  // namespace shrinkflow
