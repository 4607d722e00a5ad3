#include "shrinkflow/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <cstdio>
#include <cstdlib>

namespace shrinkflow {

namespace {

struct Crossing {
  int va = -1, vb = -1;  // global edge endpoints
  double s = 0.5;        // position = (1-s)*P[va] + s*P[vb]
};

struct Corridor {
  std::vector<int> strip;           // triangle sequence
  std::vector<Crossing> crossings;  // strip.size()-1 entries
};

Vec3 crossing_pos(const TriangulatedHypersurface& mesh, const Crossing& c) {
  return (1.0 - c.s) * mesh.positions()[c.va] + c.s * mesh.positions()[c.vb];
}

// Rotates a point of `from_tri`'s plane into `into_tri`'s plane about their
// shared edge (through edge_base).
Vec3 unfold_point(const TriangulatedHypersurface& mesh, int into_tri, int from_tri, const Vec3& x,
                  const Vec3& edge_base) {
  const Eigen::Matrix3d r = mesh.edge_rotation(from_tri, into_tri);
  return r * (x - edge_base) + edge_base;
}

// Triangle-graph shortest path (A*, centroid hops), optionally penalizing a
// set of triangles to force an alternative corridor.
std::vector<int> dual_path(const TriangulatedHypersurface& mesh, int t_start, int t_goal,
                           const Vec3& goal_pos, const std::vector<char>* penalized) {
  const auto& topo = mesh.topology();
  const int nt = topo.n_triangles();
  std::vector<double> dist(nt, std::numeric_limits<double>::infinity());
  std::vector<int> parent(nt, -1);
  auto centroid = [&](int t) -> Vec3 {
    const auto& tri = topo.triangles[t];
    return (mesh.positions()[tri[0]] + mesh.positions()[tri[1]] + mesh.positions()[tri[2]]) / 3.0;
  };
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[t_start] = 0;
  heap.push({(centroid(t_start) - goal_pos).norm(), t_start});
  while (!heap.empty()) {
    auto [f, t] = heap.top();
    heap.pop();
    if (t == t_goal) break;
    const double d = dist[t];
    if (f - (centroid(t) - goal_pos).norm() > d + 1e-15) continue;
    for (int k = 0; k < 3; ++k) {
      const int nb = topo.tri_neighbors[t][k];
      double w = (centroid(t) - centroid(nb)).norm();
      if (penalized && (*penalized)[nb]) w *= 1e3;
      if (d + w < dist[nb]) {
        dist[nb] = d + w;
        parent[nb] = t;
        heap.push({d + w + (centroid(nb) - goal_pos).norm(), nb});
      }
    }
  }
  if (t_start != t_goal && parent[t_goal] < 0) return {};
  std::vector<int> path;
  for (int t = t_goal; t != -1; t = parent[t]) {
    path.push_back(t);
    if (t == t_start) break;
  }
  std::reverse(path.begin(), path.end());
  if (path.front() != t_start) return {};
  return path;
}

Corridor seed_corridor(const TriangulatedHypersurface& mesh, const std::vector<int>& strip) {
  Corridor c;
  c.strip = strip;
  const auto& topo = mesh.topology();
  for (size_t i = 0; i + 1 < strip.size(); ++i) {
    const int e = topo.edge_between(strip[i], strip[i + 1]);
    Crossing cr;
    cr.va = topo.edges[e].v0;
    cr.vb = topo.edges[e].v1;
    cr.s = 0.5;
    c.crossings.push_back(cr);
  }
  return c;
}

double corridor_length(const TriangulatedHypersurface& mesh, const Corridor& c, const Vec3& p,
                       const Vec3& q) {
  double len = 0;
  Vec3 prev = p;
  for (const auto& cr : c.crossings) {
    const Vec3 x = crossing_pos(mesh, cr);
    len += (x - prev).norm();
    prev = x;
  }
  return len + (q - prev).norm();
}

// Ordered ring of triangles around a vertex (closed mesh: always a cycle).
std::vector<int> triangle_ring(const MeshTopology& topo, int v) {
  const auto& star = topo.vertex_triangles[v];
  std::vector<int> ring;
  ring.push_back(star.front());
  while (ring.size() < star.size()) {
    const int t = ring.back();
    bool grew = false;
    for (int k = 0; k < 3; ++k) {
      const auto& e = topo.edges[topo.tri_edges[t][k]];
      if (e.v0 != v && e.v1 != v) continue;
      const int nb = topo.tri_neighbors[t][k];
      if (std::find(ring.begin(), ring.end(), nb) != ring.end()) continue;
      ring.push_back(nb);
      grew = true;
      break;
    }
    if (!grew) break;
  }
  return ring;
}

class Straightener {
public:
  Straightener(const TriangulatedHypersurface& mesh, const SurfacePoint& p, const SurfacePoint& q)
      : mesh_(mesh), p_(mesh.ambient(p)), q_(mesh.ambient(q)) {}

  double run(Corridor& c, int max_iters) {
    gs_relax(c, 40);
    newton_relax(c, max_iters);
    double len = corridor_length(mesh_, c, p_, q_);
    // Vertex pivots are accepted only when the fully relaxed candidate is
    // strictly shorter, so the outer loop terminates. Pins often interlock,
    // so the collective reroute of all pinned runs is tried first.
    for (int round = 0; round < 256; ++round) {
      const auto runs = find_pinned_runs(c);
      if (runs.empty()) break;
      bool improved = false;
      auto try_candidate = [&](Corridor cand) {
        gs_relax(cand, 60);
        newton_relax(cand, max_iters);
        const double cand_len = corridor_length(mesh_, cand, p_, q_);
        if (cand_len < len - 1e-14 * std::max(1.0, len)) {
          c = std::move(cand);
          len = cand_len;
          improved = true;
        }
      };
      if (runs.size() > 1) {
        // disjoint spans, rerouted right-to-left so left indices stay valid
        Corridor all = c;
        bool any = false;
        for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
          auto cand = reroute_candidate(all, *it);
          if (cand) {
            all = std::move(*cand);
            any = true;
          }
        }
        if (any) try_candidate(std::move(all));
      }
      for (auto it = runs.begin(); !improved && it != runs.end(); ++it) {
        auto cand = reroute_candidate(c, *it);
        if (cand) try_candidate(std::move(*cand));
      }
      if (!improved) break;
    }
    gs_relax(c, 40);
    newton_relax(c, max_iters);
    return corridor_length(mesh_, c, p_, q_);
  }

private:
  // One crossing's exact slide along its edge given frozen neighbors: the
  // segment length sum is convex in s, minimized by intersecting the edge
  // line with the straight segment to the (reflected if same-side) targets.
  void gs_relax(Corridor& c, int max_sweeps) {
    const auto& pos = mesh_.positions();
    const int m = static_cast<int>(c.crossings.size());
    if (m == 0) return;
    const double move_tol = 1e-12 * std::max(mesh_.mean_edge_length(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double max_move = 0;
      for (int i = 0; i < m; ++i) {
        Crossing& cr = c.crossings[i];
        const Vec3 a = (i == 0) ? p_ : crossing_pos(mesh_, c.crossings[i - 1]);
        const Vec3 b_raw = (i + 1 == m) ? q_ : crossing_pos(mesh_, c.crossings[i + 1]);
        const Vec3 e0 = pos[cr.va];
        const Vec3 b = unfold_point(mesh_, c.strip[i], c.strip[i + 1], b_raw, e0);
        const Vec3 d = pos[cr.vb] - e0;
        const Vec3& n = mesh_.triangle_normal(c.strip[i]);

        const double side_a = d.cross(a - e0).dot(n);
        const double side_b = d.cross(b - e0).dot(n);
        Vec3 a_eff = a;
        if (side_a * side_b > 0) {
          const Vec3 t = d.normalized();
          Vec3 perp = (a - e0) - t * t.dot(a - e0);
          perp -= n * n.dot(perp);
          a_eff = a - 2.0 * perp;
        }
        const Vec3 w = b - a_eff;
        const double denom = d.cross(w).dot(n);
        if (std::abs(denom) < 1e-300) continue;
        double s_new = std::clamp((a_eff - e0).cross(w).dot(n) / denom, 0.0, 1.0);
        const double move = std::abs(s_new - cr.s) * d.norm();
        cr.s = s_new;
        max_move = std::max(max_move, move);
      }
      if (max_move < move_tol) break;
    }
  }

  // Crossing points are affine in their slide parameters and live on the
  // shared edges in 3D, so the polyline length is globally convex in s.
  // Projected Newton on the tridiagonal Hessian converges to machine
  // precision in a handful of iterations.
  void newton_relax(Corridor& c, int max_iters) {
    const auto& pos = mesh_.positions();
    const int m = static_cast<int>(c.crossings.size());
    if (m == 0) return;
    std::vector<Vec3> edge_vec(m), x(m + 2);
    x[0] = p_;
    x[m + 1] = q_;
    std::vector<double> grad(m), diag(m), off(std::max(0, m - 1));
    std::vector<double> s_old(m), delta(m);
    const double scale = std::max(mesh_.mean_edge_length(), 1e-300);
    const double len_floor = 1e-9 * scale;

    double energy = 0;
    auto recompute = [&]() {
      for (int i = 0; i < m; ++i) {
        edge_vec[i] = pos[c.crossings[i].vb] - pos[c.crossings[i].va];
        x[i + 1] = crossing_pos(mesh_, c.crossings[i]);
      }
      energy = 0;
      for (int j = 0; j <= m; ++j) energy += (x[j + 1] - x[j]).norm();
    };
    recompute();

    for (int iter = 0; iter < max_iters; ++iter) {
      // gradient and tridiagonal Hessian of the total length
      std::fill(grad.begin(), grad.end(), 0.0);
      std::fill(diag.begin(), diag.end(), 0.0);
      std::fill(off.begin(), off.end(), 0.0);
      for (int j = 0; j <= m; ++j) {
        Vec3 seg = x[j + 1] - x[j];
        double len = seg.norm();
        if (len < len_floor) len = len_floor;
        const Vec3 u = seg / len;
        auto proj = [&](const Vec3& v) { return (v - u * u.dot(v)) / len; };
        if (j >= 1) {
          grad[j - 1] -= edge_vec[j - 1].dot(u);
          diag[j - 1] += edge_vec[j - 1].dot(proj(edge_vec[j - 1]));
        }
        if (j <= m - 1) {
          grad[j] += edge_vec[j].dot(u);
          diag[j] += edge_vec[j].dot(proj(edge_vec[j]));
        }
        if (j >= 1 && j <= m - 1) off[j - 1] -= edge_vec[j - 1].dot(proj(edge_vec[j]));
      }

      double proj_grad = 0;
      for (int i = 0; i < m; ++i) {
        const double s = c.crossings[i].s;
        double g = grad[i];
        if (s <= 0.0 && g > 0) g = 0;
        if (s >= 1.0 && g < 0) g = 0;
        proj_grad = std::max(proj_grad, std::abs(g));
      }
      if (proj_grad < 1e-13 * scale) break;

      // Thomas solve of (H + reg) delta = -grad
      const double reg = 1e-10 * scale;
      std::vector<double> cp(std::max(0, m - 1)), dp(m);
      double beta = diag[0] + reg;
      if (m > 1) cp[0] = off[0] / beta;
      dp[0] = -grad[0] / beta;
      for (int i = 1; i < m; ++i) {
        beta = diag[i] + reg - off[i - 1] * (i - 1 < static_cast<int>(cp.size()) ? cp[i - 1] : 0.0);
        if (std::abs(beta) < 1e-300) beta = 1e-300;
        if (i < m - 1) cp[i] = off[i] / beta;
        dp[i] = (-grad[i] - off[i - 1] * dp[i - 1]) / beta;
      }
      delta[m - 1] = dp[m - 1];
      for (int i = m - 2; i >= 0; --i) delta[i] = dp[i] - cp[i] * delta[i + 1];

      for (int i = 0; i < m; ++i) s_old[i] = c.crossings[i].s;
      const double e_old = energy;
      double alpha = 1.0;
      bool improved = false;
      for (int bt = 0; bt < 40; ++bt) {
        for (int i = 0; i < m; ++i)
          c.crossings[i].s = std::clamp(s_old[i] + alpha * delta[i], 0.0, 1.0);
        recompute();
        if (energy <= e_old) {
          improved = energy < e_old - 1e-16 * std::max(1.0, e_old);
          break;
        }
        alpha /= 2;
      }
      if (!improved) {
        if (energy > e_old) {  // restore
          for (int i = 0; i < m; ++i) c.crossings[i].s = s_old[i];
          recompute();
        }
        break;
      }
    }
  }

  struct PinnedRun {
    size_t i1, i2;  // crossing index range pinned at the same vertex
    int v;
  };

  std::vector<PinnedRun> find_pinned_runs(const Corridor& c) const {
    constexpr double kPin = 1e-6;
    std::vector<PinnedRun> runs;
    size_t i = 0;
    while (i < c.crossings.size()) {
      const Crossing& cr = c.crossings[i];
      int v = -1;
      if (cr.s <= kPin) v = cr.va;
      else if (cr.s >= 1.0 - kPin) v = cr.vb;
      if (v < 0) {
        ++i;
        continue;
      }
      size_t i2 = i;
      while (i2 + 1 < c.crossings.size()) {
        const Crossing& nx = c.crossings[i2 + 1];
        const int nv = (nx.s <= kPin) ? nx.va : (nx.s >= 1.0 - kPin ? nx.vb : -1);
        if (nv != v) break;
        ++i2;
      }
      runs.push_back({i, i2, v});
      i = i2 + 1;
    }
    return runs;
  }

  // Total unfolded angle at v between the rays (v->A in fan.front()) and
  // (v->B in fan.back()), accumulated through the fan.
  double wedge_angle(int v, const Vec3& a, const Vec3& b, const std::vector<int>& fan) const {
    const auto& topo = mesh_.topology();
    const auto& pos = mesh_.positions();
    const Vec3 pv = pos[v];
    auto angle_between = [&](const Vec3& x, const Vec3& y) {
      const double nx = x.norm(), ny = y.norm();
      if (nx < 1e-300 || ny < 1e-300) return 0.0;
      return std::acos(std::clamp(x.dot(y) / (nx * ny), -1.0, 1.0));
    };
    // other endpoint of the v-incident edge shared by consecutive fan triangles
    auto shared_w = [&](int ta, int tb) -> int {
      const int e = topo.edge_between(ta, tb);
      const auto& ed = topo.edges[e];
      return (ed.v0 == v) ? ed.v1 : ed.v0;
    };
    if (fan.size() == 1) return angle_between(a - pv, b - pv);
    double total = 0;
    int w_prev = shared_w(fan[0], fan[1]);
    total += angle_between(a - pv, pos[w_prev] - pv);
    for (size_t j = 1; j + 1 < fan.size(); ++j) {
      const int w_next = shared_w(fan[j], fan[j + 1]);
      total += angle_between(pos[w_prev] - pv, pos[w_next] - pv);
      w_prev = w_next;
    }
    total += angle_between(pos[w_prev] - pv, b - pv);
    return total;
  }

  // Builds the pivot candidate for one pinned run: route the corridor around
  // the vertex through the smaller-wedge fan (the local shortening criterion).
  std::optional<Corridor> reroute_candidate(const Corridor& c, const PinnedRun& run) {
    const auto& topo = mesh_.topology();
    const int t_in = c.strip[run.i1];
    const int t_out = c.strip[run.i2 + 1];
    const Vec3 a = (run.i1 == 0) ? p_ : crossing_pos(mesh_, c.crossings[run.i1 - 1]);
    const Vec3 b =
        (run.i2 + 1 == c.crossings.size()) ? q_ : crossing_pos(mesh_, c.crossings[run.i2 + 1]);

    if (t_in == t_out) {
      // the corridor loops back: drop the run entirely
      Corridor cand;
      cand.strip.assign(c.strip.begin(), c.strip.begin() + run.i1 + 1);
      cand.strip.insert(cand.strip.end(), c.strip.begin() + run.i2 + 2, c.strip.end());
      cand.crossings.assign(c.crossings.begin(), c.crossings.begin() + run.i1);
      cand.crossings.insert(cand.crossings.end(), c.crossings.begin() + run.i2 + 1,
                            c.crossings.end());
      return cand;
    }

    auto ring = triangle_ring(topo, run.v);
    auto pos_in = std::find(ring.begin(), ring.end(), t_in);
    auto pos_out = std::find(ring.begin(), ring.end(), t_out);
    if (pos_in == ring.end() || pos_out == ring.end()) return std::nullopt;
    const int nring = static_cast<int>(ring.size());
    const int ia = static_cast<int>(pos_in - ring.begin());
    const int ib = static_cast<int>(pos_out - ring.begin());

    std::vector<int> arc_fwd{t_in}, arc_bwd{t_in};
    for (int k = (ia + 1) % nring;; k = (k + 1) % nring) {
      arc_fwd.push_back(ring[k]);
      if (k == ib) break;
    }
    for (int k = (ia - 1 + nring) % nring;; k = (k - 1 + nring) % nring) {
      arc_bwd.push_back(ring[k]);
      if (k == ib) break;
    }

    // The pinned span realizes the bent path a -> v -> b; both ring arcs can
    // realize it in the limit, so swapping to the smaller-wedge arc never
    // lengthens, and strictly shortens once the wedge opens below pi.
    const double theta_fwd = wedge_angle(run.v, a, b, arc_fwd);
    const double theta_bwd = wedge_angle(run.v, a, b, arc_bwd);
    const std::vector<int>& chosen = (theta_fwd <= theta_bwd) ? arc_fwd : arc_bwd;
    if (std::min(theta_fwd, theta_bwd) >= M_PI - 1e-12) return std::nullopt;

    Corridor cand;
    cand.strip.assign(c.strip.begin(), c.strip.begin() + run.i1 + 1);
    cand.strip.insert(cand.strip.end(), chosen.begin() + 1, chosen.end() - 1);
    cand.strip.insert(cand.strip.end(), c.strip.begin() + run.i2 + 1, c.strip.end());
    cand.crossings.assign(c.crossings.begin(), c.crossings.begin() + run.i1);
    for (size_t j = 0; j + 1 < chosen.size(); ++j) {
      const int e = topo.edge_between(chosen[j], chosen[j + 1]);
      const auto& ed = topo.edges[e];
      Crossing cr;
      cr.va = ed.v0;
      cr.vb = ed.v1;
      cr.s = (ed.v0 == run.v) ? 0.25 : 0.75;  // reseed a bit off the vertex
      cand.crossings.push_back(cr);
    }
    cand.crossings.insert(cand.crossings.end(), c.crossings.begin() + run.i2 + 1,
                          c.crossings.end());
    return cand;
  }

  const TriangulatedHypersurface& mesh_;
  Vec3 p_, q_;
};

GeodesicPath finalize(const TriangulatedHypersurface& mesh, const Corridor& c,
                      const SurfacePoint& p, const SurfacePoint& q) {
  GeodesicPath path;
  path.strip = c.strip;
  path.points.push_back(p);
  const Vec3 pp = mesh.ambient(p);
  const Vec3 qq = mesh.ambient(q);
  const auto& topo = mesh.topology();
  for (size_t i = 0; i < c.crossings.size(); ++i) {
    const auto& cr = c.crossings[i];
    // Express the crossing point barycentrically in the downstream triangle.
    const int t = c.strip[i + 1];
    SurfacePoint sp;
    sp.triangle = t;
    sp.bary = Vec3::Zero();
    sp.bary[topo.local_index(t, cr.va)] = 1.0 - cr.s;
    sp.bary[topo.local_index(t, cr.vb)] = cr.s;
    path.points.push_back(sp);
  }
  path.points.push_back(q);

  std::vector<Vec3> pts;
  pts.push_back(pp);
  for (const auto& cr : c.crossings) pts.push_back(crossing_pos(mesh, cr));
  pts.push_back(qq);
  path.length = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) path.length += (pts[i + 1] - pts[i]).norm();

  path.max_deviation = 0;
  for (size_t i = 0; i < c.crossings.size(); ++i) {
    const Vec3 a = pts[i];
    const Vec3 x = pts[i + 1];
    const Vec3 b = unfold_point(mesh, c.strip[i], c.strip[i + 1], pts[i + 2],
                                mesh.positions()[c.crossings[i].va]);
    const Vec3 din = x - a, dout = b - x;
    if (din.norm() < 1e-300 || dout.norm() < 1e-300) continue;
    const double bend = std::atan2(din.cross(dout).norm(), din.dot(dout));
    path.max_deviation = std::max(path.max_deviation, bend);
  }

  path.start_tangent.base = p;
  path.end_tangent.base = q;
  if (pts.size() >= 2) {
    Vec3 d0 = pts[1] - pts[0];
    Vec3 d1 = pts[pts.size() - 1] - pts[pts.size() - 2];
    path.start_tangent.dir = (d0.norm() > 0) ? Vec3(d0.normalized()) : Vec3::Zero();
    path.end_tangent.dir = (d1.norm() > 0) ? Vec3(d1.normalized()) : Vec3::Zero();
  }
  return path;
}

struct Candidates {
  GeodesicPath best;
  std::optional<GeodesicPath> second;
};

Candidates straightened_candidates(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                                   const SurfacePoint& q, const GeodesicOptions& opts) {
  const Vec3 pp = mesh.ambient(p);
  const Vec3 qq = mesh.ambient(q);

  Candidates out;
  if (p.triangle == q.triangle || (pp - qq).norm() < 1e-14 * std::max(1.0, mesh.diameter_hint())) {
    Corridor c;
    c.strip = {p.triangle};
    out.best = finalize(mesh, c, p, q);
    return out;
  }

  auto strip1 = dual_path(mesh, p.triangle, q.triangle, qq, nullptr);
  if (strip1.empty()) fail(ErrorCode::InvariantFailure, "no triangle corridor between points");
  Corridor c1 = seed_corridor(mesh, strip1);
  Straightener st(mesh, p, q);
  st.run(c1, opts.max_sweeps);
  out.best = finalize(mesh, c1, p, q);

  const bool skip = opts.ambiguity_skip_below > 0 && out.best.length < opts.ambiguity_skip_below;
  if (!opts.check_ambiguity || skip) return out;

  std::vector<char> penalized(mesh.n_triangles(), 0);
  for (size_t i = 1; i + 1 < c1.strip.size(); ++i) penalized[c1.strip[i]] = 1;
  penalized[p.triangle] = 0;
  penalized[q.triangle] = 0;
  auto strip2 = dual_path(mesh, p.triangle, q.triangle, qq, &penalized);
  if (strip2.empty() || strip2 == c1.strip) return out;
  Corridor c2 = seed_corridor(mesh, strip2);
  Straightener st2(mesh, p, q);
  st2.run(c2, opts.max_sweeps);
  GeodesicPath cand2 = finalize(mesh, c2, p, q);
  if (cand2.length < out.best.length) std::swap(out.best, cand2);
  out.second = std::move(cand2);
  return out;
}

bool paths_distinct(const TriangulatedHypersurface& mesh, const GeodesicPath& a,
                    const GeodesicPath& b) {
  const double sep =
      (a.point_at_arclength(mesh, a.length / 2) - b.point_at_arclength(mesh, b.length / 2)).norm();
  return sep > std::max(2.0 * mesh.mean_edge_length(), 0.05 * a.length);
}

}  // namespace

Vec3 GeodesicPath::point_at_arclength(const TriangulatedHypersurface& mesh, double s) const {
  std::vector<Vec3> pts;
  pts.reserve(points.size());
  for (const auto& sp : points) pts.push_back(mesh.ambient(sp));
  if (s <= 0) return pts.front();
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double seg = (pts[i + 1] - pts[i]).norm();
    if (s <= seg || i + 2 == pts.size()) {
      const double u = (seg > 0) ? std::min(s / seg, 1.0) : 0.0;
      return pts[i] + u * (pts[i + 1] - pts[i]);
    }
    s -= seg;
  }
  return pts.back();
}

GeodesicPath minimal_geodesic(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                              const SurfacePoint& q, const GeodesicOptions& opts) {
  auto cands = straightened_candidates(mesh, p, q, opts);
  if (cands.second) {
    const double l1 = cands.best.length;
    const double l2 = cands.second->length;
    // Discrete anisotropy spreads the lengths of smooth ties by O(h^2), so
    // the tie window is widened to the mesh's own resolution when coarser
    // than the requested tolerance.
    const double h_rel = mesh.mean_edge_length() / std::max(mesh.diameter_hint(), 1e-300);
    const double tie_tol = std::max(opts.ambiguity_rel_tol, 2.0 * h_rel * h_rel);
    if (std::abs(l1 - l2) <= tie_tol * std::max(l1, l2) &&
        paths_distinct(mesh, cands.best, *cands.second)) {
      fail(ErrorCode::AmbiguousGeodesic,
           "two straightened candidates tie near the cut locus (lengths " + std::to_string(l1) +
               ", " + std::to_string(l2) + ")");
    }
  }
  return cands.best;
}

double intrinsic_distance(const TriangulatedHypersurface& mesh, const SurfacePoint& p,
                          const SurfacePoint& q) {
  GeodesicOptions opts;
  opts.check_ambiguity = false;
  return straightened_candidates(mesh, p, q, opts).best.length;
}

TangentVector parallel_transport(const TriangulatedHypersurface& mesh, const GeodesicPath& path,
                                 const TangentVector& v) {
  if (path.points.empty()) fail(ErrorCode::InvariantFailure, "empty path");
  const SurfacePoint& start = path.points.front();
  if (v.base.triangle != start.triangle ||
      (mesh.ambient(v.base) - mesh.ambient(start)).norm() >
          1e-9 * std::max(1.0, mesh.diameter_hint()))
    fail(ErrorCode::BaseMismatch, "tangent vector is not based at the path start");
  Vec3 d = mesh.project_to_plane(start.triangle, v.dir);
  for (size_t i = 0; i + 1 < path.strip.size(); ++i)
    d = mesh.edge_rotation(path.strip[i], path.strip[i + 1]) * d;
  TangentVector out;
  out.base = path.points.back();
  out.base.triangle = path.strip.back();
  out.dir = d;
  return out;
}

SurfacePoint locate_on_convex(const TriangulatedHypersurface& mesh, const Vec3& ambient) {
  const Vec3 c = mesh.centroid();
  const Vec3 dir = ambient - c;
  if (dir.norm() <= 0) fail(ErrorCode::BadParams, "point coincides with the centroid");
  double best_min_bary = -std::numeric_limits<double>::infinity();
  SurfacePoint best;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.topology().triangles[t];
    const Vec3& a = mesh.positions()[tri[0]];
    const Vec3& n = mesh.triangle_normal(t);
    const double denom = n.dot(dir);
    if (denom <= 0) continue;  // back-facing
    const double lambda = n.dot(a - c) / denom;
    if (lambda <= 0) continue;
    const Vec3 x = c + lambda * dir;
    const Vec3& b = mesh.positions()[tri[1]];
    const Vec3& cc = mesh.positions()[tri[2]];
    const double area2 = (b - a).cross(cc - a).norm();
    if (area2 <= 0) continue;
    Vec3 bary;
    bary[0] = (b - x).cross(cc - x).dot(n) / area2;
    bary[1] = (cc - x).cross(a - x).dot(n) / area2;
    bary[2] = (a - x).cross(b - x).dot(n) / area2;
    const double mb = bary.minCoeff();
    if (mb > best_min_bary) {
      best_min_bary = mb;
      best.triangle = t;
      best.bary = bary;
    }
  }
  if (best.triangle < 0) fail(ErrorCode::BadParams, "could not project point onto the mesh");
  best.normalize();
  return best;
}

}  // namespace shrinkflow
