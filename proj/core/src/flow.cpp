#include "shrinkflow/flow.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "shrinkflow/curvature.hpp"

namespace shrinkflow {

const char* to_string(McfScheme s) {
  return s == McfScheme::Explicit ? "explicit" : "semi-implicit";
}

McfScheme mcf_scheme_from_string(const std::string& s) {
  if (s == "explicit") return McfScheme::Explicit;
  if (s == "semi-implicit" || s == "implicit") return McfScheme::SemiImplicit;
  fail(ErrorCode::ConfigError, "unknown scheme '" + s + "'");
}

namespace {

double triangle_edge_ratio(const TriangulatedHypersurface& mesh, int t,
                           const std::vector<Vec3>& pos) {
  const auto& tri = mesh.topology().triangles[t];
  double lmin = std::numeric_limits<double>::infinity(), lmax = 0;
  for (int k = 0; k < 3; ++k) {
    const double l = (pos[tri[(k + 1) % 3]] - pos[tri[k]]).norm();
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  return (lmin > 0) ? lmax / lmin : std::numeric_limits<double>::infinity();
}

void check_step_quality(const TriangulatedHypersurface& mesh, const std::vector<Vec3>& newpos,
                        double quality_threshold) {
  const auto& topo = mesh.topology();
  for (int t = 0; t < topo.n_triangles(); ++t) {
    const auto& tri = topo.triangles[t];
    const Vec3 n = (newpos[tri[1]] - newpos[tri[0]]).cross(newpos[tri[2]] - newpos[tri[0]]);
    if (n.norm() <= 0 || n.dot(mesh.triangle_normal(t)) <= 0)
      fail(ErrorCode::StepRejected, "triangle " + std::to_string(t) + " inverted");
    if (triangle_edge_ratio(mesh, t, newpos) > quality_threshold)
      fail(ErrorCode::StepRejected, "triangle " + std::to_string(t) + " degraded past quality threshold");
  }
}

std::vector<Vec3> explicit_step(const TriangulatedHypersurface& mesh, double dt) {
  const auto& vg = mesh.vertex_geometry();
  std::vector<Vec3> out = mesh.positions();
  for (int v = 0; v < mesh.n_vertices(); ++v) out[v] += dt * vg.laplace_position[v];
  return out;
}

// Persistent semi-implicit stepper: the sparsity pattern is fixed by the
// connectivity, so the symbolic factorization is done once.
class SemiImplicitStepper {
public:
  std::vector<Vec3> step(const TriangulatedHypersurface& mesh, double dt) {
    auto ops = assemble_laplacian(mesh);
    Eigen::SparseMatrix<double> system = ops.stiffness * dt;
    for (int v = 0; v < mesh.n_vertices(); ++v) system.coeffRef(v, v) += ops.lumped_area[v];
    if (!analyzed_) {
      solver_.analyzePattern(system);
      analyzed_ = true;
    }
    solver_.factorize(system);
    if (solver_.info() != Eigen::Success)
      fail(ErrorCode::SolverFailure, "semi-implicit factorization failed");
    const int nv = mesh.n_vertices();
    Eigen::MatrixXd rhs(nv, 3);
    for (int v = 0; v < nv; ++v)
      rhs.row(v) = ops.lumped_area[v] * mesh.positions()[v].transpose();
    Eigen::MatrixXd x = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success)
      fail(ErrorCode::SolverFailure, "semi-implicit solve failed");
    std::vector<Vec3> out(nv);
    for (int v = 0; v < nv; ++v) out[v] = x.row(v).transpose();
    return out;
  }

private:
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  bool analyzed_ = false;
};

double explicit_cfl_bound(const TriangulatedHypersurface& mesh) {
  auto ops = assemble_laplacian(mesh);
  double bound = std::numeric_limits<double>::infinity();
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    const double kii = ops.stiffness.coeff(v, v);
    if (kii > 0) bound = std::min(bound, ops.lumped_area[v] / kii);
  }
  return 0.5 * bound;
}

}  // namespace

TriangulatedHypersurface mcf_step(const TriangulatedHypersurface& mesh, double dt,
                                  McfScheme scheme, double quality_threshold) {
  if (dt < 0) fail(ErrorCode::BadParams, "dt must be non-negative");
  if (dt == 0) return TriangulatedHypersurface(mesh.topology_ptr(), mesh.positions());
  std::vector<Vec3> newpos;
  if (scheme == McfScheme::Explicit) {
    newpos = explicit_step(mesh, dt);
  } else {
    SemiImplicitStepper stepper;
    newpos = stepper.step(mesh, dt);
  }
  check_step_quality(mesh, newpos, quality_threshold);
  return TriangulatedHypersurface(mesh.topology_ptr(), std::move(newpos));
}

TriangulatedHypersurface FlowTrajectory::snapshot(int i) const {
  return TriangulatedHypersurface(topology, positions[i]);
}

namespace {
// Index of the last snapshot with time <= t.
int bracket(const std::vector<double>& times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  int i = static_cast<int>(it - times.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(times.size()) - 2);
}
}  // namespace

TriangulatedHypersurface FlowTrajectory::slice_at(double t) const {
  if (t < 0 || t > last_time() * (1 + 1e-12))
    fail(ErrorCode::OutOfRange, "flow time " + std::to_string(t) + " outside [0, " +
                                    std::to_string(last_time()) + "]");
  t = std::min(t, last_time());
  if (n_snapshots() == 1) return snapshot(0);
  const int i = bracket(times, t);
  const double denom = times[i + 1] - times[i];
  const double w = (denom > 0) ? (t - times[i]) / denom : 0.0;
  std::vector<Vec3> pos(positions[i].size());
  for (size_t v = 0; v < pos.size(); ++v)
    pos[v] = (1.0 - w) * positions[i][v] + w * positions[i + 1][v];
  return TriangulatedHypersurface(topology, std::move(pos));
}

TriangulatedHypersurface FlowTrajectory::slice_backward(double u) const {
  const double t = t_explosion_estimate - u;
  if (u <= 0 || t < -1e-12 || t > last_time() * (1 + 1e-12))
    fail(ErrorCode::SliceOutOfRange,
         "backward time " + std::to_string(u) + " has no stored slice (min " +
             std::to_string(backward_min_time()) + ")");
  return slice_at(std::clamp(t, 0.0, last_time()));
}

double FlowTrajectory::area_at(double t) const {
  if (n_snapshots() == 1) return areas[0];
  if (t < 0 || t > last_time() * (1 + 1e-12)) fail(ErrorCode::OutOfRange, "area_at outside range");
  t = std::min(t, last_time());
  const int i = bracket(times, t);
  const double denom = times[i + 1] - times[i];
  const double w = (denom > 0) ? (t - times[i]) / denom : 0.0;
  return (1.0 - w) * areas[i] + w * areas[i + 1];
}

double FlowTrajectory::scale_between(double t_ref, double t) const {
  return std::sqrt(area_at(t) / area_at(t_ref));
}

double FlowTrajectory::dilation_at(double t) const {
  if (!maps.filled) fail(ErrorCode::InvariantFailure, "time maps not filled");
  return std::sqrt(areas[0] / area_at(t));
}

double FlowTrajectory::stretched_time_at(double t) const {
  if (!maps.filled) fail(ErrorCode::InvariantFailure, "time maps not filled");
  if (t < 0 || t > last_time() * (1 + 1e-12)) fail(ErrorCode::OutOfRange, "stretched_time outside range");
  t = std::min(t, last_time());
  const int i = bracket(times, t);
  const double denom = times[i + 1] - times[i];
  const double w = (denom > 0) ? (t - times[i]) / denom : 0.0;
  // trapezoid tail within the bracket
  const double psi2_i = maps.dilation[i] * maps.dilation[i];
  const double psi2_t = areas[0] / area_at(t);
  return maps.stretched_time[i] + 0.5 * (psi2_i + psi2_t) * w * denom;
}

double FlowTrajectory::stretched_time_inverse(double s) const {
  if (!maps.filled) fail(ErrorCode::InvariantFailure, "time maps not filled");
  const auto& st = maps.stretched_time;
  if (s < st.front() - 1e-12 || s > st.back() + 1e-12)
    fail(ErrorCode::OutOfRange, "stretched time outside table");
  s = std::clamp(s, st.front(), st.back());
  auto it = std::upper_bound(st.begin(), st.end(), s);
  int i = std::clamp(static_cast<int>(it - st.begin()) - 1, 0, n_snapshots() - 2);
  const double denom = st[i + 1] - st[i];
  const double w = (denom > 0) ? (s - st[i]) / denom : 0.0;
  return times[i] + w * (times[i + 1] - times[i]);
}

double FlowTrajectory::tau(double u) const {
  return -stretched_time_at(t_explosion_estimate - u);
}

double FlowTrajectory::tau_inverse(double s) const {
  return t_explosion_estimate - stretched_time_inverse(-s);
}

bool FlowTrajectory::nested_inside(int outer, int inner) const {
  const auto outer_mesh = snapshot(outer);
  for (const auto& p : positions[inner])
    if (!outer_mesh.convex_contains(p)) return false;
  return true;
}

FlowTrajectory run_flow(const TriangulatedHypersurface& m0, const FlowOptions& opts) {
  if (!(opts.dt0 > 0)) fail(ErrorCode::BadParams, "dt0 must be positive");
  if (!(opts.stop_area_fraction > 0 && opts.stop_area_fraction <= 1))
    fail(ErrorCode::BadParams, "stop_area_fraction must be in (0,1]");
  {
    auto report = validate_convex_mesh(m0);
    if (!report.strictly_convex)
      fail(ErrorCode::NotConvex, "initial mesh is not strictly convex");
  }

  FlowTrajectory traj;
  traj.topology = m0.topology_ptr();
  traj.times = {0.0};
  traj.positions = {m0.positions()};
  traj.areas = {m0.total_area()};

  const double area0 = m0.total_area();
  const int n = 2;
  const double explosion_bound = m0.diameter_hint() * m0.diameter_hint() / (2.0 * n);
  const double spacing_base =
      (opts.target_snapshots > 0) ? explosion_bound / opts.target_snapshots : 0.0;

  TriangulatedHypersurface mesh(m0.topology_ptr(), m0.positions());
  SemiImplicitStepper stepper;
  double t = 0;
  double last_stored = 0;

  while (mesh.total_area() > opts.stop_area_fraction * area0) {
    const double hmax = mesh.max_mean_curvature();
    double dt = opts.dt0;
    if (hmax > 0) dt = std::min(dt, opts.curvature_safety / (hmax * hmax));
    if (opts.scheme == McfScheme::Explicit) dt = std::min(dt, explicit_cfl_bound(mesh));

    std::vector<Vec3> newpos;
    for (;;) {
      try {
        newpos = (opts.scheme == McfScheme::Explicit) ? explicit_step(mesh, dt)
                                                      : stepper.step(mesh, dt);
        check_step_quality(mesh, newpos, opts.quality_threshold);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::StepRejected) throw;
        dt /= 2;
        if (dt < 1e-14)
          fail(ErrorCode::ConvexityLost, "flow step kept failing down to dt < 1e-14");
      }
    }
    TriangulatedHypersurface next(mesh.topology_ptr(), std::move(newpos));
    if (!(next.total_area() < mesh.total_area()))
      fail(ErrorCode::InvariantFailure, "surface area did not decrease over a step");
    if (opts.check_convexity) {
      auto report = validate_convex_mesh(next);
      if (!report.strictly_convex)
        fail(ErrorCode::ConvexityLost,
             "flow lost strict convexity at t=" + std::to_string(t + dt));
    }
    mesh = std::move(next);
    t += dt;

    const double area_frac = mesh.total_area() / area0;
    const bool stopping = mesh.total_area() <= opts.stop_area_fraction * area0;
    const double spacing =
        spacing_base * std::max(area_frac, 0.5 * opts.stop_area_fraction);
    if (spacing_base == 0.0 || (t - last_stored) >= spacing || stopping) {
      traj.times.push_back(t);
      traj.positions.push_back(mesh.positions());
      traj.areas.push_back(mesh.total_area());
      last_stored = t;
    }
  }

  // Collapse-time estimate: linear fit of the area tail extrapolated to zero.
  const int m = traj.n_snapshots();
  if (m >= 3) {
    const int tail = std::max(5, m / 5);
    const int lo = std::max(0, m - tail);
    double st = 0, sa = 0, stt = 0, sta = 0;
    int cnt = 0;
    for (int i = lo; i < m; ++i) {
      st += traj.times[i];
      sa += traj.areas[i];
      stt += traj.times[i] * traj.times[i];
      sta += traj.times[i] * traj.areas[i];
      ++cnt;
    }
    const double denom = cnt * stt - st * st;
    const double slope = (cnt * sta - st * sa) / denom;
    const double intercept = (sa - slope * st) / cnt;
    if (slope < 0) traj.t_explosion_estimate = -intercept / slope;
  }
  if (traj.t_explosion_estimate <= traj.last_time())
    traj.t_explosion_estimate = traj.last_time() * 1.0001 + 1e-12;

  return traj;
}

void normalize_and_time_maps(FlowTrajectory& traj) {
  if (traj.n_snapshots() < 2) fail(ErrorCode::NotEnoughSnapshots, "need at least two snapshots");
  const int m = traj.n_snapshots();
  traj.maps.dilation.resize(m);
  traj.maps.stretched_time.resize(m);
  const double a0 = traj.areas[0];
  for (int i = 0; i < m; ++i) traj.maps.dilation[i] = std::sqrt(a0 / traj.areas[i]);
  traj.maps.stretched_time[0] = 0;
  for (int i = 1; i < m; ++i) {
    const double p0 = traj.maps.dilation[i - 1] * traj.maps.dilation[i - 1];
    const double p1 = traj.maps.dilation[i] * traj.maps.dilation[i];
    traj.maps.stretched_time[i] =
        traj.maps.stretched_time[i - 1] + 0.5 * (p0 + p1) * (traj.times[i] - traj.times[i - 1]);
    if (!(traj.maps.stretched_time[i] > traj.maps.stretched_time[i - 1]))
      fail(ErrorCode::InvariantFailure, "stretched clock is not strictly increasing");
  }
  traj.maps.filled = true;
}

}  // namespace shrinkflow
