#include "shrinkflow/gtbm.hpp"

#include <cmath>

#include "shrinkflow/geodesic.hpp"
#include "shrinkflow/parallel.hpp"

namespace shrinkflow {

GeneratorConvention GeneratorConvention::from_string(const std::string& s) {
  if (s == "half" || s == "0.5" || s == "1/2") return half();
  if (s == "full" || s == "1") return full();
  fail(ErrorCode::ConfigError, "unknown generator convention '" + s + "' (half|full)");
}

void GeneratorConvention::validate() const {
  if (c != 0.5 && c != 1.0)
    fail(ErrorCode::ConfigError, "generator coefficient must be 1/2 or 1");
}

Vec3 default_frame(const TriangulatedHypersurface& slice, const SurfacePoint& p) {
  Vec3 e = slice.project_to_plane(p.triangle, Vec3::UnitX());
  if (e.norm() < 1e-8) e = slice.project_to_plane(p.triangle, Vec3::UnitY());
  return e.normalized();
}

void gtbm_step_on_slice(const TriangulatedHypersurface& slice, WalkerState& state, double dt,
                        GeneratorConvention conv, RandomSource& rng) {
  if (!(dt > 0)) fail(ErrorCode::BadParams, "dt must be positive");
  // Re-orthonormalize the frame in the current slice's tangent plane (the
  // plane moves between slices of the evolving metric).
  Vec3 e1 = slice.project_to_plane(state.pos.triangle, state.frame);
  if (e1.norm() < 1e-12) e1 = default_frame(slice, state.pos);
  e1.normalize();
  const Vec3 e2 = slice.triangle_normal(state.pos.triangle).cross(e1);

  const double sigma = std::sqrt(2.0 * conv.c * dt);
  const double xi1 = sigma * rng.normal();
  const double xi2 = sigma * rng.normal();
  const Vec3 step = xi1 * e1 + xi2 * e2;
  if (step.norm() == 0) {
    state.frame = e1;
    return;
  }
  TangentVector v;
  v.base = state.pos;
  v.dir = step;
  const WalkResult walk = walk_exponential(slice, state.pos, v);
  state.pos = walk.end;
  Vec3 moved = walk.transport * e1;
  moved = slice.project_to_plane(state.pos.triangle, moved);
  const double n = moved.norm();
  state.frame = (n > 1e-12) ? Vec3(moved / n) : default_frame(slice, state.pos);
}

SurfacePoint gtbm_step(const FlowTrajectory& traj, double t, const SurfacePoint& p, double dt,
                       GeneratorConvention conv, RandomSource& rng) {
  conv.validate();
  const auto slice = traj.slice_backward(t);
  WalkerState st;
  st.pos = p;
  st.frame = default_frame(slice, p);
  gtbm_step_on_slice(slice, st, dt, conv, rng);
  return st.pos;
}

BMPath simulate_path(const FlowTrajectory& traj, const SurfacePoint& start, double t0, double t1,
                     double dt, GeneratorConvention conv, RandomSource& rng) {
  conv.validate();
  if (!(t0 > 0) || t1 < t0) fail(ErrorCode::BadParams, "need 0 < t0 <= t1");
  BMPath path;
  if (t1 == t0) {
    path.samples.push_back({t0, start});
    path.frame = default_frame(traj.slice_backward(t0), start);
    return path;
  }
  const int steps = std::max(1, static_cast<int>(std::llround((t1 - t0) / dt)));
  const double h = (t1 - t0) / steps;
  WalkerState st;
  st.pos = start;
  st.frame = default_frame(traj.slice_backward(t0), start);
  path.samples.push_back({t0, st.pos});
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * h;
    const auto slice = traj.slice_backward(t);
    gtbm_step_on_slice(slice, st, h, conv, rng);
    path.samples.push_back({t0 + (k + 1) * h, st.pos});
  }
  path.frame = st.frame;
  return path;
}

AmbientPath pushforward_y(const FlowTrajectory& traj, const BMPath& path) {
  AmbientPath out;
  out.times.reserve(path.samples.size());
  out.points.reserve(path.samples.size());
  for (const auto& s : path.samples) {
    const auto slice = traj.slice_backward(s.t);
    out.times.push_back(s.t);
    out.points.push_back(slice.ambient(s.x));
  }
  return out;
}

EnsembleResult run_ensemble(const FlowTrajectory& traj, const std::vector<SurfacePoint>& starts,
                            const EnsembleOptions& opts) {
  opts.conv.validate();
  if (opts.paths <= 0) fail(ErrorCode::BadParams, "ensemble needs at least one path");
  if (!(opts.t1 > opts.t0)) fail(ErrorCode::BadParams, "ensemble needs t1 > t0");
  if (starts.size() != 1 && static_cast<int>(starts.size()) != opts.paths)
    fail(ErrorCode::BadParams, "starts must have size 1 or n_paths");

  const int n = opts.paths;
  const int steps = std::max(1, static_cast<int>(std::llround((opts.t1 - opts.t0) / opts.dt)));
  const double h = (opts.t1 - opts.t0) / steps;

  EnsembleResult res;
  res.n_paths = n;
  res.dt = h;
  res.grid.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) res.grid[k] = opts.t0 + k * h;
  res.qv_mean.assign(steps + 1, 0.0);

  std::vector<WalkerState> states(n);
  std::vector<RngStream> streams;
  streams.reserve(n);
  for (int i = 0; i < n; ++i) streams.push_back(RngStream::for_path(opts.seed, i));

  {
    const auto slice0 = traj.slice_backward(opts.t0);
    for (int i = 0; i < n; ++i) {
      states[i].pos = starts[starts.size() == 1 ? 0 : i];
      states[i].frame = default_frame(slice0, states[i].pos);
    }
  }

  // checkpoint bookkeeping
  std::vector<int> checkpoint_idx;
  for (double tc : opts.checkpoints) {
    int k = static_cast<int>(std::llround((tc - opts.t0) / h));
    checkpoint_idx.push_back(std::clamp(k, 0, steps));
  }
  res.checkpoint_times.resize(checkpoint_idx.size());
  res.checkpoint_y.resize(checkpoint_idx.size());
  res.checkpoint_x.resize(checkpoint_idx.size());
  for (size_t j = 0; j < checkpoint_idx.size(); ++j)
    res.checkpoint_times[j] = res.grid[checkpoint_idx[j]];

  if (opts.sample_stride > 0) res.saved.assign(n, {});

  const Vec3 centroid0 = traj.snapshot(0).centroid();
  std::vector<Vec3> prev_y(n);
  std::vector<double> qv(n, 0.0);
  std::vector<double> step_qv(n, 0.0);

  for (int k = 0; k <= steps; ++k) {
    const double t = res.grid[k];
    const auto slice = traj.slice_backward(t);

    // sample positions on the current slice, then advance
    parallel_for(n, [&](int i) {
      const Vec3 y = slice.ambient(states[i].pos);
      if (k == 0) {
        prev_y[i] = y;
        step_qv[i] = 0;
      } else {
        step_qv[i] = (y - prev_y[i]).squaredNorm();
        prev_y[i] = y;
      }
      if (k < steps) gtbm_step_on_slice(slice, states[i], h, opts.conv, streams[i]);
    });

    // deterministic path-ordered reductions
    double qv_sum = 0;
    for (int i = 0; i < n; ++i) {
      qv[i] += step_qv[i];
      qv_sum += qv[i];
      const double r = prev_y[i].norm();
      res.max_abs_y = std::max(res.max_abs_y, r);
      res.max_dist_centroid0 = std::max(res.max_dist_centroid0, (prev_y[i] - centroid0).norm());
    }
    res.qv_mean[k] = qv_sum / n;

    for (size_t j = 0; j < checkpoint_idx.size(); ++j) {
      if (checkpoint_idx[j] == k) {
        res.checkpoint_y[j].resize(n);
        res.checkpoint_x[j].resize(n);
        for (int i = 0; i < n; ++i) {
          res.checkpoint_y[j][i] = prev_y[i];
          res.checkpoint_x[j][i] = states[i].pos;
        }
      }
    }
    if (opts.sample_stride > 0 && (k % opts.sample_stride == 0 || k == steps))
      for (int i = 0; i < n; ++i) res.saved[i].push_back({t, states[i].pos});
  }

  res.terminal.resize(n);
  res.terminal_y.resize(n);
  for (int i = 0; i < n; ++i) {
    res.terminal[i] = states[i].pos;
    res.terminal_y[i] = prev_y[i];
  }
  return res;
}

}  // namespace shrinkflow
