#include "shrinkflow/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "shrinkflow/curvature.hpp"
#include "shrinkflow/geodesic.hpp"
#include "shrinkflow/parallel.hpp"

namespace shrinkflow {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::Independent: return "independent";
    case Regime::Mirror: return "mirror";
    case Regime::Coalesced: return "coalesced";
  }
  return "?";
}

namespace {

// Edge-graph Dijkstra distances from one vertex (probe-pair selection only).
std::vector<double> vertex_graph_distances(const TriangulatedHypersurface& mesh, int source) {
  const auto& topo = mesh.topology();
  std::vector<double> dist(topo.n_vertices, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0;
  heap.push({0, source});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v] + 1e-15) continue;
    for (int t : topo.vertex_triangles[v]) {
      for (int k = 0; k < 3; ++k) {
        const int w = topo.triangles[t][k];
        if (w == v) continue;
        const double nd = d + (mesh.positions()[v] - mesh.positions()[w]).norm();
        if (nd < dist[w]) {
          dist[w] = nd;
          heap.push({nd, w});
        }
      }
    }
  }
  return dist;
}

SurfacePoint vertex_point(const TriangulatedHypersurface& mesh, int v) {
  SurfacePoint p;
  p.triangle = mesh.topology().vertex_triangles[v].front();
  p.bary = Vec3::Zero();
  p.bary[mesh.topology().local_index(p.triangle, v)] = 1.0;
  return p;
}

}  // namespace

double injectivity_proxy(const TriangulatedHypersurface& mesh) {
  {
    auto report = validate_convex_mesh(mesh);
    if (!report.strictly_convex) fail(ErrorCode::NotConvex, "injectivity proxy needs a convex mesh");
  }
  const double kmax = max_gaussian_curvature(mesh);
  double candidate = (kmax > 0) ? M_PI / std::sqrt(kmax) : mesh.diameter_hint();

  // Ambiguity probe: sampled pairs near the candidate radius must yield a
  // unique straightened geodesic; shrink until they do.
  const int nv = mesh.n_vertices();
  const int n_probes = 6;
  for (int attempt = 0; attempt < 5; ++attempt) {
    bool clean = true;
    for (int s = 0; s < n_probes && clean; ++s) {
      const int src = (s * 2654435761u) % nv;
      const auto dist = vertex_graph_distances(mesh, src);
      const double target = 0.85 * candidate;
      int best = -1;
      double best_err = std::numeric_limits<double>::infinity();
      for (int v = 0; v < nv; ++v) {
        if (!std::isfinite(dist[v])) continue;
        const double err = std::abs(dist[v] - target);
        if (err < best_err) {
          best_err = err;
          best = v;
        }
      }
      if (best < 0 || dist[best] < 0.5 * target) continue;
      GeodesicOptions opts;
      opts.check_ambiguity = true;
      try {
        (void)minimal_geodesic(mesh, vertex_point(mesh, src), vertex_point(mesh, best), opts);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AmbiguousGeodesic) throw;
        clean = false;
      }
    }
    if (clean) break;
    candidate *= 0.9;
  }
  return candidate;
}

TangentVector mirror_map(const TriangulatedHypersurface& mesh, const SurfacePoint& x,
                         const SurfacePoint& y, const TangentVector& v, double max_distance,
                         double unique_below) {
  GeodesicOptions opts;
  opts.check_ambiguity = true;
  opts.ambiguity_skip_below = unique_below;
  const GeodesicPath geod = minimal_geodesic(mesh, x, y, opts);
  if (max_distance > 0 && geod.length > max_distance)
    fail(ErrorCode::TooFar, "points are farther apart than the mirror range");
  TangentVector w = parallel_transport(mesh, geod, v);
  const Vec3 g = geod.end_tangent.dir;
  if (g.norm() > 0) w.dir -= 2.0 * w.dir.dot(g) * g;
  return w;
}

void CouplingConfig::validate() const {
  if (!(theta > 0 && theta < theta_far && theta_far <= inj_proxy))
    fail(ErrorCode::ConfigError, "need 0 < theta < theta_far <= inj_proxy");
  if (!(phase_cap > 0)) fail(ErrorCode::ConfigError, "phase_cap must be positive");
  if (!(start_time < end_time)) fail(ErrorCode::ConfigError, "empty coupling window");
  conv.validate();
}

CouplingConfig make_coupling_config(const FlowTrajectory& traj, double start_time,
                                    double end_time, GeneratorConvention conv, double dt) {
  CouplingConfig cfg;
  const auto slice = traj.slice_backward(start_time);
  cfg.inj_proxy = injectivity_proxy(slice);
  cfg.theta = cfg.inj_proxy / 4.0;     // the schedule's quarter threshold
  cfg.theta_far = cfg.inj_proxy / 2.0;
  cfg.delta_c = 2.0 * slice.mean_edge_length();
  cfg.start_time = start_time;
  cfg.end_time = end_time;
  cfg.dt = dt;
  cfg.conv = conv;
  cfg.validate();
  return cfg;
}

void coupled_step(const TriangulatedHypersurface& slice, PairState& state, double dt,
                  GeneratorConvention conv, RandomSource& rng, double unique_below,
                  double delta_c) {
  if (state.coalesced || (slice.ambient(state.a.pos) - slice.ambient(state.b.pos)).norm() <=
                             std::min(delta_c, 1e-14)) {
    state.coalesced = true;
    state.b = state.a;
    gtbm_step_on_slice(slice, state.a, dt, conv, rng);
    state.b = state.a;
    return;
  }

  // One Gaussian increment drives the first walker; the second receives its
  // mirror image along the connecting geodesic.
  Vec3 e1 = slice.project_to_plane(state.a.pos.triangle, state.a.frame);
  if (e1.norm() < 1e-12) e1 = default_frame(slice, state.a.pos);
  e1.normalize();
  const Vec3 e2 = slice.triangle_normal(state.a.pos.triangle).cross(e1);
  const double sigma = std::sqrt(2.0 * conv.c * dt);
  const Vec3 xi = sigma * rng.normal() * e1 + sigma * rng.normal() * e2;

  TangentVector va;
  va.base = state.a.pos;
  va.dir = xi;
  const TangentVector vb = mirror_map(slice, state.a.pos, state.b.pos, va, 0, unique_below);

  const WalkResult wa = walk_exponential(slice, state.a.pos, va);
  const WalkResult wb = walk_exponential(slice, state.b.pos, vb);
  state.a.pos = wa.end;
  state.b.pos = wb.end;
  auto fix_frame = [&](WalkerState& w, const Eigen::Matrix3d& rot) {
    Vec3 f = slice.project_to_plane(w.pos.triangle, rot * w.frame);
    w.frame = (f.norm() > 1e-12) ? Vec3(f.normalized()) : default_frame(slice, w.pos);
  };
  fix_frame(state.a, wa.transport);
  fix_frame(state.b, wb.transport);

  if (intrinsic_distance(slice, state.a.pos, state.b.pos) <= delta_c) {
    state.coalesced = true;
    state.b = state.a;
  }
}

namespace {

// Homothety-calibrated intrinsic estimate from the ambient chord (slices of
// a convex flow are near-round; exact values are used at regime decisions).
double chord_to_arc(const TriangulatedHypersurface& slice, double chord) {
  const double r = std::sqrt(slice.total_area() / (4.0 * M_PI));
  const double x = std::min(1.0, chord / (2.0 * r));
  return 2.0 * r * std::asin(x);
}

}  // namespace

bool CouplingRun::phase_caps_respected(double cap, const FlowTrajectory& traj) const {
  for (size_t i = 0; i + 1 < stopping_times.size(); ++i) {
    const double dtau = traj.tau(stopping_times[i + 1]) - traj.tau(stopping_times[i]);
    if (dtau > cap * (1 + 1e-6)) return false;
  }
  return true;
}

CouplingRun run_coupling_schedule(const FlowTrajectory& traj, const CouplingConfig& cfg,
                                  const SurfacePoint& start_a, const SurfacePoint& start_b,
                                  RandomSource& rng, int record_stride,
                                  const std::vector<double>& checkpoints) {
  cfg.validate();
  CouplingRun run;
  run.start_tau = traj.tau(cfg.start_time);
  run.end_tau = traj.tau(cfg.end_time);
  run.stopping_times.push_back(cfg.start_time);

  const int steps =
      std::max(1, static_cast<int>(std::llround((cfg.end_time - cfg.start_time) / cfg.dt)));
  const double h = (cfg.end_time - cfg.start_time) / steps;
  const double flow_ref = traj.t_explosion_estimate - cfg.start_time;

  PairState st;
  st.a.pos = start_a;
  st.b.pos = start_b;
  Regime regime = Regime::Independent;
  double phase_start_tau = run.start_tau;

  size_t next_checkpoint = 0;
  auto maybe_checkpoint = [&](double t, const TriangulatedHypersurface&) {
    while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] <= t + h / 2) {
      run.b_checkpoints.emplace_back(checkpoints[next_checkpoint], st.b.pos);
      ++next_checkpoint;
    }
  };

  {
    const auto slice0 = traj.slice_backward(cfg.start_time);
    st.a.frame = default_frame(slice0, st.a.pos);
    st.b.frame = default_frame(slice0, st.b.pos);
    if (intrinsic_distance(slice0, st.a.pos, st.b.pos) <= cfg.delta_c) {
      st.coalesced = true;
      st.b = st.a;
      regime = Regime::Coalesced;
      run.coupling_time = cfg.start_time;
      run.coupling_tau = 0.0;
    }
  }

  for (int k = 0; k < steps; ++k) {
    const double t = cfg.start_time + k * h;
    const auto slice = traj.slice_backward(t);
    const double scale = traj.scale_between(flow_ref, traj.t_explosion_estimate - t);
    const double theta = cfg.theta * scale;
    const double theta_far = cfg.theta_far * scale;
    const double delta_c = cfg.delta_c * scale;
    const double unique_below = 0.9 * cfg.inj_proxy * scale;
    const double tau_now = traj.tau(t);

    double rho = -1;
    bool rho_exact = false;

    if (regime == Regime::Coalesced) {
      gtbm_step_on_slice(slice, st.a, h, cfg.conv, rng);
      st.b = st.a;
      rho = 0;
      rho_exact = true;
    } else if (regime == Regime::Independent) {
      gtbm_step_on_slice(slice, st.a, h, cfg.conv, rng);
      gtbm_step_on_slice(slice, st.b, h, cfg.conv, rng);
      const double chord = (slice.ambient(st.a.pos) - slice.ambient(st.b.pos)).norm();
      rho = chord_to_arc(slice, chord);
      if (chord <= theta * 1.2) {
        rho = intrinsic_distance(slice, st.a.pos, st.b.pos);
        rho_exact = true;
      }
      if (rho_exact && rho <= theta) {
        run.stopping_times.push_back(t + h);
        regime = Regime::Mirror;
        phase_start_tau = traj.tau(std::min(t + h, cfg.end_time));
      } else if (tau_now - phase_start_tau >= cfg.phase_cap) {
        // Phase cap reached with the pair still far apart: the mirror phase
        // degenerates and a fresh independent phase starts.
        run.stopping_times.push_back(t + h);
        run.stopping_times.push_back(t + h);
        phase_start_tau = traj.tau(std::min(t + h, cfg.end_time));
      }
    } else {  // Mirror
      try {
        coupled_step(slice, st, h, cfg.conv, rng, unique_below, delta_c);
        if (st.coalesced) {
          regime = Regime::Coalesced;
          run.coupling_time = t + h;
          run.coupling_tau = traj.tau(std::min(t + h, cfg.end_time)) - run.start_tau;
          run.stopping_times.push_back(t + h);
          rho = 0;
          rho_exact = true;
        } else {
          rho = intrinsic_distance(slice, st.a.pos, st.b.pos);
          rho_exact = true;
          if (rho > theta_far || tau_now - phase_start_tau >= cfg.phase_cap) {
            run.stopping_times.push_back(t + h);
            regime = Regime::Independent;
            phase_start_tau = traj.tau(std::min(t + h, cfg.end_time));
          }
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AmbiguousGeodesic) throw;
        // Near-tie geodesics: take one independent step and retry the mirror.
        run.ambiguous_fallbacks += 1;
        gtbm_step_on_slice(slice, st.a, h, cfg.conv, rng);
        gtbm_step_on_slice(slice, st.b, h, cfg.conv, rng);
        const double chord = (slice.ambient(st.a.pos) - slice.ambient(st.b.pos)).norm();
        rho = chord_to_arc(slice, chord);
      }
    }

    if (k % record_stride == 0 || k + 1 == steps || rho == 0) {
      if (rho < 0) {
        const double chord = (slice.ambient(st.a.pos) - slice.ambient(st.b.pos)).norm();
        rho = chord_to_arc(slice, chord);
      }
      run.series.push_back({t + h, regime, rho, rho_exact});
    }
    maybe_checkpoint(t + h, slice);
  }
  return run;
}

TvDecayReport tv_decay_estimate(const FlowTrajectory& traj, const CouplingConfig& cfg,
                                const SurfacePoint& start_a, const SurfacePoint& start_b,
                                const std::vector<double>& window_lengths, int n_runs,
                                uint64_t seed) {
  if (n_runs < 50) fail(ErrorCode::InsufficientRuns, "need at least 50 runs");
  TvDecayReport rep;
  rep.window_lengths = window_lengths;
  rep.n_runs = n_runs;

  std::vector<std::optional<double>> coal_tau(n_runs);
  parallel_for(n_runs, [&](int i) {
    RngStream rng = RngStream::for_path(seed, i);
    const auto run = run_coupling_schedule(traj, cfg, start_a, start_b, rng, 1 << 20);
    coal_tau[i] = run.coupling_tau;
  });

  int coalesced = 0;
  for (const auto& c : coal_tau)
    if (c) ++coalesced;
  rep.coupling_probability = static_cast<double>(coalesced) / n_runs;

  std::vector<double> xs, ys;
  for (double k : window_lengths) {
    int no_coal = 0;
    for (const auto& c : coal_tau)
      if (!c || *c > k) ++no_coal;
    const double p = static_cast<double>(no_coal) / n_runs;
    rep.p_no_coalescence.push_back(p);
    if (p > 0) {
      xs.push_back(k);
      ys.push_back(std::log(p));
    }
  }
  rep.log_fit = linear_fit(xs, ys);
  return rep;
}

MarginalCheckReport coupling_marginal_check(const FlowTrajectory& traj,
                                            const CouplingConfig& cfg,
                                            const SurfacePoint& start_a,
                                            const SurfacePoint& start_b,
                                            const std::vector<double>& checkpoints, int n_runs,
                                            uint64_t seed) {
  MarginalCheckReport rep;
  rep.times = checkpoints;
  rep.n_runs = n_runs;

  // Mirrored ensemble: record the driven walker at the checkpoints.
  std::vector<std::vector<Vec3>> coupled_y(checkpoints.size(),
                                           std::vector<Vec3>(n_runs, Vec3::Zero()));
  parallel_for(n_runs, [&](int i) {
    RngStream rng = RngStream::for_path(seed, i);
    const auto run =
        run_coupling_schedule(traj, cfg, start_a, start_b, rng, 1 << 20, checkpoints);
    for (size_t j = 0; j < checkpoints.size() && j < run.b_checkpoints.size(); ++j) {
      const auto slice = traj.slice_backward(run.b_checkpoints[j].first);
      coupled_y[j][i] = slice.ambient(run.b_checkpoints[j].second);
    }
  });

  // Reference ensemble: independent diffusion from the same start.
  EnsembleOptions opts;
  opts.t0 = cfg.start_time;
  opts.t1 = cfg.end_time;
  opts.dt = cfg.dt;
  opts.conv = cfg.conv;
  opts.seed = seed + 0x9E37;
  opts.paths = n_runs;
  opts.checkpoints = checkpoints;
  const auto ref = run_ensemble(traj, {start_b}, opts);

  for (size_t j = 0; j < checkpoints.size(); ++j) {
    std::array<double, 3> ps{1, 1, 1};
    for (int d = 0; d < 3; ++d) {
      std::vector<double> a(n_runs), b(n_runs);
      for (int i = 0; i < n_runs; ++i) {
        a[i] = coupled_y[j][i][d];
        b[i] = ref.checkpoint_y[j][i][d];
      }
      const auto ks = ks_test_two_sample(std::move(a), std::move(b));
      ps[d] = ks.p_value;
      rep.min_p = std::min(rep.min_p, ks.p_value);
    }
    rep.ks_p.push_back(ps);
  }
  return rep;
}

}  // namespace shrinkflow
