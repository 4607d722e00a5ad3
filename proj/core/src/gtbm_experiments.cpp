#include <algorithm>
#include <cmath>

#include "shrinkflow/gtbm.hpp"
#include "shrinkflow/parallel.hpp"

namespace shrinkflow {

MartingaleQvReport martingale_qv_test(const EnsembleResult& ens, GeneratorConvention conv,
                                      int n_dim, double diameter0, double window_lo,
                                      double window_hi) {
  if (ens.n_paths < 100) fail(ErrorCode::InsufficientPaths, "need at least 100 paths");
  MartingaleQvReport rep;
  rep.n_paths = ens.n_paths;
  rep.qv_expected = 2.0 * conv.c * n_dim;
  rep.diameter0 = diameter0;
  rep.max_abs_y = ens.max_abs_y;
  rep.y_bounded = ens.max_abs_y <= diameter0 * (1 + 1e-6);

  std::vector<double> xs, ys;
  for (size_t k = 0; k < ens.grid.size(); ++k) {
    if (ens.grid[k] < window_lo - 1e-12 || ens.grid[k] > window_hi + 1e-12) continue;
    xs.push_back(ens.grid[k]);
    ys.push_back(ens.qv_mean[k]);
  }
  const LinearFit fit = linear_fit(xs, ys);
  rep.qv_slope = fit.slope;
  rep.qv_r2 = fit.r2;

  // Drift z-scores over every checkpoint-to-checkpoint window plus the full
  // span, per ambient coordinate.
  auto push_window = [&](size_t a, size_t b) {
    if (ens.checkpoint_y[a].empty() || ens.checkpoint_y[b].empty()) return;
    for (int d = 0; d < 3; ++d) {
      std::vector<double> inc(ens.n_paths);
      for (int i = 0; i < ens.n_paths; ++i)
        inc[i] = ens.checkpoint_y[b][i][d] - ens.checkpoint_y[a][i][d];
      rep.drift_z.push_back(summarize(inc).z_score());
    }
  };
  for (size_t a = 0; a + 1 < ens.checkpoint_y.size(); ++a) push_window(a, a + 1);
  if (ens.checkpoint_y.size() >= 3) push_window(0, ens.checkpoint_y.size() - 1);
  for (double z : rep.drift_z) rep.max_abs_drift_z = std::max(rep.max_abs_drift_z, std::abs(z));
  return rep;
}

BirthlessReport birthless_ensemble(const FlowTrajectory& traj, const SurfacePoint& x0,
                                   const std::vector<double>& eps_list, double t_star,
                                   int n_paths, GeneratorConvention conv, uint64_t seed) {
  conv.validate();
  BirthlessReport rep;
  rep.epsilons = eps_list;
  rep.t_star = t_star;
  rep.n_paths = n_paths;
  for (double eps : eps_list) {
    if (!(eps > 0 && eps < t_star))
      fail(ErrorCode::BadParams, "each epsilon must lie in (0, t_star)");
  }
  const auto slice_star = traj.slice_backward(t_star);
  const auto bins = coarse_partition(slice_star);

  for (double eps : eps_list) {
    EnsembleOptions opts;
    opts.t0 = eps;  // frozen at x0 until eps; simulation starts there
    opts.t1 = t_star;
    opts.dt = 1e-4;
    opts.conv = conv;
    opts.seed = seed;  // common random numbers across the epsilon sequence
    opts.paths = n_paths;
    auto ens = run_ensemble(traj, {x0}, opts);
    rep.laws.push_back(VertexHistogram::from_points(slice_star, ens.terminal));
  }
  for (size_t i = 0; i + 1 < rep.laws.size(); ++i) {
    rep.tv_consecutive.push_back(tv_binned(rep.laws[i].mass, rep.laws[i + 1].mass, bins));
    rep.tv_consecutive_vertex.push_back(tv_vertexwise(rep.laws[i].mass, rep.laws[i + 1].mass));
  }
  return rep;
}

namespace {

void sphere_tangent_basis(const Vec3& u, Vec3& e1, Vec3& e2) {
  e1 = u.cross(std::abs(u[2]) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX()).normalized();
  e2 = u.cross(e1);
}

// Exact unit-sphere exponential step; component_var is the angular variance
// of each of the two tangent components. Returns the realized step angle.
double sphere_step(Vec3& u, double component_var, RandomSource& rng) {
  Vec3 e1, e2;
  sphere_tangent_basis(u, e1, e2);
  const double s = std::sqrt(component_var);
  const double a1 = s * rng.normal();
  const double a2 = s * rng.normal();
  const double alpha = std::hypot(a1, a2);
  if (alpha == 0) return 0;
  const Vec3 dir = (a1 * e1 + a2 * e2) / alpha;
  u = std::cos(alpha) * u + std::sin(alpha) * dir;
  u.normalize();
  return alpha;
}

}  // namespace

TimeChangeReport sphere_time_change_check(const SphereFlowOracle& oracle,
                                          GeneratorConvention conv,
                                          const TimeChangeOptions& opts) {
  conv.validate();
  if (oracle.n != 2)
    fail(ErrorCode::BadParams, "the simulated check runs on the 2-sphere (n = 2)");
  if (opts.s_lo >= 0 || opts.intervals < 4) fail(ErrorCode::BadParams, "bad resampling grid");

  TimeChangeReport rep;
  const double tc = oracle.explosion_time();
  const double r02 = oracle.r0 * oracle.r0;
  rep.endpoint_identity = std::abs(oracle.phi(0.0) - tc);
  const double ds = (0.0 - opts.s_lo) / opts.intervals;
  rep.resample_spacing = ds;
  rep.expected_slope = conv.c * oracle.n;

  // Backward-clock resampling times u_j = phi(s_j). The slice at backward
  // time u is the sphere of radius r(T_c - u), with r^2(T_c - u) = r0^2 u/T_c,
  // so the per-component angular variance accumulated over [ua, ub] is
  // 2 c T_c / r0^2 * log(ub / ua).
  std::vector<double> u_grid(opts.intervals + 1);
  for (int j = 0; j <= opts.intervals; ++j) u_grid[j] = oracle.phi(opts.s_lo + j * ds);

  const int n = opts.paths;
  std::vector<std::vector<double>> angles(n);            // resampled increment angles
  std::vector<std::vector<double>> realized_qv(n);       // sum of squared substep angles

  std::vector<RngStream> streams;
  streams.reserve(n);
  for (int i = 0; i < n; ++i) streams.push_back(RngStream::for_path(opts.seed, i));

  parallel_for(n, [&](int i) {
    Vec3 u = Vec3::UnitZ();
    angles[i].resize(opts.intervals);
    realized_qv[i].assign(opts.intervals, 0.0);
    for (int j = 0; j < opts.intervals; ++j) {
      const double ua = u_grid[j], ub = u_grid[j + 1];
      const double comp_var_total = 2.0 * conv.c * tc / r02 * std::log(ub / ua);
      const int sub =
          std::max(4, static_cast<int>(std::ceil(2.0 * comp_var_total / opts.substep_var)));
      const Vec3 before = u;
      double acc = 0;
      for (int m = 0; m < sub; ++m) {
        const double a = sphere_step(u, comp_var_total / sub, streams[i]);
        acc += a * a;
      }
      realized_qv[i][j] = acc;
      angles[i][j] = std::atan2(before.cross(u).norm(), before.dot(u));
    }
  });

  // KS of pooled resampled angles against the exact sphere heat kernel: the
  // re-clocked generator is (c/2) * Laplacian of the fixed initial metric,
  // i.e. (c / (2 r0^2)) * the unit-sphere Laplacian.
  std::vector<double> pooled;
  pooled.reserve(static_cast<size_t>(n) * opts.intervals);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < opts.intervals; ++j) pooled.push_back(angles[i][j]);
  const double a_eff = conv.c / (2.0 * r02);
  const auto ks = ks_test(pooled, [&](double th) { return sphere_angle_cdf(th, ds, a_eff); });
  rep.ks_p = ks.p_value;
  rep.n_samples = ks.n;

  // Realized-QV slope per unit resampled clock, measured in the fixed
  // initial metric (r0^2 * angular).
  {
    std::vector<double> xs(opts.intervals), ys(opts.intervals);
    double acc = 0;
    for (int j = 0; j < opts.intervals; ++j) {
      double mean = 0;
      for (int i = 0; i < n; ++i) mean += realized_qv[i][j];
      acc += r02 * mean / n;
      xs[j] = (j + 1) * ds;
      ys[j] = acc;
    }
    rep.qv_slope = linear_fit(xs, ys).slope;
  }

  // Local QV rate on the backward clock; ratios across windows must follow
  // the homothetic Laplacian scale. Comparing at the log-mean point of each
  // window makes the expectation exact.
  {
    std::vector<double> rate(opts.intervals), u_lm(opts.intervals);
    for (int j = 0; j < opts.intervals; ++j) {
      double mean = 0;
      for (int i = 0; i < n; ++i) mean += realized_qv[i][j];
      const double du = u_grid[j + 1] - u_grid[j];
      rate[j] = (mean / n) / du;
      u_lm[j] = du / std::log(u_grid[j + 1] / u_grid[j]);
    }
    const int ref = opts.intervals / 2;
    double worst = 0;
    for (int j = 0; j < opts.intervals; ++j) {
      const double expected =
          oracle.laplacian_scale(tc - u_lm[j]) / oracle.laplacian_scale(tc - u_lm[ref]);
      const double measured = rate[j] / rate[ref];
      worst = std::max(worst, std::abs(measured / expected - 1.0));
    }
    rep.qv_ratio_worst_rel = worst;
  }
  return rep;
}

}  // namespace shrinkflow
