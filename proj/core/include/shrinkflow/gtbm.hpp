#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shrinkflow/flow.hpp"
#include "shrinkflow/rng.hpp"
#include "shrinkflow/sphere_oracle.hpp"
#include "shrinkflow/stats.hpp"

namespace shrinkflow {

/// Generator coefficient: the diffusion generator is c * Laplace-Beltrami of
/// the current slice metric. c = 1/2 is the probabilistic convention (the
/// one the backward density equation uses); c = 1 reproduces the ambient
/// quadratic-variation slope 2n.
struct GeneratorConvention {
  double c = 0.5;

  static GeneratorConvention half() { return {0.5}; }
  static GeneratorConvention full() { return {1.0}; }
  static GeneratorConvention from_string(const std::string& s);
  const char* name() const { return c == 0.5 ? "half" : "full"; }
  void validate() const;
};

/// Diffusing point with its transported tangent frame. Only the first frame
/// leg is stored; the second is (surface normal) x (first), which the
/// orientation-preserving edge rotations transport consistently.
struct WalkerState {
  SurfacePoint pos;
  Vec3 frame = Vec3::Zero();
};

Vec3 default_frame(const TriangulatedHypersurface& slice, const SurfacePoint& p);

/// One tangent-Gaussian increment (covariance 2c*dt per frame component)
/// realized through the discrete exponential map on a fixed slice; the frame
/// rides along and is re-orthonormalized in the arrival plane.
void gtbm_step_on_slice(const TriangulatedHypersurface& slice, WalkerState& state, double dt,
                        GeneratorConvention conv, RandomSource& rng);

/// Backward-relabeled step: simulator time t means the slice at T_c - t.
SurfacePoint gtbm_step(const FlowTrajectory& traj, double t, const SurfacePoint& p, double dt,
                       GeneratorConvention conv, RandomSource& rng);

struct BMPathSample {
  double t = 0;
  SurfacePoint x;
};

struct BMPath {
  std::vector<BMPathSample> samples;
  Vec3 frame = Vec3::Zero();  // transported frame leg at the final sample
  uint64_t rng_stream_id = 0;
};

BMPath simulate_path(const FlowTrajectory& traj, const SurfacePoint& start, double t0, double t1,
                     double dt, GeneratorConvention conv, RandomSource& rng);

struct AmbientPath {
  std::vector<double> times;
  std::vector<Vec3> points;
};

/// Y_t: ambient position of the intrinsic path on the slice at T_c - t.
AmbientPath pushforward_y(const FlowTrajectory& traj, const BMPath& path);

// ---------------------------------------------------------------------------
// Ensemble engine (time-major: one slice per grid time shared by all paths;
// per-path RNG streams and path-ordered reductions keep results identical
// for any worker count).

struct EnsembleOptions {
  double t0 = 0, t1 = 0, dt = 1e-4;
  GeneratorConvention conv;
  uint64_t seed = 7;
  int paths = 1000;
  std::vector<double> checkpoints;  // times at which per-path states are kept
  int sample_stride = 0;            // 0: keep no per-sample data
};

struct EnsembleResult {
  std::vector<double> grid;
  std::vector<double> qv_mean;  // mean realized ambient QV accumulated from t0
  std::vector<SurfacePoint> terminal;
  std::vector<Vec3> terminal_y;
  std::vector<double> checkpoint_times;
  std::vector<std::vector<Vec3>> checkpoint_y;           // [checkpoint][path]
  std::vector<std::vector<SurfacePoint>> checkpoint_x;   // [checkpoint][path]
  double max_abs_y = 0;
  double max_dist_centroid0 = 0;
  double max_frame_norm_drift = 0;  // before renormalization, per step
  std::vector<std::vector<BMPathSample>> saved;  // decimated (sample_stride > 0)
  int n_paths = 0;
  double dt = 0;
};

EnsembleResult run_ensemble(const FlowTrajectory& traj, const std::vector<SurfacePoint>& starts,
                            const EnsembleOptions& opts);

// ---------------------------------------------------------------------------
// Statistical verification suite.

struct MartingaleQvReport {
  double qv_slope = 0;
  double qv_expected = 0;  // 2 c n
  double qv_r2 = 0;
  std::vector<double> drift_z;  // per window x coordinate
  double max_abs_drift_z = 0;
  double max_abs_y = 0;
  double diameter0 = 0;
  bool y_bounded = false;
  int n_paths = 0;
};

/// Drift z-scores and realized-QV regression over [window_lo, window_hi].
/// Requires >= 100 paths (InsufficientPaths otherwise).
MartingaleQvReport martingale_qv_test(const EnsembleResult& ens, GeneratorConvention conv,
                                      int n_dim, double diameter0, double window_lo,
                                      double window_hi);

struct BirthlessReport {
  std::vector<double> epsilons;
  double t_star = 0;
  int n_paths = 0;
  std::vector<VertexHistogram> laws;
  std::vector<double> tv_consecutive;         // coarse-partition TV between eps_k, eps_{k+1}
  std::vector<double> tv_consecutive_vertex;  // per-vertex TV (biased high; diagnostic)
};

/// Freeze at x0 until each epsilon, run to t_star, compare the terminal laws
/// (the numerical Cauchy-in-epsilon convergence experiment).
BirthlessReport birthless_ensemble(const FlowTrajectory& traj, const SurfacePoint& x0,
                                   const std::vector<double>& eps_list, double t_star,
                                   int n_paths, GeneratorConvention conv, uint64_t seed);

struct TimeChangeReport {
  double resample_spacing = 0;   // spacing of the log-clock resampling grid
  double qv_slope = 0;           // per unit resampled clock, fixed-sphere metric
  double expected_slope = 0;     // c * n
  double ks_p = 0;               // angular increments vs the exact sphere kernel
  double qv_ratio_worst_rel = 0; // local QV rate ratios vs the homothety scale
  double endpoint_identity = 0;  // |phi(0) - T_c|
  int n_samples = 0;
};

struct TimeChangeOptions {
  int paths = 2000;
  double s_lo = -2.0;       // resampling grid lower end (clock units, <= 0)
  int intervals = 20;
  double substep_var = 3e-4;  // angular variance per simulation substep
  uint64_t seed = 7;
};

/// Analytic-slice (no mesh) check that the deterministically re-clocked
/// backward sphere process has fixed-metric Brownian statistics.
TimeChangeReport sphere_time_change_check(const SphereFlowOracle& oracle,
                                          GeneratorConvention conv,
                                          const TimeChangeOptions& opts);

}  // namespace shrinkflow
