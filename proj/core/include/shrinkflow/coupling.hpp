#pragma once

#include <optional>
#include <vector>

#include "shrinkflow/gtbm.hpp"

namespace shrinkflow {

/// Conservative radius within which minimal geodesics are unique on probe
/// pairs: min of pi / sqrt(max discrete Gaussian curvature) and an
/// ambiguity-probe shrink. Throws NotConvex on non-convex input.
double injectivity_proxy(const TriangulatedHypersurface& mesh);

/// Transport along the unique minimal geodesic x -> y, then reflect in the
/// hyperplane perpendicular to the arriving direction. Isometric. Throws
/// TooFar past max_distance and propagates AmbiguousGeodesic.
TangentVector mirror_map(const TriangulatedHypersurface& mesh, const SurfacePoint& x,
                         const SurfacePoint& y, const TangentVector& v, double max_distance,
                         double unique_below = 0);

struct CouplingConfig {
  double theta = 0;      // mirror engages at distance <= theta (reference-slice units)
  double theta_far = 0;  // mirror disengages above (2 * theta)
  double phase_cap = 0.5;  // max phase duration, stretched-clock units
  double inj_proxy = 0;    // measured on the start slice
  double delta_c = 0;      // coalescence radius (2 * mean edge of the start slice)
  double start_time = 0;   // backward clock
  double end_time = 0;
  double dt = 2e-4;
  GeneratorConvention conv;

  void validate() const;
};

/// Thresholds measured on the slice at start_time; during a run they scale
/// with the homothety factor sqrt(area(t)/area(start)).
CouplingConfig make_coupling_config(const FlowTrajectory& traj, double start_time,
                                    double end_time, GeneratorConvention conv,
                                    double dt = 2e-4);

enum class Regime { Independent, Mirror, Coalesced };
const char* to_string(Regime r);

struct PairState {
  WalkerState a, b;
  bool coalesced = false;
};

/// One mirror-coupled step on a fixed slice: a single Gaussian increment
/// drives the first walker; the second moves by its mirror image. Coalesces
/// when the post-step distance drops below delta_c.
void coupled_step(const TriangulatedHypersurface& slice, PairState& state, double dt,
                  GeneratorConvention conv, RandomSource& rng, double unique_below,
                  double delta_c);

struct DistanceSample {
  double t = 0;
  Regime regime = Regime::Independent;
  double distance = 0;
  bool exact = false;  // exact intrinsic vs homothety-calibrated chord estimate
};

struct CouplingRun {
  std::vector<DistanceSample> series;
  std::vector<double> stopping_times;  // schedule switch points T_k
  std::optional<double> coupling_time;
  int ambiguous_fallbacks = 0;
  double start_tau = 0, end_tau = 0;
  std::optional<double> coupling_tau;  // tau(coupling_time) - tau(start)
  std::vector<std::pair<double, SurfacePoint>> b_checkpoints;  // for marginal checks

  bool phase_caps_respected(double cap, const FlowTrajectory& traj) const;
};

/// Alternating independent / mirror schedule: independent until the distance
/// drops to theta, mirror until coalescence, escape past theta_far, or the
/// phase cap; iterate. After coalescence the pair is glued.
CouplingRun run_coupling_schedule(const FlowTrajectory& traj, const CouplingConfig& cfg,
                                  const SurfacePoint& start_a, const SurfacePoint& start_b,
                                  RandomSource& rng, int record_stride = 16,
                                  const std::vector<double>& checkpoints = {});

struct TvDecayReport {
  std::vector<double> window_lengths;  // stretched-clock units
  std::vector<double> p_no_coalescence;
  LinearFit log_fit;  // log P vs window length
  double coupling_probability = 0;  // by the full window
  int n_runs = 0;
};

/// Monte Carlo bound P(no coalescence by window length k), evaluated on
/// nested windows of the same run ensemble. InsufficientRuns below 50.
TvDecayReport tv_decay_estimate(const FlowTrajectory& traj, const CouplingConfig& cfg,
                                const SurfacePoint& start_a, const SurfacePoint& start_b,
                                const std::vector<double>& window_lengths, int n_runs,
                                uint64_t seed);

struct MarginalCheckReport {
  std::vector<double> times;
  std::vector<std::array<double, 3>> ks_p;  // per checkpoint, per coordinate
  double min_p = 1.0;
  int n_runs = 0;
};

/// Two-sample KS per coordinate between the mirrored walker's marginals and
/// an independently simulated diffusion started identically.
MarginalCheckReport coupling_marginal_check(const FlowTrajectory& traj,
                                            const CouplingConfig& cfg,
                                            const SurfacePoint& start_a,
                                            const SurfacePoint& start_b,
                                            const std::vector<double>& checkpoints, int n_runs,
                                            uint64_t seed);

// ---------------------------------------------------------------------------
// Index-form comparison function.

/// mu = sqrt((1 - eps) / (n - 1)).
double comparison_mu(int n, double eps);

/// G(s) = cos(mu s) + (1 - cos(mu r)) / sin(mu r) * sin(mu s), the solution
/// of G'' + mu^2 G = 0 with G(0) = G(r) = 1. DomainError when sin(mu r)
/// degenerates (r outside (0, pi/mu)).
double comparison_g(double s, double r, int n, double eps);

/// G'(r) - G'(0) = -2 mu tan(mu r / 2) (always <= 0 on the valid domain).
double comparison_g_gap(double r, int n, double eps);

/// Analytic residual G'' + mu^2 G of the closed form (machine-zero).
double comparison_g_ode_residual(double s, double r, int n, double eps);

}  // namespace shrinkflow
