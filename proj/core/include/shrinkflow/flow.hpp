#pragma once

#include <memory>
#include <vector>

#include "shrinkflow/mesh.hpp"

namespace shrinkflow {

enum class McfScheme { Explicit, SemiImplicit };

const char* to_string(McfScheme s);
McfScheme mcf_scheme_from_string(const std::string& s);

/// One mean curvature flow step: vertices move by dt * (Laplacian of the
/// embedding), explicitly or by the semi-implicit solve
/// (A + dt K) X_new = A X_old. Throws StepRejected if a triangle inverts or
/// degrades past the quality threshold.
TriangulatedHypersurface mcf_step(const TriangulatedHypersurface& mesh, double dt,
                                  McfScheme scheme, double quality_threshold = 50.0);

struct FlowOptions {
  double dt0 = 1e-4;
  double stop_area_fraction = 0.05;
  McfScheme scheme = McfScheme::SemiImplicit;
  double curvature_safety = 0.2;    // dt <= safety / H_max^2
  double quality_threshold = 50.0;  // per-triangle max/min edge ratio
  int target_snapshots = 320;       // snapshot thinning control (0 = every step)
  bool check_convexity = true;
};

/// Per-snapshot normalization data: the dilation keeping total area constant
/// and its accumulated square (the stretched clock), plus the backward
/// log-clock derived from both.
struct TimeMaps {
  std::vector<double> dilation;         // psi(t_i) = sqrt(area_0 / area_i)
  std::vector<double> stretched_time;   // integral of psi^2 up to t_i
  bool filled = false;
};

/// Lagrangian realization of the shrinking flow: shared connectivity,
/// time-indexed vertex positions, and the clock changes built on it.
/// Immutable once built; safe to share read-only across workers.
class FlowTrajectory {
public:
  std::shared_ptr<const MeshTopology> topology;
  std::vector<double> times;
  std::vector<std::vector<Vec3>> positions;  // one entry per snapshot
  std::vector<double> areas;
  double t_explosion_estimate = 0;
  TimeMaps maps;

  int n_snapshots() const { return static_cast<int>(times.size()); }
  double last_time() const { return times.back(); }
  TriangulatedHypersurface snapshot(int i) const;

  /// Linear interpolation of vertex positions at flow time t (OutOfRange
  /// outside [0, last_time()]).
  TriangulatedHypersurface slice_at(double t) const;

  /// Backward relabeling: simulator time u means the slice at flow time
  /// T_c - u. Valid for u in [backward_min_time(), T_c].
  TriangulatedHypersurface slice_backward(double u) const;
  double backward_min_time() const { return t_explosion_estimate - last_time(); }

  double area_at(double t) const;
  /// Homothety factor sqrt(area(t)/area(t_ref)) used to scale intrinsic
  /// thresholds measured on a reference slice.
  double scale_between(double t_ref, double t) const;

  double dilation_at(double t) const;
  double stretched_time_at(double t) const;
  double stretched_time_inverse(double s) const;
  /// Backward log-clock tau(u) = -stretched_time(T_c - u); strictly
  /// increasing in u, valid for u in [backward_min_time(), T_c].
  double tau(double u) const;
  double tau_inverse(double s) const;

  bool nested_inside(int outer, int inner) const;
};

/// Integrates the flow with adaptive dt (shrinking as curvature grows) until
/// the area drops to the stop fraction; estimates the collapse time from the
/// linear tail of area(t).
FlowTrajectory run_flow(const TriangulatedHypersurface& m0, const FlowOptions& opts);

/// Fills the trajectory's normalization and clock tables (requires >= 2
/// snapshots; throws NotEnoughSnapshots otherwise).
void normalize_and_time_maps(FlowTrajectory& traj);

}  // namespace shrinkflow
