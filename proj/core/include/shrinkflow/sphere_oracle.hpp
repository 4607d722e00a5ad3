#pragma once

#include "shrinkflow/types.hpp"

namespace shrinkflow {

/// Closed-form solution of the shrinking round sphere: radius r0, intrinsic
/// dimension n. The flow collapses at explosion_time() = r0^2 / (2n); all
/// time arguments t live in [0, explosion_time()).
struct SphereFlowOracle {
  double r0 = 1.0;
  int n = 2;

  double explosion_time() const { return r0 * r0 / (2.0 * n); }
  double radius(double t) const;
  Vec3 position(double t, const Vec3& x) const;  // (r(t)/r0) * x
  /// Ratio of the Laplace-Beltrami operators of the homothetic metrics:
  /// r0^2 / (r0^2 - 2nt).
  double laplacian_scale(double t) const;
  /// Dilation keeping the total measure constant: r0 / r(t).
  double dilation(double t) const;
  /// Accumulated squared dilation: -T_c * log(1 - t/T_c).
  double normalized_time(double t) const;
  /// Backward log-clock tau(u) = T_c * log(u / T_c), u in (0, T_c];
  /// the inverse of u = T_c * exp(s / T_c).
  double backward_log_time(double u) const;
  /// Deterministic clock change phi(s) = T_c * exp(s / (2 T_c)), s <= 0,
  /// under which the backward-time process becomes a fixed-metric sphere
  /// Brownian motion; phi(0) = T_c.
  double phi(double s) const;

  double sphere_area(double t) const;  // n = 2 only
};

SphereFlowOracle sphere_oracle(double r0, int n);

}  // namespace shrinkflow
