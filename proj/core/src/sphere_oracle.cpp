#include "shrinkflow/sphere_oracle.hpp"

#include <cmath>
#include <string>

namespace shrinkflow {

namespace {
void check_time(const SphereFlowOracle& o, double t) {
  if (t < 0 || t >= o.explosion_time())
    fail(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside [0, T_c)");
}
}  // namespace

double SphereFlowOracle::radius(double t) const {
  check_time(*this, t);
  return std::sqrt(r0 * r0 - 2.0 * n * t);
}

Vec3 SphereFlowOracle::position(double t, const Vec3& x) const {
  return (radius(t) / r0) * x;
}

double SphereFlowOracle::laplacian_scale(double t) const {
  check_time(*this, t);
  return r0 * r0 / (r0 * r0 - 2.0 * n * t);
}

double SphereFlowOracle::dilation(double t) const { return r0 / radius(t); }

double SphereFlowOracle::normalized_time(double t) const {
  check_time(*this, t);
  const double tc = explosion_time();
  return -tc * std::log1p(-t / tc);
}

double SphereFlowOracle::backward_log_time(double u) const {
  const double tc = explosion_time();
  if (u <= 0 || u > tc)
    fail(ErrorCode::OutOfRange, "backward time " + std::to_string(u) + " outside (0, T_c]");
  return tc * std::log(u / tc);
}

double SphereFlowOracle::phi(double s) const {
  if (s > 0) fail(ErrorCode::OutOfRange, "phi is defined for s <= 0");
  const double tc = explosion_time();
  return tc * std::exp(s / (2.0 * tc));
}

double SphereFlowOracle::sphere_area(double t) const {
  if (n != 2) fail(ErrorCode::OutOfRange, "sphere_area is the n=2 surface area");
  const double r = radius(t);
  return 4.0 * M_PI * r * r;
}

SphereFlowOracle sphere_oracle(double r0, int n) {
  if (!(r0 > 0)) fail(ErrorCode::BadParams, "radius must be positive");
  if (n < 2) fail(ErrorCode::BadParams, "intrinsic dimension must be >= 2");
  return SphereFlowOracle{r0, n};
}

}  // namespace shrinkflow
