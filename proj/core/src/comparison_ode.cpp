#include <cmath>
#include <string>

#include "shrinkflow/coupling.hpp"

namespace shrinkflow {

double comparison_mu(int n, double eps) {
  if (n < 2) fail(ErrorCode::DomainError, "need n >= 2");
  if (!(eps >= 0 && eps < 1)) fail(ErrorCode::DomainError, "need eps in [0, 1)");
  return std::sqrt((1.0 - eps) / (n - 1));
}

namespace {
double sin_mu_r(double mu, double r) {
  const double s = std::sin(mu * r);
  if (std::abs(s) < 1e-12)
    fail(ErrorCode::DomainError, "sin(mu r) degenerates at r = " + std::to_string(r));
  return s;
}
}  // namespace

double comparison_g(double s, double r, int n, double eps) {
  const double mu = comparison_mu(n, eps);
  if (!(r > 0 && r < M_PI / mu)) fail(ErrorCode::DomainError, "need 0 < r < pi/mu");
  if (!(s >= 0 && s <= r)) fail(ErrorCode::DomainError, "need 0 <= s <= r");
  const double coef = (1.0 - std::cos(mu * r)) / sin_mu_r(mu, r);
  return std::cos(mu * s) + coef * std::sin(mu * s);
}

double comparison_g_gap(double r, int n, double eps) {
  const double mu = comparison_mu(n, eps);
  if (!(r > 0 && r < M_PI / mu)) fail(ErrorCode::DomainError, "need 0 < r < pi/mu");
  (void)sin_mu_r(mu, r);
  return -2.0 * mu * std::tan(mu * r / 2.0);
}

double comparison_g_ode_residual(double s, double r, int n, double eps) {
  const double mu = comparison_mu(n, eps);
  if (!(r > 0 && r < M_PI / mu)) fail(ErrorCode::DomainError, "need 0 < r < pi/mu");
  if (!(s >= 0 && s <= r)) fail(ErrorCode::DomainError, "need 0 <= s <= r");
  const double coef = (1.0 - std::cos(mu * r)) / sin_mu_r(mu, r);
  // second derivative of each term, evaluated independently of comparison_g
  const double gdd = -mu * mu * std::cos(mu * s) - mu * mu * coef * std::sin(mu * s);
  return gdd + mu * mu * comparison_g(s, r, n, eps);
}

}  // namespace shrinkflow
