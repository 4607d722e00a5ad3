#include <doctest.h>

#include <cmath>

#include "shrinkflow/sphere_oracle.hpp"

using namespace shrinkflow;

TEST_CASE("closed forms of the shrinking sphere") {
  auto o = sphere_oracle(1.0, 2);
  CHECK(o.explosion_time() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(o.radius(0.09) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(o.laplacian_scale(0.1) == doctest::Approx(1.0 / 0.6).epsilon(1e-12));
  CHECK(o.phi(0.0) == doctest::Approx(o.explosion_time()).epsilon(1e-15));
  CHECK(o.dilation(0.0) == doctest::Approx(1.0));
  // accumulated squared dilation at 0.1875: -(1/4) log(1/4)
  CHECK(o.normalized_time(0.1875) == doctest::Approx(-0.25 * std::log(0.25)).epsilon(1e-12));
  CHECK(o.normalized_time(0.0) == 0.0);
}

TEST_CASE("oracle keeps the dimension symbolic") {
  auto o = sphere_oracle(2.0, 5);
  CHECK(o.explosion_time() == doctest::Approx(4.0 / 10.0).epsilon(1e-15));
  CHECK(o.radius(0.1) == doctest::Approx(std::sqrt(4.0 - 1.0)).epsilon(1e-12));
  CHECK(o.laplacian_scale(0.2) == doctest::Approx(4.0 / (4.0 - 2.0)).epsilon(1e-12));
}

TEST_CASE("backward log clock") {
  auto o = sphere_oracle(1.0, 2);
  const double tc = o.explosion_time();
  CHECK(o.backward_log_time(tc) == doctest::Approx(0.0));
  // tau and phi-like inverse: u = tc * exp(s / tc)
  const double u = 0.1;
  const double s = o.backward_log_time(u);
  CHECK(tc * std::exp(s / tc) == doctest::Approx(u).epsilon(1e-12));
}

TEST_CASE("phi solves the clock ODE phi' r0^2 = n phi with phi(0) = T_c") {
  auto o = sphere_oracle(1.5, 3);
  const double h = 1e-6;
  for (double s : {-2.0, -1.0, -0.25}) {
    const double dphi = (o.phi(s + h) - o.phi(s - h)) / (2 * h);
    CHECK(dphi * o.r0 * o.r0 == doctest::Approx(o.n * o.phi(s)).epsilon(1e-8));
  }
}

TEST_CASE("domain errors") {
  auto o = sphere_oracle(1.0, 2);
  CHECK_THROWS_AS((void)o.radius(0.25), Error);
  CHECK_THROWS_AS((void)o.radius(-0.01), Error);
  CHECK_THROWS_AS((void)o.phi(0.1), Error);
  CHECK_THROWS_AS((void)sphere_oracle(0.0, 2), Error);
  CHECK_THROWS_AS((void)sphere_oracle(1.0, 1), Error);
}
