#include <cmath>

#include "doctest.h"
#include "qgc/core.hpp"
#include "qgc/quadrature.hpp"

using namespace qgc;

// ---- exactness ----

TEST_CASE("an n-point rule integrates polynomials of degree 2n-1 exactly") {
  const GaussLegendre gl(4);
  // int_0^1 x^7 dx = 1/8
  const long double r = gl.integrate(0.0L, 1.0L, [](long double x) {
    long double p = 1;
    for (int i = 0; i < 7; ++i) p *= x;
    return p;
  });
  CHECK(static_cast<double>(r) == doctest::Approx(0.125).epsilon(1e-15));

  // ...and degree 8 shows the first error
  const long double r8 = gl.integrate(0.0L, 1.0L, [](long double x) {
    long double p = 1;
    for (int i = 0; i < 8; ++i) p *= x;
    return p;
  });
  CHECK(std::fabs(static_cast<double>(r8) - 1.0 / 9.0) > 1e-12);
}

TEST_CASE("oscillatory mode-squared integrals match closed forms") {
  // int_0^1 x(1-x) * 2 sin^2(2 pi x) dx = 1/6 + 1/(8 pi^2)
  const GaussLegendre& gl = GaussLegendre::cached(oscillatory_order(4 * kPi, 1.0));
  const long double r = gl.integrate(0.0L, 1.0L, [](long double x) {
    const long double s = std::sin(2 * kPiL * x);
    return x * (1 - x) * 2 * s * s;
  });
  const double exact = 1.0 / 6.0 + 1.0 / (8 * kPi * kPi);
  CHECK(static_cast<double>(r) == doctest::Approx(exact).epsilon(1e-13));

  // int_0^{2 pi} sin^2 = pi
  const GaussLegendre& g2 = GaussLegendre::cached(oscillatory_order(2.0, 2 * kPi));
  const long double s = g2.integrate(0.0L, 2 * kPiL, [](long double x) {
    const long double v = std::sin(x);
    return v * v;
  });
  CHECK(static_cast<double>(s) == doctest::Approx(kPi).epsilon(1e-13));
}

// ---- rule structure ----

TEST_CASE("nodes are ascending on [-1,1] and weights sum to 2") {
  const GaussLegendre gl(32);
  REQUIRE(gl.order() == 32);
  long double wsum = 0;
  for (size_t i = 0; i < gl.nodes().size(); ++i) {
    CHECK(gl.nodes()[i] > -1.0L);
    CHECK(gl.nodes()[i] < 1.0L);
    if (i) CHECK(gl.nodes()[i] > gl.nodes()[i - 1]);
    CHECK(gl.weights()[i] > 0.0L);
    wsum += gl.weights()[i];
  }
  CHECK(static_cast<double>(wsum) == doctest::Approx(2.0).epsilon(1e-16));
}

TEST_CASE("the cache hands back one rule per order") {
  const GaussLegendre& a = GaussLegendre::cached(24);
  const GaussLegendre& b = GaussLegendre::cached(24);
  CHECK(&a == &b);
  CHECK(a.order() == 24);
}

TEST_CASE("the oscillatory order heuristic respects its floor and grows") {
  CHECK(oscillatory_order(0.0, 1.0) >= 32);
  CHECK(oscillatory_order(1.0, 1.0, 48) >= 48);
  const int lo = oscillatory_order(10.0, 1.0);
  const int hi = oscillatory_order(1000.0, 1.0);
  CHECK(hi > lo);
  // scale-invariant in omega * len
  CHECK(oscillatory_order(1000.0, 1.0) == oscillatory_order(1.0, 1000.0));
}
