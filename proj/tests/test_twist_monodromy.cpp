#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "reebbook/monodromy.hpp"
#include "reebbook/smooth.hpp"
#include "reebbook/twist.hpp"

using namespace reebbook;

namespace {
// Independent composite-Simpson quadrature used as an oracle for the
// library's cached integrals.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) {
    const double x = a + (b - a) * i / n;
    s += f(x) * ((i % 2) ? 4.0 : 2.0);
  }
  return s * (b - a) / (3.0 * n);
}
}  // namespace

TEST_CASE("twist profiles satisfy the endpoint/monotonicity contract") {
  for (auto tw : {TwistProfile::linear(), TwistProfile::plateau()}) {
    CHECK_NOTHROW(tw.validate());
    CHECK(tw(-1.0) == doctest::Approx(kTwoPi));
    CHECK(tw(1.0) == doctest::Approx(0.0));
  }
  auto tw = TwistProfile::plateau(0.3);
  // exact plateaus
  CHECK(tw(-1.0) == tw(-0.72));
  CHECK(tw(0.72) == tw(1.0));
  CHECK(tw.symmetric());
  CHECK(TwistProfile::linear().symmetric());
}

TEST_CASE("sampled twist reproduces its source profile") {
  auto src = TwistProfile::plateau(0.3);
  std::vector<double> r, v;
  for (int i = 0; i <= 200; ++i) {
    r.push_back(-1.0 + 2.0 * i / 200.0);
    v.push_back(src(r.back()));
  }
  auto tw = TwistProfile::from_samples(r, v);
  for (double x : {-0.9, -0.5, -0.11, 0.0, 0.37, 0.5, 0.95})
    CHECK(std::abs(tw(x) - src(x)) < 2e-5);
}

TEST_CASE("Hamiltonian of the linear twist: frozen closed form") {
  auto tw = TwistProfile::linear();
  auto H = hamiltonian_from_twist(tw, 0.0);
  // H(r) = int_{-1}^r pi (1 - s) ds = pi (3/2 + r - r^2/2)
  for (double r : {-1.0, -0.5, 0.0, 0.3, 0.7, 1.0}) {
    const double closed = kPi * (1.5 + r - 0.5 * r * r);
    CHECK(std::abs(H.value(r) - closed) < 1e-12);
    const double quad = simpson([&](double s) { return tw(s); }, -1.0, r, 2000);
    CHECK(std::abs(H.value(r) - quad) < 1e-9);
  }
  CHECK(H.value(-1.0) == doctest::Approx(0.0));
  CHECK(H.value(1.0) == doctest::Approx(kTwoPi));
  CHECK(H.value(0.0) == doctest::Approx(1.5 * kPi));
  // H' = tw, and the time-1 flow is the shear.
  for (double r : {-0.8, 0.1, 0.6}) {
    CHECK(H.deriv(r) == doctest::Approx(tw(r)));
    auto [r1, phi1] = H.time1(r, 0.25);
    CHECK(r1 == r);
    CHECK(phi1 == doctest::Approx(0.25 + tw(r)));
  }
}

TEST_CASE("Hamiltonian of a symmetric twist gains exactly 2*pi") {
  auto tw = TwistProfile::plateau(0.3);
  auto H = hamiltonian_from_twist(tw, 1.25);
  CHECK(std::abs((H.value(1.0) - H.value(-1.0)) - kTwoPi) < 1e-12);
  CHECK(H.value(-1.0) == doctest::Approx(1.25));
}

TEST_CASE("PrimitiveU of the linear twist: frozen closed form") {
  auto tw = TwistProfile::linear();
  auto U = primitive_U(tw);
  // U'(r) = -r tw'(r) = pi r; shifted so max U = -1 (attained at r = +-1):
  // U(r) = pi r^2/2 - 1 - pi/2.
  for (double r : {-1.0, -0.4, 0.0, 0.55, 1.0}) {
    const double closed = 0.5 * kPi * r * r - 1.0 - 0.5 * kPi;
    CHECK(std::abs(U.value(r) - closed) < 1e-10);
  }
  CHECK(U.value(0.0) == doctest::Approx(-1.0 - kPi / 2.0));
  CHECK(U.boundary_l() == doctest::Approx(-1.0));
  CHECK(U.boundary_u() == doctest::Approx(-1.0));
}

TEST_CASE("exactness residual: psi^*lambda - lambda + dU == 0") {
  for (auto tw : {TwistProfile::linear(), TwistProfile::plateau()}) {
    auto U = primitive_U(tw);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double r = -1.0 + 2.0 * i / 400.0;
      worst = std::max(worst, std::abs(r * tw.deriv(r) + U.deriv(r)));
      // derivative consistency of the cached integral
      if (i % 40 == 0 && i > 0 && i < 400) {
        const double h = 1e-5;
        const double fd = (U.value(r + h) - U.value(r - h)) / (2 * h);
        CHECK(std::abs(fd - U.deriv(r)) < 1e-6);
      }
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("PrimitiveU of a symmetric plateau twist") {
  auto tw = TwistProfile::plateau(0.3);
  auto U = primitive_U(tw);
  // Constant (== -1) on both collars, symmetric, strictly below -1 inside.
  for (double r : {-1.0, -0.95, -0.8, -0.72, 0.72, 0.8, 0.95, 1.0})
    CHECK(std::abs(U.value(r) + 1.0) < 1e-11);
  for (int i = 0; i <= 100; ++i) {
    const double r = -1.0 + 2.0 * i / 100.0;
    CHECK(U.value(r) <= -1.0 + 1e-11);
    CHECK(std::abs(U.value(r) - U.value(-r)) < 1e-10);
  }
  CHECK(U.value(0.0) < -1.5);  // genuine well in the middle
}

TEST_CASE("ActionProfile: collar-constant conserved integral") {
  auto tw = TwistProfile::plateau(0.3);
  auto F = action_from_twist(tw);
  // locally constant at both collars
  for (double r : {-1.0, -0.9, -0.75}) CHECK(std::abs(F.value(r) - F.collar_l()) < 1e-11);
  for (double r : {0.75, 0.9, 1.0}) CHECK(std::abs(F.value(r) - F.collar_u()) < 1e-11);
  // equal collar values for a symmetric twist
  CHECK(std::abs(F.collar_u() - F.collar_l()) < 1e-10);
  // F' = tw - 2*pi*g with g the lower-half indicator
  CHECK(F.deriv(-0.5) == doctest::Approx(tw(-0.5) - kTwoPi));
  CHECK(F.deriv(0.5) == doctest::Approx(tw(0.5)));
  // settable additive constant
  F.set_constant(3.0);
  CHECK(F.value(1.0) == doctest::Approx(F.collar_u()));
}
