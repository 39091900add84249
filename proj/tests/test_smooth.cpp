#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "reebbook/smooth.hpp"

using namespace reebbook;

TEST_CASE("step01 endpoints, symmetry, monotonicity") {
  CHECK(step01(-0.5) == 0.0);
  CHECK(step01(0.0) == 0.0);
  CHECK(step01(1.0) == 1.0);
  CHECK(step01(2.0) == 1.0);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double x = i / 100.0;
    const double v = step01(x);
    CHECK(v >= prev);
    prev = v;
    CHECK(std::abs(step01(x) + step01(1.0 - x) - 1.0) < 1e-15);
  }
}

TEST_CASE("step01 derivative matches finite differences") {
  for (double x : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double h = 1e-6;
    const double fd = (step01(x + h) - step01(x - h)) / (2 * h);
    CHECK(std::abs(fd - step01_deriv(x)) < 1e-7);
  }
  CHECK(step01_deriv(0.0) == 0.0);
  CHECK(step01_deriv(1.0) == 0.0);
}

TEST_CASE("bump01 support and peak") {
  CHECK(bump01(0.0) == 0.0);
  CHECK(bump01(1.0) == 0.0);
  CHECK(bump01(0.5) == doctest::Approx(1.0));
  for (double x : {0.2, 0.4, 0.6, 0.8}) {
    const double h = 1e-6;
    const double fd = (bump01(x + h) - bump01(x - h)) / (2 * h);
    CHECK(std::abs(fd - bump01_deriv(x)) < 1e-6);
  }
}

TEST_CASE("integrate and CumulativeIntegral against closed forms") {
  auto f = [](double x) { return std::sin(x); };
  CHECK(std::abs(integrate(f, 0.0, kPi) - 2.0) < 1e-12);

  CumulativeIntegral F(f, {0.0, 1.0, 2.0, kPi});
  for (double x : {0.3, 1.0, 1.7, 2.9}) {
    CHECK(std::abs(F.value(x) - (1.0 - std::cos(x))) < 1e-12);
  }
  CHECK(std::abs(F.total() - 2.0) < 1e-12);
}

TEST_CASE("find_root and scan") {
  auto f = [](double x) { return x * x - 2.0; };
  CHECK(std::abs(find_root(f, 0.0, 2.0) - std::sqrt(2.0)) < 1e-12);

  auto g = [](double x) { return std::cos(3.0 * x); };
  auto roots = find_roots_scan(g, 0.0, kPi, 200);
  REQUIRE(roots.size() == 3);
  CHECK(std::abs(roots[0] - kPi / 6.0) < 1e-10);
  CHECK(std::abs(roots[1] - kPi / 2.0) < 1e-10);
  CHECK(std::abs(roots[2] - 5.0 * kPi / 6.0) < 1e-10);
}

TEST_CASE("Piecewise1D evaluation and derivative") {
  Piecewise1D p({0.0, 1.0, 2.0},
                {[](double x) { return x * x; }, [](double x) { return 2.0 * x - 1.0; }},
                {[](double) { return 0.0; }, [](double) { return 2.0; }});
  CHECK(p.value(0.5) == doctest::Approx(0.25));
  CHECK(p.value(1.5) == doctest::Approx(2.0));
  CHECK(p.deriv(1.5) == doctest::Approx(2.0));
  // clamped outside the domain
  CHECK(p.value(-1.0) == doctest::Approx(0.0));
  CHECK(p.value(3.0) == doctest::Approx(3.0));
}
