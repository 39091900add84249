#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "reebbook/embed.hpp"

using namespace reebbook;

namespace {

OpenBookManifold make_single(const std::string& label) {
  auto [atlas, H] = make_annulus_page(TwistProfile::plateau(), label);
  return assemble_open_book(atlas, H);
}

const OpenBookManifold& single_book() {
  static const OpenBookManifold M = make_single("1");
  return M;
}

const std::map<std::string, OrbitRecord>& orbit_table() {
  static const std::map<std::string, OrbitRecord> table = [] {
    std::map<std::string, OrbitRecord> t;
    for (auto& rec : periodic_orbits(single_book(), {})) t.emplace(rec.name, rec);
    return t;
  }();
  return table;
}

Polyline3 circle_xy(int n, double radius = 1.0, Vec3 center = {0, 0, 0}) {
  Polyline3 c;
  for (int i = 0; i < n; ++i) {
    const double t = kTwoPi * i / n;
    c.push_back({center[0] + radius * std::cos(t), center[1] + radius * std::sin(t),
                 center[2]});
  }
  return c;
}

// Phase winding of one complex coordinate pair along a closed 4-space polyline.
int phase_winding(const Polyline4& c, int re, int im) {
  double total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec4& a = c[i];
    const Vec4& b = c[(i + 1) % c.size()];
    total += wrap_centered(std::atan2(b[im], b[re]) - std::atan2(a[im], a[re]), kTwoPi);
  }
  const double turns = total / kTwoPi;
  REQUIRE(std::abs(turns - std::round(turns)) < 1e-6);
  return static_cast<int>(std::lround(turns));
}

double oracle(const std::string& a, const std::string& b) {
  return gauss_linking_refined(single_book(), orbit_table().at(a), orbit_table().at(b));
}

}  // namespace

TEST_CASE("gauss integral on analytic curves") {
  // Hopf pair: the second circle crosses the first one's spanning disk once,
  // downward through its +z orientation, so the linking number is -1.
  const Polyline3 c1 = circle_xy(1000);
  Polyline3 c2;
  for (int i = 0; i < 1000; ++i) {
    const double s = kTwoPi * i / 1000;
    c2.push_back({1.0 + std::cos(s), 0.0, std::sin(s)});
  }
  const double hopf = gauss_linking(c1, c2);
  CHECK(std::abs(hopf - (-1.0)) < 5e-3);
  CHECK(gauss_linking(c2, c1) == doctest::Approx(hopf).epsilon(1e-9));  // symmetry

  Polyline3 c2r(c2.rbegin(), c2.rend());
  CHECK(std::abs(gauss_linking(c1, c2r) + hopf) < 1e-12);  // antisymmetry, exact

  Polyline3 c2far = c2;
  for (auto& v : c2far) v[0] += 100.0;
  CHECK(std::abs(gauss_linking(c1, c2far)) < 1e-6);

  // Scale invariance of the solid-angle sum.
  Polyline3 c1s = c1, c2s = c2;
  for (auto& v : c1s)
    for (auto& x : v) x *= 3.7;
  for (auto& v : c2s)
    for (auto& x : v) x *= 3.7;
  CHECK(gauss_linking(c1s, c2s) == doctest::Approx(hopf).epsilon(1e-9));

  // A curve winding three times around the tube of a torus links the torus
  // core three times; all disk crossings point downward here, so -3.
  Polyline3 tor, core;
  for (int i = 0; i < 1200; ++i) {
    const double t = kTwoPi * i / 1200;
    const double rho = 2.0 + 0.5 * std::cos(3 * t);
    tor.push_back({rho * std::cos(t), rho * std::sin(t), 0.5 * std::sin(3 * t)});
  }
  core = circle_xy(1200, 2.0);
  CHECK(std::abs(gauss_linking(tor, core) - (-3.0)) < 5e-3);

  // Cutoff guard: a triangle whose vertex grazes the first circle.
  const Polyline3 graze = {{1.0 + 5e-5, 0.0, 0.0}, {2.0, 0.5, 0.1}, {2.0, -0.5, 0.1}};
  CHECK_THROWS_AS((void)gauss_linking(c1, graze), std::domain_error);
}

TEST_CASE("round model of the single-annulus book") {
  const OpenBookManifold& M = single_book();
  const int bu = M.binding_index("u1"), bl = M.binding_index("l1");

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    MPoint pt;
    if (i % 2 == 0)
      pt = torus_annulus_point(0, -0.999 + 1.998 * U(rng), kTwoPi * U(rng), U(rng));
    else
      pt = binding_point(i % 4 < 2 ? bu : bl, kTwoPi * U(rng), 1e-3 + 0.996 * U(rng),
                         kTwoPi * U(rng));
    const Vec4 z = embed_point(M, pt);
    CHECK(std::abs(z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + z[3] * z[3] - 1.0) < 1e-12);
  }

  // The two chart formulas agree exactly on the gluing shell.
  for (int i = 0; i < 150; ++i) {
    const int b = (i % 2 == 0) ? bu : bl;
    const MPoint bp =
        binding_point(b, kTwoPi * U(rng), 0.52 + 0.46 * U(rng), kTwoPi * U(rng));
    const Vec4 za = embed_point(M, bp);
    const Vec4 zb = embed_point(M, glue_binding_to_torus(M, bp));
    for (int k = 0; k < 4; ++k) CHECK(std::abs(za[k] - zb[k]) < 1e-9);
  }

  // Binding cores are the two coordinate circles.
  const Vec4 zu = embed_point(M, binding_point(bu, 1.3, 0.0, 0.0));
  CHECK(zu[2] == 0.0);
  CHECK(zu[3] == 0.0);
  CHECK(std::abs(zu[0] - std::cos(1.3 / M.bindings[bu].length * kTwoPi)) < 1e-12);
  const Vec4 zl = embed_point(M, binding_point(bl, 0.7, 0.0, 0.0));
  CHECK(zl[0] == 0.0);
  CHECK(zl[1] == 0.0);

  // Summed manifolds have no round model.
  const OpenBookManifold sum =
      book_connected_sum(make_single("1"), "u1", make_single("2"), "u2");
  CHECK_THROWS_AS((void)embed_point(sum, torus_annulus_point(0, 0.0, 0.0, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("phase windings of embedded orbits") {
  const OpenBookManifold& M = single_book();
  const auto& t = orbit_table();

  // Mapping-torus band orbit with rotation m over k page crossings -> (m, k-m).
  const Polyline4 half = embed_orbit(M, t.at("page:1:1/2"), 800);
  CHECK(phase_winding(half, 0, 1) == 1);
  CHECK(phase_winding(half, 2, 3) == 1);
  const Polyline4 third = embed_orbit(M, t.at("page:1:1/3"), 800);
  CHECK(phase_winding(third, 0, 1) == 1);
  CHECK(phase_winding(third, 2, 3) == 2);

  // Binding-chart torus orbit at rotation p/q on the +1 side -> (p, q-p).
  const Polyline4 t13 = embed_orbit(M, t.at("torus:u1:1/3"), 800);
  CHECK(phase_winding(t13, 0, 1) == 1);
  CHECK(phase_winding(t13, 2, 3) == 2);

  // Meridian of the +1 binding -> (0, 1).
  const Polyline4 mu = embed_orbit(M, t.at("meridian:u1"), 400);
  CHECK(phase_winding(mu, 0, 1) == 0);
  CHECK(phase_winding(mu, 2, 3) == 1);

  // -1 side at rotation p/q -> windings (q-p, p) by the meridian dictionary.
  const Polyline4 l12 = embed_orbit(M, t.at("torus:l1:1/2"), 800);
  CHECK(phase_winding(l12, 2, 3) == 1);
  CHECK(phase_winding(l12, 0, 1) == 1);
}

TEST_CASE("gauss oracle values for the model book") {
  // Binding pair: the positive Hopf link.
  CHECK(std::abs(oracle("core:u1", "core:l1") - 1.0) < 5e-3);

  // Orbits against the +1 binding: the page framing contributes -1 per
  // longitude, so a (p,q) orbit on the +1 side links it q-p times.
  CHECK(std::abs(oracle("pure:u1:1/1", "core:u1") - 0.0) < 5e-3);
  CHECK(std::abs(oracle("pure:u1:1/1", "core:l1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("torus:u1:1/3", "core:u1") - 2.0) < 5e-3);
  CHECK(std::abs(oracle("torus:u1:1/3", "core:l1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("meridian:u1", "core:u1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("meridian:u1", "core:l1") - 0.0) < 5e-3);

  // Mapping-torus bands (m over k): k-m against the +1 core, m against -1.
  CHECK(std::abs(oracle("page:1:1/2", "core:u1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("page:1:1/2", "core:l1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("page:1:1/3", "core:u1") - 2.0) < 5e-3);
  CHECK(std::abs(oracle("page:1:1/3", "core:l1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("page:1:2/3", "core:u1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("page:1:2/3", "core:l1") - 2.0) < 5e-3);
  CHECK(std::abs(oracle("plateau:1:+", "core:u1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("plateau:1:+", "core:l1") - 0.0) < 5e-3);
  CHECK(std::abs(oracle("plateau:1:-", "core:u1") - 0.0) < 5e-3);
  CHECK(std::abs(oracle("plateau:1:-", "core:l1") - 1.0) < 5e-3);

  // Nested invariant tori: lk = (windings toward -1 side of the outer orbit)
  // x (windings toward +1 side of the inner orbit).
  CHECK(std::abs(oracle("page:1:1/3", "page:1:2/3") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("page:1:1/2", "page:1:1/3") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("pure:u1:1/1", "pure:l1:1/1") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("torus:u1:1/2", "torus:l1:1/2") - 1.0) < 5e-3);
  CHECK(std::abs(oracle("meridian:u1", "meridian:l1") - 0.0) < 5e-3);

  // Symmetry through completely independent embeddings.
  CHECK(std::abs(oracle("core:u1", "page:1:1/2") - oracle("page:1:1/2", "core:u1")) <
        2e-3);
}
