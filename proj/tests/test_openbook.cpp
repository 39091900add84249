#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "reebbook/openbook.hpp"

using namespace reebbook;

namespace {

OpenBookManifold make_single(const std::string& label = "1") {
  auto [atlas, H] = make_annulus_page(TwistProfile::plateau(), label);
  return assemble_open_book(atlas, H);
}

const OpenBookManifold& single_book() {
  static const OpenBookManifold M = make_single();
  return M;
}

const OpenBookManifold& double_book() {
  static const OpenBookManifold M =
      book_connected_sum(make_single("1"), "u1", make_single("2"), "u2");
  return M;
}

const OpenBookManifold& triple_book() {
  static const OpenBookManifold M =
      book_connected_sum(double_book(), "l2", make_single("3"), "u3");
  return M;
}

const OpenBookManifold& transit_book() {
  static const OpenBookManifold M =
      book_connected_sum(double_book(), "u1#u2", make_single("3"), "u3");
  return M;
}

std::set<std::string> binding_labels(const OpenBookManifold& M) {
  std::set<std::string> out;
  for (const auto& B : M.bindings) out.insert(B.label);
  return out;
}

// Arc-length offsets of the segs of a boundary circle.
std::vector<double> seg_offsets(const BoundaryCircle& c) {
  std::vector<double> off;
  double run = 0.0;
  for (const auto& seg : c.segs) {
    off.push_back(run);
    run += seg.lambda_length;
  }
  return off;
}

double angdiff(double a, double b, double period) { return wrap_centered(a - b, period); }

}  // namespace

TEST_CASE("assembled annulus book: two free bindings with calibrated profiles") {
  const OpenBookManifold& M = single_book();

  CHECK(M.bindings.size() == 2);
  CHECK(binding_labels(M) == std::set<std::string>{"l1", "u1"});
  CHECK(M.atlas.euler() == 0);
  CHECK(M.glue_lo == doctest::Approx(0.5));

  for (const auto& B : M.bindings) {
    CHECK(!B.merged);
    CHECK(B.length == doctest::Approx(kTwoPi).epsilon(1e-12));
    CHECK(B.profile.h1(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(B.profile.h2(0.75) - 1.0 / kTwoPi) < 1e-10);
    CHECK(std::abs(B.profile.h2(0.6) - 1.0 / kTwoPi) < 1e-10);
  }

  // Fiber period: exactly 1 on the collars, larger over the twist region.
  PagePoint collar{PagePoint::Chart::Annulus, 0, 0.85, 1.0};
  CHECK(std::abs(M.fiber_period(collar) - 1.0) < 1e-9);
  PagePoint mid{PagePoint::Chart::Annulus, 0, 0.0, 1.0};
  CHECK(M.fiber_period(mid) > 1.0 + 1e-6);

  // The binding index order follows the boundary listing.
  CHECK(M.binding_index("l1") >= 0);
  CHECK(M.binding_index("u1") >= 0);
  CHECK(M.binding_index("zz") == -1);
  CHECK_THROWS_AS(M.binding("zz"), std::invalid_argument);
}

TEST_CASE("contact form evaluation per chart") {
  const OpenBookManifold& M = single_book();

  // Mapping-torus charts: alpha(d_fiber) = 1 exactly.
  MPoint mt = torus_annulus_point(0, 0.37, 1.1, 0.2);
  CHECK(contact_form_eval(M, mt, {0.0, 0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));
  // alpha(d_phi) = r.
  CHECK(contact_form_eval(M, mt, {0.0, 1.0, 0.0}) == doctest::Approx(0.37).epsilon(1e-14));
  // alpha(d_r) = 0.
  CHECK(std::abs(contact_form_eval(M, mt, {1.0, 0.0, 0.0})) < 1e-14);

  // Binding charts: alpha = h1 dtheta + h2 dphi_B.
  const int bi = M.binding_index("u1");
  const ProfilePair& P = M.bindings[bi].profile;
  MPoint bp = binding_point(bi, 2.0, 0.3, 1.0);
  CHECK(contact_form_eval(M, bp, {0.0, 0.0, 1.0}) == doctest::Approx(P.h2(0.3)).epsilon(1e-14));
  CHECK(contact_form_eval(M, bp, {1.0, 0.0, 0.0}) == doctest::Approx(P.h1(0.3)).epsilon(1e-14));

  // On the core the arc-length tangent pairs to exactly 1 = h1(0).
  MPoint core = binding_point(bi, 2.0, 0.0, 0.0);
  CHECK(contact_form_eval(M, core, {1.0, 0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fibration angle") {
  const OpenBookManifold& M = single_book();
  const int bi = M.binding_index("l1");

  CHECK(theta(M, binding_point(bi, 1.0, 0.3, kPi)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(theta(M, binding_point(bi, 1.0, 0.3, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));

  PagePoint mid{PagePoint::Chart::Annulus, 0, 0.0, 1.0};
  const double period = M.fiber_period(mid);
  CHECK(theta(M, torus_annulus_point(0, 0.0, 1.0, period / 2.0)) ==
        doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(theta(M, binding_point(bi, 0.3, 0.0, 0.0)), std::domain_error);
}

TEST_CASE("gluing round-trips on free circles") {
  const OpenBookManifold& M = single_book();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> Uth(0.0, kTwoPi), Urho(0.52, 0.98), Uphi(0.0, kTwoPi);

  for (int i = 0; i < 200; ++i) {
    const int bi = i % 2;
    const int side = (M.bindings[bi].label == "u1") ? +1 : -1;
    const double th = Uth(rng), rho = Urho(rng), phib = Uphi(rng);
    const MPoint bp = binding_point(bi, th, rho, phib);

    const MPoint mt = glue_binding_to_torus(M, bp);
    REQUIRE(mt.chart == MChart::TorusAnnulus);
    CHECK(std::abs(std::abs(mt.a) - M.bindings[bi].profile.h1(rho)) < 1e-12);
    CHECK((mt.a > 0) == (side > 0));
    CHECK(std::abs(mt.a) < 1.0 - 1e-9);  // strictly inside the page
    CHECK(std::abs(mt.a) > 0.70);        // and inside the collar plateau
    CHECK(std::abs(angdiff(theta(M, bp), theta(M, mt), 1.0)) < 1e-12);

    const MPoint back = torus_to_binding(M, mt);
    REQUIRE(back.chart == MChart::Binding);
    CHECK(back.index == bi);
    CHECK(std::abs(angdiff(back.a, th, M.bindings[bi].length)) < 1e-10);
    CHECK(std::abs(back.b - rho) < 1e-10);
    CHECK(std::abs(angdiff(back.c, phib, kTwoPi)) < 1e-10);
  }

  CHECK_THROWS_AS(glue_binding_to_torus(M, binding_point(0, 1.0, 0.3, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(glue_binding_to_torus(M, binding_point(0, 1.0, 0.5, 1.0)),
                  std::invalid_argument);
  // Too deep inside the page / outside the shell.
  CHECK_THROWS_AS(torus_to_binding(M, torus_annulus_point(0, 0.2, 1.0, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(torus_to_binding(M, torus_annulus_point(0, -0.9, 1.0, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(torus_to_binding(M, binding_point(0, 1.0, 0.7, 0.1)),
                  std::invalid_argument);
}

TEST_CASE("merged circle: arc-length parametrization and edge gluing") {
  const OpenBookManifold& M = triple_book();
  const int bi = M.binding_index("u1#u2");
  REQUIRE(bi >= 0);
  const BindingChart& B = M.bindings[bi];
  CHECK(B.merged);

  // Two arcs of length 2 pi - pi/3 plus two tube edges.
  const double edge_len = M.atlas.tubes[0].edge_lambda_length();
  CHECK(B.length == doctest::Approx(10.0 * kPi / 3.0 + 2.0 * edge_len).epsilon(1e-9));
  REQUIRE(B.circle.segs.size() == 4);

  const auto off = seg_offsets(B.circle);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> Urho(0.52, 0.98), Uphi(0.0, kTwoPi), Uu(0.05, 0.95);

  for (std::size_t i = 0; i < B.circle.segs.size(); ++i) {
    const auto& seg = B.circle.segs[i];
    for (int k = 0; k < 12; ++k) {
      const double th = off[i] + Uu(rng) * seg.lambda_length;
      const CirclePoint cp = B.at(th, M.atlas.tubes);
      CHECK(cp.on_arc == seg.is_arc);
      if (seg.is_arc) {
        CHECK(std::abs(angdiff(B.arc_theta(cp.annulus, cp.side, cp.phi), th, B.length)) < 1e-10);
      } else {
        CHECK(std::abs(cp.s) < TubeChart::kZone);
        CHECK(std::abs(angdiff(B.edge_theta(cp.tube, cp.t_edge, cp.s, M.atlas.tubes), th,
                               B.length)) < 1e-10);
      }

      const double rho = Urho(rng), phib = Uphi(rng);
      const MPoint bp = binding_point(bi, th, rho, phib);
      const MPoint mt = glue_binding_to_torus(M, bp);
      if (seg.is_arc) {
        CHECK(mt.chart == MChart::TorusAnnulus);
      } else {
        CHECK(mt.chart == MChart::TorusTube);
        CHECK(mt.b > 1e-6);
        CHECK(mt.b < 1.0 - 1e-6);
      }
      CHECK(std::abs(angdiff(theta(M, bp), theta(M, mt), 1.0)) < 1e-10);

      const MPoint back = torus_to_binding(M, mt);
      REQUIRE(back.chart == MChart::Binding);
      CHECK(back.index == bi);
      CHECK(std::abs(angdiff(back.a, th, B.length)) < 1e-8);
      CHECK(std::abs(back.b - rho) < 1e-8);
      CHECK(std::abs(angdiff(back.c, phib, kTwoPi)) < 1e-10);
    }
  }
}

TEST_CASE("contact form agrees across the gluing overlap") {
  const OpenBookManifold& M = triple_book();
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> Urho(0.52, 0.98), Uang(0.0, kTwoPi), Uv(-1.0, 1.0),
      Uu(0.0, 1.0);

  for (int i = 0; i < 150; ++i) {
    const int bi = i % static_cast<int>(M.bindings.size());
    const BindingChart& B = M.bindings[bi];
    const double th = Uu(rng) * B.length;
    const double rho = Urho(rng);
    const MPoint bp = binding_point(bi, th, rho, Uang(rng));
    const std::array<double, 3> v{Uv(rng), Uv(rng), Uv(rng)};

    std::array<double, 3> w{};
    MPoint mt;
    try {
      mt = glue_binding_to_torus(M, bp, v, &w);
    } catch (const std::invalid_argument&) {
      continue;  // exact tube-corner hit (measure zero)
    }
    const double a_bind = contact_form_eval(M, bp, v);
    const double a_torus = contact_form_eval(M, mt, w);
    CHECK(std::abs(a_bind - a_torus) < 1e-8 * (1.0 + std::abs(a_bind)));
  }
}

TEST_CASE("fibration angle is continuous across the gluing at 1000 points") {
  const OpenBookManifold& M = triple_book();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> Urho(0.51, 0.99), Uang(0.0, kTwoPi), Uu(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int bi = i % static_cast<int>(M.bindings.size());
    const double th = Uu(rng) * M.bindings[bi].length;
    const MPoint bp = binding_point(bi, th, Urho(rng), Uang(rng));
    const MPoint mt = glue_binding_to_torus(M, bp);
    worst = std::max(worst, std::abs(angdiff(theta(M, bp), theta(M, mt), 1.0)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("book-connected sums record their composition") {
  const OpenBookManifold& D = double_book();
  CHECK(binding_labels(D) == std::set<std::string>{"l1", "u1#u2", "l2"});
  REQUIRE(D.sums.size() == 1);
  CHECK(D.sums[0].b1 == "u1");
  CHECK(D.sums[0].b2 == "u2");
  CHECK(D.sums[0].label == "u1#u2");
  CHECK(D.sums[0].tube == 0);

  const OpenBookManifold& T = triple_book();
  CHECK(binding_labels(T) == std::set<std::string>{"l1", "u1#u2", "l2#u3", "l3"});
  CHECK(T.atlas.tubes.size() == 2);
  CHECK(T.atlas.euler() == -2);
  REQUIRE(T.sums.size() == 2);
  CHECK(T.sums[1].b1 == "l2");
  CHECK(T.sums[1].b2 == "u3");
  CHECK(T.sums[1].label == "l2#u3");
  CHECK(T.sums[1].tube == 1);

  const OpenBookManifold& X = transit_book();
  CHECK(binding_labels(X) == std::set<std::string>{"l1", "u1#u2#u3", "l2", "l3"});
  CHECK(X.binding("u1#u2#u3").circle.segs.size() == 8);
  CHECK(X.sums[1].b1 == "u1#u2");
  CHECK(X.sums[1].b2 == "u3");
}

namespace {

// A sampled copy of the plateau twist: collar-flat like the plateau profile,
// but carried as interpolation data rather than a closed form.
MonodromyHamiltonian sampled_monodromy() {
  const TwistProfile ref = TwistProfile::plateau();
  std::vector<double> rr, vv;
  for (int i = 0; i <= 64; ++i) {
    const double r = -1.0 + 2.0 * i / 64.0;
    rr.push_back(r);
    vv.push_back(ref(r));
  }
  const TwistProfile tws = TwistProfile::from_samples(rr, vv);
  MonodromyHamiltonian H;
  H.tw = {tws};
  H.Hraw = {hamiltonian_from_twist(tws, 0.0)};
  H.F = {action_from_twist(tws)};
  return H;
}

PageAtlas one_annulus_atlas() {
  PageAtlas A;
  A.annuli = {AnnulusChart{"1"}};
  A.side_label[{0, +1}] = "u1";
  A.side_label[{0, -1}] = "l1";
  A.rebuild_boundaries();
  return A;
}

}  // namespace

TEST_CASE("sampled collar-flat twists assemble; non-collar-flat ones are rejected") {
  const PageAtlas A = one_annulus_atlas();
  const OpenBookManifold M = assemble_open_book(A, sampled_monodromy());
  CHECK(M.bindings.size() == 2);
  PagePoint collar{PagePoint::Chart::Annulus, 0, 0.9, 2.0};
  CHECK(std::abs(M.fiber_period(collar) - 1.0) < 1e-9);

  // A linear twist is a valid monodromy but not collar-trivial.
  const TwistProfile twl = TwistProfile::linear();
  MonodromyHamiltonian Hl;
  Hl.tw = {twl};
  Hl.Hraw = {hamiltonian_from_twist(twl, 0.0)};
  Hl.F = {action_from_twist(twl)};
  CHECK_THROWS_WITH_AS(assemble_open_book(A, Hl),
                       "monodromy is not the identity on a boundary collar",
                       std::runtime_error);
}

TEST_CASE("invariant classification") {
  const OpenBookManifold& M = triple_book();
  const int i_l1 = M.binding_index("l1");
  const int i_m = M.binding_index("u1#u2");

  // Binding cores.
  auto c = classify(M, binding_point(i_m, 0.5, 0.0, 0.0));
  CHECK(c.kind == InvariantClass::Kind::Binding);
  CHECK(c.label == "u1#u2");

  // Core reached through mapping-torus coordinates: r = 1 on an unnotched arc.
  auto c2 = classify(M, torus_annulus_point(0, 1.0, 0.5, 0.3));
  CHECK(c2.kind == InvariantClass::Kind::Binding);
  CHECK(c2.label == "u1#u2");

  // Solid torus around a merged binding.
  auto cbt = classify(M, binding_point(i_m, 2.0, 0.3, 1.0));
  CHECK(cbt.kind == InvariantClass::Kind::BindingTorus);
  CHECK(cbt.label == "u1#u2");
  CHECK(cbt.rho == doctest::Approx(0.3));

  // Solid torus around an unmerged binding belongs to its page block.
  auto cp = classify(M, binding_point(i_l1, 2.0, 0.3, 1.0));
  CHECK(cp.kind == InvariantClass::Kind::Page);
  CHECK(cp.label == "1");

  // Interior annulus material.
  auto ci = classify(M, torus_annulus_point(1, 0.0, 2.0, 0.1));
  CHECK(ci.kind == InvariantClass::Kind::Page);
  CHECK(ci.label == "2");

  // Tube middle on the separatrix sheet.
  auto ct = classify(M, torus_tube_point(0, 0.2, 0.5, 0.1));
  CHECK(ct.kind == InvariantClass::Kind::Tube);
  CHECK(ct.tube == 0);
  auto ct2 = classify(M, torus_tube_point(1, -0.1, 0.5, 0.1));
  CHECK(ct2.kind == InvariantClass::Kind::Tube);
  CHECK(ct2.tube == 1);

  // Tube middle near a free edge is inside the merged binding's chart.
  auto cs = classify(M, torus_tube_point(0, 0.2, 0.99, 0.1));
  CHECK(cs.kind == InvariantClass::Kind::BindingTorus);
  CHECK(cs.label == "u1#u2");

  // Deep end-zone material on the separatrix sheet is page material, and the
  // same point in annulus coordinates classifies identically.
  auto cz = classify(M, torus_tube_point(0, -0.6, 0.5, 0.1));
  CHECK(cz.kind == InvariantClass::Kind::Page);
  CHECK(cz.label == "1");
  const Window& W0 = M.atlas.tubes[0].end[0];
  auto cz2 = classify(M, torus_annulus_point(W0.annulus, W0.side * 0.92, W0.center, 0.1));
  CHECK(cz.same_class(cz2));

  // Tags agree across the gluing overlap.
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> Urho(0.52, 0.98), Uang(0.0, kTwoPi), Uu(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const int bi = i % static_cast<int>(M.bindings.size());
    const MPoint bp =
        binding_point(bi, Uu(rng) * M.bindings[bi].length, Urho(rng), Uang(rng));
    const auto a = classify(M, bp);
    const auto b = classify(M, glue_binding_to_torus(M, bp));
    CHECK(a.same_class(b));
    if (a.kind == InvariantClass::Kind::BindingTorus)
      CHECK(std::abs(a.rho - b.rho) < 1e-8);
  }

  // Tags are stable under fiber re-canonicalization.
  for (int i = 0; i < 20; ++i) {
    const MPoint pt = torus_annulus_point(i % 3, -0.95 + 1.9 * i / 19.0, 0.37 * i, 0.2);
    MPoint shifted = pt;
    shifted.c += 3.0 * M.fiber_period(page_of(pt));
    CHECK(classify(M, pt).same_class(classify(M, shifted)));
  }
}

TEST_CASE("contact positivity at random points in all charts") {
  const OpenBookManifold& M = triple_book();
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> U01(0.0, 1.0);

  int n_checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const int fam = i % 3;
    double vol = 0.0;
    if (fam == 0) {
      const int a = i % static_cast<int>(M.atlas.annuli.size());
      vol = contact_volume(
          M, torus_annulus_point(a, -1.0 + 2.0 * U01(rng), kTwoPi * U01(rng), 0.1));
    } else if (fam == 1) {
      const int k = i % static_cast<int>(M.atlas.tubes.size());
      vol = contact_volume(
          M, torus_tube_point(k, -1.0 + 2.0 * U01(rng), U01(rng), 0.1));
    } else {
      const int b = i % static_cast<int>(M.bindings.size());
      const double rho = 1e-3 + (0.999 - 1e-3) * U01(rng);
      vol = contact_volume(M, binding_point(b, 1.0, rho, 1.0));
    }
    CHECK(vol > 1e-10);
    ++n_checked;
  }
  CHECK(n_checked == 10000);
}

TEST_CASE("rounding profiles: admissibility window") {
  // The default construction passes and has positive density everywhere.
  const ProfilePair pp = profiles_from_rounding();
  for (int i = 1; i < 1000; ++i) {
    const double rho = i / 1000.0;
    CHECK(pp.D(rho) > 0.0);
  }

  // Convex combinations of admissible data remain admissible.
  const RoundingData r1 = rounding_data(0.3, 0.2);
  const RoundingData r2 = rounding_data(0.2, 0.3);
  RoundingData mix;
  mix.eps_W = 0.25;
  mix.eps_D = 0.25;
  mix.f = [=](double t) { return 0.5 * (r1.f(t) + r2.f(t)); };
  mix.df = [=](double t) { return 0.5 * (r1.df(t) + r2.df(t)); };
  mix.g = [=](double t) { return 0.5 * (r1.g(t) + r2.g(t)); };
  mix.dg = [=](double t) { return 0.5 * (r1.dg(t) + r2.dg(t)); };
  CHECK_NOTHROW(profiles_from_fg(mix));

  // A shifted g violates g(0) = -eps_D and is rejected.
  RoundingData bad = rounding_data(0.3, 0.2);
  auto g0 = bad.g;
  bad.g = [g0](double t) { return g0(t) + 0.05; };
  CHECK_THROWS_AS(profiles_from_fg(bad), std::invalid_argument);

  // f == 0 misses the required boundary depth.
  RoundingData flat = rounding_data(0.3, 0.2);
  flat.f = [](double) { return 0.0; };
  flat.df = [](double) { return 0.0; };
  CHECK_THROWS_AS(profiles_from_fg(flat), std::invalid_argument);
}

TEST_CASE("canonical representatives") {
  const OpenBookManifold& M = single_book();
  const double p0 = M.fiber_period(PagePoint{PagePoint::Chart::Annulus, 0, 0.3, 0.0});

  // Deck equivalence: (w, c) ~ (psi(w), c - period).
  const double tw03 = M.monodromy.tw[0](0.3);
  const MPoint p = torus_annulus_point(0, 0.3, 1.0, 0.2);
  const MPoint q = torus_annulus_point(0, 0.3, 1.0 + tw03, 0.2 - p0);
  const MPoint cp = canonicalize(M, p), cq = canonicalize(M, q);
  CHECK(cp.index == cq.index);
  CHECK(std::abs(cp.a - cq.a) < 1e-12);
  CHECK(std::abs(angdiff(cp.b, cq.b, kTwoPi)) < 1e-12);
  CHECK(std::abs(cp.c - cq.c) < 1e-12);

  // Idempotence, including on overlap-shell binding points.
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    MPoint x;
    if (i % 2 == 0)
      x = torus_annulus_point(0, -0.9 + 1.8 * U01(rng), 9.0 * U01(rng), 7.0 * U01(rng) - 3.0);
    else
      x = binding_point(i % 2 ? 1 : 0, 9.0 * U01(rng), 0.2 + 0.75 * U01(rng),
                        9.0 * U01(rng));
    const MPoint c1 = canonicalize(M, x);
    const MPoint c2 = canonicalize(M, c1);
    CHECK(c1.chart == c2.chart);
    CHECK(c1.index == c2.index);
    CHECK(c1.a == c2.a);
    CHECK(c1.b == c2.b);
    CHECK(c1.c == c2.c);
    if (c1.chart != MChart::Binding) {
      CHECK(c1.c >= 0.0);
      CHECK(c1.c < M.fiber_period(page_of(c1)));
    }
  }

  // The core's meridian angle is degenerate.
  const MPoint core = canonicalize(M, binding_point(0, 1.0, 0.0, 2.2));
  CHECK(core.c == 0.0);
}

TEST_CASE("serialization round-trip") {
  const OpenBookManifold& M = triple_book();
  const std::string s = open_book_to_json(M);
  CHECK(s.find("format_version") != std::string::npos);

  const OpenBookManifold M2 = open_book_from_json(s);
  CHECK(binding_labels(M2) == binding_labels(M));
  for (const auto& B : M.bindings) {
    const BindingChart& B2 = M2.binding(B.label);
    CHECK(std::abs(B.length - B2.length) < 1e-12);
    CHECK(B.merged == B2.merged);
  }
  CHECK(M2.sums.size() == M.sums.size());

  // Bit-for-bit stable re-serialization.
  CHECK(open_book_to_json(M2) == s);

  // Version gate.
  std::string tampered = s;
  const auto pos = tampered.find("\"format_version\": 1");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, std::string("\"format_version\": 1").size(), "\"format_version\": 2");
  CHECK_THROWS_AS(open_book_from_json(tampered), std::runtime_error);

  // Only plateau twists serialize.
  const OpenBookManifold I = assemble_open_book(one_annulus_atlas(), sampled_monodromy());
  CHECK_THROWS_AS(open_book_to_json(I), std::runtime_error);
}
