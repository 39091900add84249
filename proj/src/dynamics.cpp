#include "reebbook/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "reebbook/smooth.hpp"

namespace reebbook {

namespace {

// Reduced-Hamiltonian value on the collar of binding b (locally constant
// there, so any adjacent annulus collar point evaluates it).
double collar_H(const OpenBookManifold& M, int b) {
  const BindingChart& B = M.bindings.at(b);
  for (const auto& seg : B.circle.segs) {
    if (!seg.is_arc) continue;
    PagePoint w{PagePoint::Chart::Annulus, seg.annulus,
                seg.side * (1.0 - 0.25 * M.atlas.collar_width), 0.0};
    return M.monodromy.reduced(M.atlas, w);
  }
  throw std::logic_error("boundary circle has no arc segment");
}

std::string frac_name(const char* prefix, const std::string& label, int p, int q) {
  std::ostringstream os;
  os << prefix << ':' << label << ':' << p << '/' << q;
  return os.str();
}

// Shared random sampler over all chart families.
MPoint random_point(const OpenBookManifold& M, int i, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int fam = i % 3;
  if (fam == 1 && M.atlas.tubes.empty()) fam = 0;
  if (fam == 0) {
    const int a = i % static_cast<int>(M.atlas.annuli.size());
    return torus_annulus_point(a, -0.999 + 1.998 * U(rng), kTwoPi * U(rng), U(rng));
  }
  if (fam == 1) {
    const int k = i % static_cast<int>(M.atlas.tubes.size());
    return torus_tube_point(k, -0.98 + 1.96 * U(rng), 0.02 + 0.96 * U(rng), U(rng));
  }
  const int b = i % static_cast<int>(M.bindings.size());
  return binding_point(b, M.bindings[b].length * U(rng), 1e-4 + 0.9985 * U(rng),
                       kTwoPi * U(rng));
}

}  // namespace

std::array<double, 3> reeb_field(const OpenBookManifold& M, const MPoint& pt) {
  if (pt.chart != MChart::Binding) return {0.0, 0.0, 1.0};
  const ProfilePair& P = M.bindings.at(pt.index).profile;
  const double rho = pt.b;
  if (rho <= 0.0) return {1.0, 0.0, 0.0};  // core: unit arc-length speed
  const double D = P.D(rho);
  return {P.dh2(rho) / D, 0.0, -P.dh1(rho) / D};
}

double dalpha_eval(const OpenBookManifold& M, const MPoint& pt,
                   const std::array<double, 3>& u, const std::array<double, 3>& v) {
  switch (pt.chart) {
    case MChart::TorusAnnulus:
      // d(lambda) = dr ^ dphi
      return u[0] * v[1] - u[1] * v[0];
    case MChart::TorusTube: {
      // d(lambda) = (f' - beta) ds ^ dt
      const TubeChart& T = M.atlas.tubes.at(pt.index);
      return T.area_density(pt.a) * (u[0] * v[1] - u[1] * v[0]);
    }
    case MChart::Binding: {
      // d(alpha) = h1' drho ^ dtheta + h2' drho ^ dphi
      const ProfilePair& P = M.bindings.at(pt.index).profile;
      const double rho = std::max(0.0, pt.b);
      return P.dh1(rho) * (u[1] * v[0] - u[0] * v[1]) +
             P.dh2(rho) * (u[1] * v[2] - u[2] * v[1]);
    }
  }
  return 0.0;
}

MPoint reeb_flow(const OpenBookManifold& M, const MPoint& pt, double t) {
  MPoint q = canonicalize(M, pt);
  if (q.chart == MChart::Binding) {
    const BindingChart& B = M.bindings.at(q.index);
    if (q.b <= 0.0) {
      q.a = wrap_period(q.a + t, B.length);
      return q;
    }
    const auto R = reeb_field(M, q);
    q.a = wrap_period(q.a + t * R[0], B.length);
    q.c = wrap_period(q.c + t * R[2], kTwoPi);
    return q;
  }
  q.c += t;
  return canonicalize(M, q);
}

std::vector<MPoint> reeb_trajectory(const OpenBookManifold& M, const MPoint& pt,
                                    double duration, int samples) {
  if (samples < 1) throw std::invalid_argument("trajectory needs at least one sample");
  std::vector<MPoint> out;
  out.reserve(samples + 1);
  for (int j = 0; j <= samples; ++j) out.push_back(reeb_flow(M, pt, duration * j / samples));
  return out;
}

std::pair<PagePoint, double> return_map(const OpenBookManifold& M, const PagePoint& w) {
  if (w.chart == PagePoint::Chart::Annulus && std::abs(w.a) >= 1.0)
    throw std::domain_error("the return map is defined on the open page");
  const double T = -M.primitive.value(M.atlas, w);
  PagePoint img = M.monodromy.time1(w);
  if (img.chart == PagePoint::Chart::Annulus) img.b = wrap_period(img.b, kTwoPi);
  return {img, T};
}

double rotation_number(const OpenBookManifold& M, int b, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw std::domain_error("rotation number is defined for rho in (0, 1)");
  const BindingChart& B = M.bindings.at(b);
  return (kTwoPi / B.length) * (-B.profile.dh2(rho) / B.profile.dh1(rho));
}

std::vector<OrbitRecord> periodic_orbits(const OpenBookManifold& M, const OrbitSpec& spec) {
  std::vector<OrbitRecord> out;
  auto finish = [&](OrbitRecord rec) {
    rec.cls = classify(M, rec.base);
    rec.polyline = sample_orbit(M, rec, spec.polyline_samples);
    out.push_back(std::move(rec));
  };

  for (int b = 0; b < static_cast<int>(M.bindings.size()); ++b) {
    const BindingChart& B = M.bindings[b];
    const ProfilePair& P = B.profile;

    OrbitRecord core;
    core.name = "core:" + B.label;
    core.base = binding_point(b, 0.0, 0.0, 0.0);
    core.period = B.length;  // unit arc-length speed on the core
    core.p = 1;
    core.q = 0;
    core.family = "core";
    finish(std::move(core));

    // Rational tori.  The rotation number equals rot0 on the whole pure-power
    // zone and decreases monotonically to 0 across the transition annulus.
    const double rho_band = 0.15;
    const double rot0 = rotation_number(M, b, rho_band);
    auto torus_period = [&P](double rho, int q) {
      return kTwoPi * q * P.D(rho) / (-P.dh1(rho));
    };

    int band_p = 0, band_q = 0;
    for (int q = 1; q <= spec.max_q && !band_q; ++q) {
      const int p = static_cast<int>(std::lround(rot0 * q));
      if (p >= 1 && std::gcd(p, q) == 1 && std::abs(rot0 - static_cast<double>(p) / q) < 1e-9) {
        band_p = p;
        band_q = q;
      }
    }
    if (band_q) {
      OrbitRecord band;
      band.name = frac_name("pure", B.label, band_p, band_q);
      band.base = binding_point(b, 0.0, rho_band, 0.0);
      band.period = torus_period(rho_band, band_q);
      band.p = band_p;
      band.q = band_q;
      band.family = "band";
      finish(std::move(band));
    }

    for (int q = 1; q <= spec.max_q; ++q)
      for (int p = 1; static_cast<double>(p) / q < rot0 - 1e-9; ++p) {
        if (std::gcd(p, q) != 1) continue;
        const double target = static_cast<double>(p) / q;
        const double rho_star = find_root(
            [&](double rho) { return rotation_number(M, b, rho) - target; }, rho_band,
            P.r_star);
        OrbitRecord tor;
        tor.name = frac_name("torus", B.label, p, q);
        tor.base = binding_point(b, 0.0, rho_star, 0.0);
        tor.period = torus_period(rho_star, q);
        tor.p = p;
        tor.q = q;
        tor.family = "torus";
        finish(std::move(tor));
      }

    OrbitRecord mer;
    mer.name = "meridian:" + B.label;
    const double rho_m = 0.5 * (P.r_star + M.glue_lo);  // on the plateau, inside the chart
    mer.base = binding_point(b, 0.0, rho_m, 0.0);
    mer.period = torus_period(rho_m, 1);
    mer.p = 0;
    mer.q = 1;
    mer.family = "region";
    finish(std::move(mer));
  }

  for (int a = 0; a < static_cast<int>(M.atlas.annuli.size()); ++a) {
    const std::string& alabel = M.atlas.annuli[a].label;
    const TwistProfile& tw = M.monodromy.tw[a];
    for (int side : {+1, -1}) {
      OrbitRecord rec;
      rec.name = std::string("plateau:") + alabel + (side > 0 ? ":+" : ":-");
      const double r = side * 0.73;
      rec.base = torus_annulus_point(a, r, 0.0, 0.0);
      rec.period =
          -M.primitive.value(M.atlas, PagePoint{PagePoint::Chart::Annulus, a, r, 0.0});
      rec.p = 0;
      rec.q = 1;
      rec.family = "region";
      finish(std::move(rec));
    }
    for (int k = 1; k <= spec.max_k; ++k)
      for (int m = 1; m < k; ++m) {
        if (std::gcd(m, k) != 1) continue;
        const double target = kTwoPi * m / k;
        const double r = find_root([&](double x) { return tw(x) - target; }, -1.0, 1.0);
        OrbitRecord rec;
        rec.name = frac_name("page", alabel, m, k);
        rec.base = torus_annulus_point(a, r, 0.0, 0.0);
        rec.period =
            -k * M.primitive.value(M.atlas, PagePoint{PagePoint::Chart::Annulus, a, r, 0.0});
        rec.p = m;
        rec.q = k;
        rec.family = "torus";
        finish(std::move(rec));
      }
  }

  for (int k = 0; k < static_cast<int>(M.atlas.tubes.size()); ++k) {
    const TubeChart& T = M.atlas.tubes[k];
    OrbitRecord rec;
    rec.name = "tube:" + std::to_string(k);
    rec.base = torus_tube_point(k, T.saddle_s(), 0.5, 0.0);
    rec.period = -M.primitive.value(
        M.atlas, PagePoint{PagePoint::Chart::Tube, k, T.saddle_s(), 0.5});
    rec.p = 0;
    rec.q = 1;
    rec.family = "region";
    finish(std::move(rec));
  }
  return out;
}

std::vector<MPoint> sample_orbit(const OpenBookManifold& M, const OrbitRecord& rec, int n) {
  if (n < 1) throw std::invalid_argument("orbit sampling needs at least one point");
  std::vector<MPoint> pts;
  pts.reserve(n);
  for (int j = 0; j < n; ++j) pts.push_back(reeb_flow(M, rec.base, rec.period * j / n));
  return pts;
}

double integral_H2(const OpenBookManifold& M, const MPoint& pt) {
  if (pt.chart == MChart::Binding) {
    const BindingChart& B = M.bindings.at(pt.index);
    return B.profile.h2(std::max(0.0, pt.b)) + collar_H(M, pt.index) - B.profile.plateau;
  }
  return M.monodromy.reduced(M.atlas, page_of(pt));
}

double conservation_check(const OpenBookManifold& M, const std::vector<MPoint>& seeds,
                          double duration, int checks) {
  double worst = 0.0;
  for (const MPoint& s : seeds) {
    const double h0 = integral_H2(M, s);
    for (int j = 1; j <= checks; ++j) {
      const double h = integral_H2(M, reeb_flow(M, s, duration * j / checks));
      worst = std::max(worst, std::abs(h - h0));
    }
  }
  return worst;
}

InvarianceReport invariance_check(const OpenBookManifold& M, int samples, double duration,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  InvarianceReport rep;
  for (int i = 0; i < samples; ++i) {
    const MPoint x = random_point(M, i, rng);
    const InvariantClass c0 = classify(M, x);
    for (int j = 1; j <= 8; ++j) {
      const MPoint y = reeb_flow(M, x, duration * j / 8.0);
      const InvariantClass c1 = classify(M, y);
      if (!c0.same_class(c1)) {
        rep.ok = false;
        rep.what = "class changed from " + c0.name() + " to " + c1.name();
        rep.counterexample = x;
        return rep;
      }
      if (c0.kind == InvariantClass::Kind::BindingTorus && std::abs(c0.rho - c1.rho) > 1e-6) {
        rep.ok = false;
        rep.what = "binding-torus radius drifted by " + std::to_string(c1.rho - c0.rho);
        rep.counterexample = x;
        return rep;
      }
    }
  }
  return rep;
}

ContactResiduals contact_identity_check(const OpenBookManifold& M, int samples,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ContactResiduals res;
  const std::array<std::array<double, 3>, 3> frame = {
      {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  for (int i = 0; i < samples; ++i) {
    const MPoint x = random_point(M, i, rng);
    const auto R = reeb_field(M, x);
    res.alpha = std::max(res.alpha, std::abs(contact_form_eval(M, x, R) - 1.0));
    for (const auto& v : frame)
      res.dalpha = std::max(res.dalpha, std::abs(dalpha_eval(M, x, R, v)));
  }
  return res;
}

}  // namespace reebbook
