#include "reebbook/page.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace reebbook {

namespace {

double wrap2pi(double x) {
  double m = std::fmod(x, kTwoPi);
  if (m < 0.0) m += kTwoPi;
  return m;
}
// Principal angular difference in (-pi, pi].
double wrap_pm(double x) { return std::remainder(x, kTwoPi); }

constexpr double kWindowMargin = 0.02;  // minimal free angular gap between windows

}  // namespace

// ---------------------------------------------------------------------------
// TubeChart

double TubeChart::end_r(int e, double s) const {
  const Window& W = end[e];
  double u = (e == 0) ? (s + kZone) : (kZone - s);  // <= 0 inside the end zone
  return W.side * (1.0 + 1.5 * depth * u);
}

double TubeChart::end_phi(int e, double t) const {
  const Window& W = end[e];
  double sgn = (e == 0) ? +1.0 : -1.0;
  return W.center + sgn * W.side * width(e) * (t - 0.5);
}

std::array<double, 2> TubeChart::end_st(int e, double r, double phi) const {
  const Window& W = end[e];
  double u = (std::abs(r) - 1.0) / (1.5 * depth);
  double s = (e == 0) ? (u - kZone) : (kZone - u);
  double sgn = (e == 0) ? +1.0 : -1.0;
  double t = 0.5 + sgn * W.side * wrap_pm(phi - W.center) / width(e);
  return {s, t};
}

double TubeChart::f_ext(int e, double s) const {
  double sgn = (e == 0) ? +1.0 : -1.0;
  return end_r(e, s) * sgn * end[e].side * width(e);
}

double TubeChart::f(double s) const {
  double S = blendS(s);
  return (1.0 - S) * f_ext(0, s) + S * f_ext(1, s);
}

double TubeChart::df(double s) const {
  double sigma = (s + kZone) / (2.0 * kZone);
  double S = step01(sigma);
  double dS = step01_deriv(sigma) / (2.0 * kZone);
  double d0 = 1.5 * depth * width(0);
  double d1 = 1.5 * depth * width(1);
  return dS * (f_ext(1, s) - f_ext(0, s)) + (1.0 - S) * d0 + S * d1;
}

double TubeChart::beta(double s) const {
  double sigma = (s + kZone) / (2.0 * kZone);
  double dS = step01_deriv(sigma) / (2.0 * kZone);
  // The 1.25 overshoot keeps f' - beta strictly positive:
  // f' - beta = -0.25 dS (f1 - f0) + (3d/2)((1-S)w0 + S w1) with f1 < 0 < f0.
  return 1.25 * dS * (f_ext(1, s) - f_ext(0, s));
}

double TubeChart::area_density(double s) const { return df(s) - beta(s); }

std::array<double, 2> TubeChart::liouville(double s, double t) const {
  double den = area_density(s);
  return {f(s) / den, -beta(s) * (t - 0.5) / den};
}

double TubeChart::r_blend(double s) const {
  double S = blendS(s);
  return (1.0 - S) * end_r(0, s) + S * end_r(1, s);
}

void TubeChart::init() {
  saddle_s_ = find_root([this](double s) { return f(s); }, -kZone + 1e-9, kZone - 1e-9);
  edge_len_ = 0.5 * integrate([this](double s) { return std::abs(beta(s)); }, -kZone, kZone);
}

// ---------------------------------------------------------------------------
// PageAtlas

std::vector<std::pair<int, int>> PageAtlas::windows_on(int annulus, int side) const {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < static_cast<int>(tubes.size()); ++k)
    for (int e = 0; e < 2; ++e)
      if (tubes[k].end[e].annulus == annulus && tubes[k].end[e].side == side)
        out.emplace_back(k, e);
  std::sort(out.begin(), out.end(), [&](const auto& x, const auto& y) {
    return tubes[x.first].end[x.second].center < tubes[y.first].end[y.second].center;
  });
  return out;
}

void PageAtlas::rebuild_boundaries() {
  boundaries_.clear();
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> wins;
  for (const auto& [key, label] : side_label) {
    (void)label;
    wins[key] = windows_on(key.first, key.second);
  }

  // Sides without windows are free boundary circles.
  for (const auto& [key, wv] : wins) {
    if (!wv.empty()) continue;
    BoundaryCircle c;
    c.label = side_label.at(key);
    BoundarySeg arc;
    arc.is_arc = true;
    arc.annulus = key.first;
    arc.side = key.second;
    arc.phi_begin = 0.0;
    arc.length = kTwoPi;
    arc.lambda_length = kTwoPi;
    c.segs.push_back(arc);
    c.lambda_length = kTwoPi;
    boundaries_.push_back(std::move(c));
  }

  // Arcs are identified by the window whose exit corner starts them.
  std::set<std::tuple<int, int, int>> visited;
  for (const auto& [key0, wv0] : wins) {
    for (int w0 = 0; w0 < static_cast<int>(wv0.size()); ++w0) {
      if (visited.count({key0.first, key0.second, w0})) continue;
      BoundaryCircle c;
      c.label = side_label.at(key0);
      int a = key0.first, side = key0.second, wi = w0;
      do {
        visited.insert({a, side, wi});
        const auto& wlist = wins.at({a, side});
        if (side_label.at({a, side}) != c.label)
          throw std::runtime_error("boundary circle traverses inconsistently labeled sides");
        const Window& W = tubes[wlist[wi].first].end[wlist[wi].second];
        double phi_out = W.center + side * W.halfwidth;
        int n = static_cast<int>(wlist.size());
        int wj = (side == +1) ? (wi + 1) % n : (wi + n - 1) % n;
        const Window& W2 = tubes[wlist[wj].first].end[wlist[wj].second];
        double phi_in = W2.center - side * W2.halfwidth;
        double len = wrap2pi(side * (phi_in - phi_out));
        BoundarySeg arc;
        arc.is_arc = true;
        arc.annulus = a;
        arc.side = side;
        arc.phi_begin = wrap2pi(phi_out);
        arc.length = len;
        arc.lambda_length = len;
        c.segs.push_back(arc);

        auto [k2, e2] = wlist[wj];
        BoundarySeg edge;
        edge.is_arc = false;
        edge.tube = k2;
        edge.t_edge = e2;  // edge t = 0 leaves end 0; edge t = 1 leaves end 1
        edge.lambda_length = tubes[k2].edge_lambda_length();
        c.segs.push_back(edge);

        const Window& W3 = tubes[k2].end[1 - e2];
        a = W3.annulus;
        side = W3.side;
        const auto& wl3 = wins.at({a, side});
        wi = -1;
        for (int i = 0; i < static_cast<int>(wl3.size()); ++i)
          if (wl3[i] == std::make_pair(k2, 1 - e2)) wi = i;
        if (wi < 0) throw std::runtime_error("tube end not registered on its side");
      } while (!(a == key0.first && side == key0.second && wi == w0));
      for (const auto& s : c.segs) c.lambda_length += s.lambda_length;
      boundaries_.push_back(std::move(c));
    }
  }
}

const BoundaryCircle& PageAtlas::boundary(const std::string& label) const {
  for (const auto& c : boundaries_)
    if (c.label == label) return c;
  throw std::invalid_argument("no boundary component labeled '" + label + "'");
}

void PageAtlas::validate() const {
  std::set<std::string> alabels;
  for (const auto& a : annuli)
    if (!alabels.insert(a.label).second)
      throw std::runtime_error("duplicate annulus label " + a.label);
  for (const auto& T : tubes) {
    for (int e = 0; e < 2; ++e) {
      const Window& W = T.end[e];
      if (W.annulus < 0 || W.annulus >= static_cast<int>(annuli.size()))
        throw std::runtime_error("tube end references missing annulus");
      if (W.side != +1 && W.side != -1) throw std::runtime_error("tube end side must be +-1");
      if (!(W.halfwidth > 0.0 && W.halfwidth < kPi / 2.0))
        throw std::runtime_error("window halfwidth out of range");
    }
    if (!(T.depth > 0.0 && T.depth < collar_width))
      throw std::runtime_error("tube depth must sit inside the collar");
    // Area density positive and a single sign change of f (one saddle).
    int changes = 0;
    int last = 0;  // last nonzero sign of f seen along the grid
    for (int i = 0; i <= 400; ++i) {
      double s = -1.0 + 2.0 * i / 400.0;
      if (!(T.area_density(s) > 0.0)) throw std::runtime_error("tube area density not positive");
      double v = T.f(s);
      if (v == 0.0) continue;
      int sgn = (v > 0.0) ? +1 : -1;
      if (last != 0 && sgn != last) ++changes;
      last = sgn;
    }
    if (changes != 1) throw std::runtime_error("tube Liouville function must cross zero once");
  }
  // Windows on one side must not overlap (cyclic gaps above the margin).
  for (int a = 0; a < static_cast<int>(annuli.size()); ++a) {
    for (int side : {+1, -1}) {
      auto wv = windows_on(a, side);
      int n = static_cast<int>(wv.size());
      for (int i = 0; i < n && n > 1; ++i) {
        const Window& cur = tubes[wv[i].first].end[wv[i].second];
        const Window& nxt = tubes[wv[(i + 1) % n].first].end[wv[(i + 1) % n].second];
        double gap = wrap2pi((nxt.center - nxt.halfwidth) - (cur.center + cur.halfwidth));
        if (gap < kWindowMargin) throw std::runtime_error("overlapping attachment regions");
      }
    }
  }
  // Every (annulus, side) label appears on exactly one boundary circle.
  std::map<std::string, int> label_count;
  for (const auto& c : boundaries_) label_count[c.label]++;
  for (const auto& [label, cnt] : label_count)
    if (cnt != 1) throw std::runtime_error("boundary label '" + label + "' is not a single circle");
}

// ---------------------------------------------------------------------------
// Classification

PageRegion classify_page_point(const PageAtlas& atlas, const PagePoint& x) {
  if (x.chart == PagePoint::Chart::Tube) {
    const TubeChart& T = atlas.tubes[x.index];
    PageRegion reg;
    std::string label;
    for (int e = 0; e < 2; ++e)
      if (TubeChart::in_zone(e, x.a))
        label = atlas.side_label.at({T.end[e].annulus, T.end[e].side});
    if (label.empty() && (x.b <= kTubeCollarT || x.b >= 1.0 - kTubeCollarT))
      label = atlas.side_label.at({T.end[0].annulus, T.end[0].side});
    if (!label.empty()) {
      reg.kind = PageRegion::Kind::Collar;
      reg.collar = label;
      return reg;
    }
    reg.kind = PageRegion::Kind::Tube;
    reg.index = x.index;
    return reg;
  }
  // Annulus chart: window strips belong to the tube charts.
  double r = x.a, phi = x.b;
  int side = r >= 0.0 ? +1 : -1;
  if (std::abs(r) > 1.0 - atlas.collar_width) {
    for (auto [k, e] : atlas.windows_on(x.index, side)) {
      const TubeChart& T = atlas.tubes[k];
      const Window& W = T.end[e];
      if (std::abs(r) > 1.0 - T.depth &&
          std::abs(wrap_pm(phi - W.center)) < W.halfwidth) {
        auto st = T.end_st(e, r, phi);
        PagePoint tp;
        tp.chart = PagePoint::Chart::Tube;
        tp.index = k;
        tp.a = st[0];
        tp.b = st[1];
        return classify_page_point(atlas, tp);
      }
    }
  }
  PageRegion reg;
  if (std::abs(r) >= 1.0 - atlas.collar_width) {
    reg.kind = PageRegion::Kind::Collar;
    reg.collar = atlas.side_label.at({x.index, side});
  } else {
    reg.kind = PageRegion::Kind::Interior;
    reg.index = x.index;
  }
  return reg;
}

// ---------------------------------------------------------------------------
// Monodromy

double MonodromyHamiltonian::reduced(const PageAtlas& atlas, const PagePoint& x) const {
  (void)atlas;
  if (x.chart == PagePoint::Chart::Tube) return tube_value.at(x.index);
  return F.at(x.index).value(x.a);
}

double MonodromyHamiltonian::raw(const PagePoint& x) const {
  if (x.chart != PagePoint::Chart::Annulus)
    throw std::invalid_argument("raw Hamiltonian values are chart-wise radial (annulus only)");
  return Hraw.at(x.index).value(x.a);
}

PagePoint MonodromyHamiltonian::time1(const PagePoint& x) const {
  if (x.chart == PagePoint::Chart::Tube) return x;
  PagePoint y = x;
  y.b = wrap2pi(x.b + tw.at(x.index)(x.a));
  return y;
}

std::pair<PageAtlas, MonodromyHamiltonian> make_annulus_page(const TwistProfile& tw,
                                                             const std::string& label) {
  tw.validate();
  PageAtlas atlas;
  atlas.annuli.push_back({label});
  atlas.side_label[{0, +1}] = "u" + label;
  atlas.side_label[{0, -1}] = "l" + label;
  atlas.rebuild_boundaries();
  atlas.validate();

  MonodromyHamiltonian H;
  H.tw = {tw};
  H.Hraw = {hamiltonian_from_twist(tw, 0.0)};
  H.F = {action_from_twist(tw)};
  return {atlas, H};
}

namespace {

Window pick_window(const BoundaryCircle& circle, double halfwidth) {
  const BoundarySeg* best = nullptr;
  for (const auto& seg : circle.segs)
    if (seg.is_arc && (best == nullptr || seg.length > best->length)) best = &seg;
  if (best == nullptr || best->length < 2.0 * halfwidth + 0.1)
    throw std::runtime_error("no attachment room on boundary component '" + circle.label + "'");
  Window W;
  W.annulus = best->annulus;
  W.side = best->side;
  W.center = wrap2pi(best->phi_begin + best->side * best->length / 2.0);
  W.halfwidth = halfwidth;
  return W;
}

}  // namespace

PageAtlas boundary_connected_sum(const PageAtlas& P1, const std::string& b1,
                                 const PageAtlas& P2, const std::string& b2,
                                 double halfwidth, double depth) {
  if (b1 == b2) throw std::invalid_argument("cannot sum a page with itself along one component");
  P1.boundary(b1);
  P2.boundary(b2);

  PageAtlas out;
  out.collar_width = P1.collar_width;
  out.annuli = P1.annuli;
  out.annuli.insert(out.annuli.end(), P2.annuli.begin(), P2.annuli.end());
  int shift = static_cast<int>(P1.annuli.size());
  out.tubes = P1.tubes;
  for (TubeChart T : P2.tubes) {
    T.end[0].annulus += shift;
    T.end[1].annulus += shift;
    out.tubes.push_back(T);
  }
  out.side_label = P1.side_label;
  for (const auto& [key, label] : P2.side_label)
    out.side_label[{key.first + shift, key.second}] = label;
  out.rebuild_boundaries();

  TubeChart T;
  T.end[0] = pick_window(out.boundary(b1), halfwidth);
  T.end[1] = pick_window(out.boundary(b2), halfwidth);
  T.depth = depth;
  std::ostringstream name;
  name << "T" << out.tubes.size() + 1;
  T.label = name.str();
  T.init();
  out.tubes.push_back(T);

  std::string merged = b1 + "#" + b2;
  for (auto& [key, label] : out.side_label)
    if (label == b1 || label == b2) label = merged;
  out.rebuild_boundaries();
  out.validate();
  return out;
}

MonodromyHamiltonian extend_monodromy(const MonodromyHamiltonian& H1,
                                      const MonodromyHamiltonian& H2,
                                      const PageAtlas& summed) {
  if (summed.tubes.empty()) throw std::invalid_argument("summed atlas has no connecting tube");
  const TubeChart& T = summed.tubes.back();
  int n1 = static_cast<int>(H1.tw.size());
  if (T.end[0].annulus >= n1 || T.end[1].annulus < n1)
    throw std::invalid_argument("new tube does not join the two summands");

  // Both monodromies must be the identity on the attachment collars.
  for (int e = 0; e < 2; ++e) {
    const Window& W = T.end[e];
    const MonodromyHamiltonian& Hs = (e == 0) ? H1 : H2;
    int local = (e == 0) ? W.annulus : W.annulus - n1;
    double twv = Hs.tw.at(local)(W.side * (1.0 - T.depth));
    double target = (W.side > 0) ? 0.0 : kTwoPi;
    if (std::abs(twv - target) > 1e-12)
      throw std::runtime_error("monodromy is not the identity on the attachment collar");
  }

  // Renormalize the second side so the reduced Hamiltonians agree on the tube.
  double v1 = H1.F.at(T.end[0].annulus).value(static_cast<double>(T.end[0].side));
  double v2 = H2.F.at(T.end[1].annulus - n1).value(static_cast<double>(T.end[1].side));
  double delta = v1 - v2;

  MonodromyHamiltonian H = H1;
  for (std::size_t i = 0; i < H2.tw.size(); ++i) {
    H.tw.push_back(H2.tw[i]);
    H.Hraw.push_back(hamiltonian_from_twist(H2.tw[i], H2.Hraw[i].c0() + delta));
    ActionProfile F = H2.F[i];
    F.set_constant(F.constant() + delta);
    H.F.push_back(F);
  }
  for (double tv : H2.tube_value) H.tube_value.push_back(tv + delta);
  H.tube_value.push_back(v1);

  if (H.tw.size() != summed.annuli.size() || H.tube_value.size() != summed.tubes.size())
    throw std::runtime_error("monodromy does not cover the summed atlas");
  return H;
}

// ---------------------------------------------------------------------------
// Primitive U

double PagePrimitiveU::value(const PageAtlas& atlas, const PagePoint& x) const {
  (void)atlas;
  if (x.chart == PagePoint::Chart::Tube) return -1.0;
  return per_annulus.at(x.index).value(x.a);
}

PagePrimitiveU page_primitive_U(const MonodromyHamiltonian& H, const PageAtlas& atlas) {
  PagePrimitiveU U;
  for (const auto& tw : H.tw) U.per_annulus.emplace_back(tw);
  // Tube end zones live where |r| >= 1 - depth, inside the twist plateaus, so
  // U == -1 there must match the constant tube value exactly.
  for (const auto& T : atlas.tubes) {
    for (int e = 0; e < 2; ++e) {
      double r = T.end[e].side * (1.0 - T.depth);
      double u = U.per_annulus.at(T.end[e].annulus).value(r);
      if (std::abs(u + 1.0) > 1e-10)
        throw std::runtime_error("primitive U is not -1 on an attachment collar");
    }
  }
  return U;
}

// ---------------------------------------------------------------------------
// Contours

std::vector<ContourLevel> level_set_contours(const PageAtlas& atlas,
                                             const MonodromyHamiltonian& H, int levels,
                                             int segments) {
  if (levels <= 0 || segments < 8) throw std::invalid_argument("degenerate contour grid");
  double vmin = 1e300, vmax = -1e300;
  for (std::size_t a = 0; a < atlas.annuli.size(); ++a) {
    for (int i = 0; i <= 400; ++i) {
      double v = H.F.at(a).value(-1.0 + 2.0 * i / 400.0);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
  }
  std::vector<ContourLevel> out;
  for (int l = 0; l < levels; ++l) {
    ContourLevel cl;
    cl.level = vmin + (l + 0.5) * (vmax - vmin) / levels;
    for (std::size_t a = 0; a < atlas.annuli.size(); ++a) {
      const ActionProfile& F = H.F.at(a);
      for (double r0 : find_roots_scan(
               [&](double r) { return F.value(r) - cl.level; }, -0.999, 0.999, 500)) {
        ContourLevel::Polyline poly;
        poly.annulus = static_cast<int>(a);
        for (int j = 0; j <= segments; ++j)
          poly.points.push_back({r0, kTwoPi * j / segments});
        cl.polylines.push_back(std::move(poly));
      }
    }
    out.push_back(std::move(cl));
  }
  return out;
}

}  // namespace reebbook
