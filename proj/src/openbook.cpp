#include "reebbook/openbook.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace reebbook {
namespace {

using nlohmann::json;

double tau_of_rho(const ProfilePair& P, double rho) { return -std::log(P.h1(rho)); }

// Inverse of the strictly decreasing h1 on [0, 1]; target must lie in
// (h1(1), 1].
double invert_h1(const ProfilePair& P, double target) {
  if (target >= 1.0) return 0.0;
  if (target <= P.h1(1.0))
    throw std::invalid_argument("radius outside the binding chart");
  return find_root([&](double rho) { return P.h1(rho) - target; }, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Tube Liouville flow with a 2x2 variational frame.  State layout:
// y = (s, t, J00, J01, J10, J11) with J[i][j] = d(state_i)/d(initial_j).

struct TubeFlow {
  const TubeChart* T;
  int dir;  // +1 outward, -1 inward

  std::array<double, 6> rhs(const std::array<double, 6>& y) const {
    const double s = y[0], t = y[1];
    const auto Y = T->liouville(s, t);
    // Y_s = f/den depends on s only; Y_t = m(s) (t - 1/2) with m = -beta/den.
    const double h = 1e-5;
    const auto Yp = T->liouville(s + h, t), Ym = T->liouville(s - h, t);
    const double a11 = (Yp[0] - Ym[0]) / (2.0 * h);
    const double m = -T->beta(s) / T->area_density(s);
    const double mp = -T->beta(s + h) / T->area_density(s + h);
    const double mm = -T->beta(s - h) / T->area_density(s - h);
    const double a21 = (t - 0.5) * (mp - mm) / (2.0 * h);
    const double a22 = m;
    return {dir * Y[0],
            dir * Y[1],
            dir * a11 * y[2],
            dir * a11 * y[3],
            dir * (a21 * y[2] + a22 * y[4]),
            dir * (a21 * y[3] + a22 * y[5])};
  }

  void step(std::array<double, 6>& y, double h) const {
    const auto k1 = rhs(y);
    std::array<double, 6> u;
    for (int i = 0; i < 6; ++i) u[i] = y[i] + 0.5 * h * k1[i];
    const auto k2 = rhs(u);
    for (int i = 0; i < 6; ++i) u[i] = y[i] + 0.5 * h * k2[i];
    const auto k3 = rhs(u);
    for (int i = 0; i < 6; ++i) u[i] = y[i] + h * k3[i];
    const auto k4 = rhs(u);
    for (int i = 0; i < 6; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
};

constexpr double kFlowStep = 1e-3;

void flow_inward(const TubeChart& T, double tau, double& s, double& t,
                 std::array<double, 4>* J) {
  const TubeFlow F{&T, -1};
  std::array<double, 6> y{s, t, 1.0, 0.0, 0.0, 1.0};
  const int n = std::max(1, static_cast<int>(std::ceil(tau / kFlowStep)));
  const double h = tau / n;
  for (int i = 0; i < n; ++i) F.step(y, h);
  s = y[0];
  t = y[1];
  if (J) *J = {y[2], y[3], y[4], y[5]};
}

struct EdgeHit {
  bool hit = false;
  double tau = 0.0, s = 0.0;
  int t_edge = 0;
};

// Flow outward from (s0, t0) until the trajectory crosses a free edge (t = 0
// or t = 1), up to Liouville time tau_cap.
EdgeHit flow_to_edge(const TubeChart& T, double s0, double t0, double tau_cap) {
  if (t0 <= 0.0 || t0 >= 1.0) return {true, 0.0, s0, t0 >= 1.0 ? 1 : 0};
  const TubeFlow F{&T, +1};
  std::array<double, 6> y{s0, t0, 1.0, 0.0, 0.0, 1.0};
  double tau = 0.0;
  while (tau < tau_cap) {
    const double h = std::min(kFlowStep, tau_cap - tau);
    const auto prev = y;
    F.step(y, h);
    if (y[1] < 0.0 || y[1] > 1.0) {
      const int e = (y[1] > 1.0) ? 1 : 0;
      double lo = 0.0, hi = h;
      auto trial = y;
      for (int it = 0; it < 80 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        trial = prev;
        F.step(trial, mid);
        const bool past = (e == 1) ? (trial[1] > 1.0) : (trial[1] < 0.0);
        (past ? hi : lo) = mid;
      }
      const double hit_h = 0.5 * (lo + hi);
      trial = prev;
      F.step(trial, hit_h);
      return {true, tau + hit_h, trial[0], e};
    }
    tau += h;
  }
  return {};
}

// ---------------------------------------------------------------------------
// Outward Liouville ray from a page point to the page boundary.

struct ExitInfo {
  bool hit = false;
  int binding = -1;
  double tau = 0.0;    // Liouville depth of the start point below the boundary
  double theta = 0.0;  // arc-length coordinate of the exit on its circle
};

ExitInfo liouville_exit(const OpenBookManifold& M, const PagePoint& w, double tau_cap) {
  const PageAtlas& A = M.atlas;
  if (w.chart == PagePoint::Chart::Annulus) {
    const double r = w.a;
    const double ar = std::abs(r);
    if (ar <= 0.0 || ar > 1.0) return {};
    const int side = (r >= 0.0) ? +1 : -1;
    const double phi = wrap_period(w.b, kTwoPi);
    int wk = -1, we = 0;
    for (auto [k, e] : A.windows_on(w.index, side)) {
      const Window& W = A.tubes[k].end[e];
      if (std::abs(wrap_centered(phi - W.center, kTwoPi)) < W.halfwidth) {
        wk = k;
        we = e;
        break;
      }
    }
    ExitInfo ex;
    if (wk < 0) {
      // The outward ray stays in the annulus chart and exits through an arc.
      const double tau = -std::log(ar);
      if (tau >= tau_cap) return {};
      ex.hit = true;
      ex.tau = tau;
      ex.binding = M.binding_index(A.side_label.at({w.index, side}));
      ex.theta = M.bindings[ex.binding].arc_theta(w.index, side, phi);
      return ex;
    }
    // Under an attachment window the ray crosses into the tube chart.
    const TubeChart& T = A.tubes[wk];
    double tau1 = 0.0, s = 0.0, t = 0.0;
    if (ar >= 1.0 - T.depth) {
      const auto st = T.end_st(we, r, phi);
      s = st[0];
      t = st[1];
    } else {
      tau1 = std::log((1.0 - T.depth) / ar);
      if (tau1 >= tau_cap) return {};
      const auto st = T.end_st(we, side * (1.0 - T.depth), phi);
      s = st[0];
      t = st[1];
    }
    const EdgeHit eh = flow_to_edge(T, s, t, tau_cap - tau1);
    if (!eh.hit) return {};
    const Window& W0 = T.end[0];
    ex.hit = true;
    ex.tau = tau1 + eh.tau;
    ex.binding = M.binding_index(A.side_label.at({W0.annulus, W0.side}));
    ex.theta = M.bindings[ex.binding].edge_theta(wk, eh.t_edge, eh.s, A.tubes);
    return ex;
  }
  const TubeChart& T = A.tubes.at(w.index);
  const EdgeHit eh = flow_to_edge(T, w.a, w.b, tau_cap);
  if (!eh.hit) return {};
  ExitInfo ex;
  ex.hit = true;
  ex.tau = eh.tau;
  const Window& W0 = T.end[0];
  ex.binding = M.binding_index(A.side_label.at({W0.annulus, W0.side}));
  ex.theta = M.bindings[ex.binding].edge_theta(w.index, eh.t_edge, eh.s, A.tubes);
  return ex;
}

MPoint glue_impl(const OpenBookManifold& M, const MPoint& pt,
                 const std::array<double, 3>* v, std::array<double, 3>* v_out) {
  if (pt.chart != MChart::Binding)
    throw std::invalid_argument("gluing expects binding-chart coordinates");
  const BindingChart& B = M.bindings.at(pt.index);
  const double rho = pt.b;
  if (!(rho > M.glue_lo && rho < M.glue_hi))
    throw std::invalid_argument("radius is outside the gluing annulus");
  const ProfilePair& P = B.profile;
  const double theta_arc = wrap_period(pt.a, B.length);
  const double fiber = wrap_period(pt.c, kTwoPi) / kTwoPi;
  const CirclePoint cp = B.at(theta_arc, M.atlas.tubes);

  if (cp.on_arc) {
    const MPoint out = torus_annulus_point(cp.annulus, cp.side * P.h1(rho), cp.phi, fiber);
    if (v && v_out) {
      (*v_out)[0] = cp.side * P.dh1(rho) * (*v)[1];
      (*v_out)[1] = cp.side * (*v)[0];
      (*v_out)[2] = (*v)[2] / kTwoPi;
    }
    return out;
  }

  const TubeChart& T = M.atlas.tubes.at(cp.tube);
  const double tau = tau_of_rho(P, rho);
  double s = cp.s, t = static_cast<double>(cp.t_edge);
  std::array<double, 4> J{1.0, 0.0, 0.0, 1.0};
  flow_inward(T, tau, s, t, (v && v_out) ? &J : nullptr);
  const MPoint out = torus_tube_point(cp.tube, s, t, fiber);
  if (v && v_out) {
    const double beta0 = T.beta(cp.s);
    if (std::abs(beta0) < 1e-100)
      throw std::invalid_argument("pushforward undefined at a tube corner");
    const double ds_dtheta = (cp.t_edge == 0 ? -2.0 : 2.0) / beta0;  // beta < 0
    const double taup = -P.dh1(rho) / P.h1(rho);
    const auto Y = T.liouville(s, t);
    const double cs = J[0] * ds_dtheta, ct = J[2] * ds_dtheta;
    const double rs = -taup * Y[0], rt = -taup * Y[1];
    (*v_out)[0] = cs * (*v)[0] + rs * (*v)[1];
    (*v_out)[1] = ct * (*v)[0] + rt * (*v)[1];
    (*v_out)[2] = (*v)[2] / kTwoPi;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

MPoint torus_annulus_point(int annulus, double r, double phi, double fiber) {
  return {MChart::TorusAnnulus, annulus, r, phi, fiber};
}
MPoint torus_tube_point(int tube, double s, double t, double fiber) {
  return {MChart::TorusTube, tube, s, t, fiber};
}
MPoint binding_point(int binding, double theta, double rho, double phi_B) {
  return {MChart::Binding, binding, theta, rho, phi_B};
}

PagePoint page_of(const MPoint& pt) {
  if (pt.chart == MChart::Binding)
    throw std::invalid_argument("binding-chart points have no page projection");
  PagePoint w;
  w.chart = (pt.chart == MChart::TorusAnnulus) ? PagePoint::Chart::Annulus
                                               : PagePoint::Chart::Tube;
  w.index = pt.index;
  w.a = pt.a;
  w.b = pt.b;
  return w;
}

// ---------------------------------------------------------------------------

void BindingChart::init(const std::vector<TubeChart>& tubes) {
  offset_.assign(circle.segs.size(), 0.0);
  edge_cum_.assign(circle.segs.size(), CumulativeIntegral{});
  double run = 0.0;
  for (std::size_t i = 0; i < circle.segs.size(); ++i) {
    const BoundarySeg& seg = circle.segs[i];
    offset_[i] = run;
    run += seg.lambda_length;
    if (!seg.is_arc) {
      // The integrand owns a copy of the tube chart so the table stays valid
      // when the surrounding manifold is copied or moved.
      const TubeChart T = tubes.at(seg.tube);
      const double z = TubeChart::kZone;
      edge_cum_[i] = CumulativeIntegral(
          [T](double s) { return 0.5 * std::abs(T.beta(s)); }, {-z, 0.0, z});
      if (std::abs(edge_cum_[i].total() - seg.lambda_length) > 1e-9)
        throw std::runtime_error("edge arc-length table disagrees with the boundary data");
    }
  }
  length = run;
  merged = circle.merged();
  if (std::abs(run - circle.lambda_length) > 1e-9)
    throw std::runtime_error("boundary circle length mismatch");
}

CirclePoint BindingChart::at(double theta, const std::vector<TubeChart>& tubes) const {
  (void)tubes;
  const double x = wrap_period(theta, length);
  std::size_t i = std::upper_bound(offset_.begin(), offset_.end(), x) - offset_.begin();
  i = (i == 0) ? 0 : i - 1;
  const BoundarySeg& seg = circle.segs[i];
  const double local = x - offset_[i];
  CirclePoint cp;
  if (seg.is_arc) {
    cp.on_arc = true;
    cp.annulus = seg.annulus;
    cp.side = seg.side;
    cp.phi = wrap_period(seg.phi_begin + seg.side * local, kTwoPi);
    return cp;
  }
  const CumulativeIntegral& C = edge_cum_[i];
  const double z = TubeChart::kZone;
  double target = (seg.t_edge == 0) ? local : C.total() - local;
  target = std::clamp(target, 0.0, C.total());
  double s;
  if (target <= 0.0)
    s = -z;
  else if (target >= C.total())
    s = z;
  else
    s = find_root([&](double u) { return C.value(u) - target; }, -z, z);
  cp.on_arc = false;
  cp.tube = seg.tube;
  cp.t_edge = seg.t_edge;
  cp.s = s;
  return cp;
}

double BindingChart::arc_theta(int annulus, int side, double phi) const {
  for (std::size_t i = 0; i < circle.segs.size(); ++i) {
    const BoundarySeg& seg = circle.segs[i];
    if (!seg.is_arc || seg.annulus != annulus || seg.side != side) continue;
    const double x = wrap_period(side * (phi - seg.phi_begin), kTwoPi);
    if (x <= seg.length + 1e-12)
      return wrap_period(offset_[i] + std::min(x, seg.length), length);
  }
  throw std::invalid_argument("circle '" + label + "' has no arc through that point");
}

double BindingChart::edge_theta(int tube, int t_edge, double s,
                                const std::vector<TubeChart>& tubes) const {
  (void)tubes;
  for (std::size_t i = 0; i < circle.segs.size(); ++i) {
    const BoundarySeg& seg = circle.segs[i];
    if (seg.is_arc || seg.tube != tube || seg.t_edge != t_edge) continue;
    const CumulativeIntegral& C = edge_cum_[i];
    const double z = TubeChart::kZone;
    const double cs = C.value(std::clamp(s, -z, z));
    const double local = (t_edge == 0) ? cs : C.total() - cs;
    return wrap_period(offset_[i] + local, length);
  }
  throw std::invalid_argument("circle '" + label + "' does not contain that tube edge");
}

// ---------------------------------------------------------------------------

int OpenBookManifold::binding_index(const std::string& l) const {
  for (std::size_t i = 0; i < bindings.size(); ++i)
    if (bindings[i].label == l) return static_cast<int>(i);
  return -1;
}

const BindingChart& OpenBookManifold::binding(const std::string& l) const {
  const int i = binding_index(l);
  if (i < 0) throw std::invalid_argument("no binding labeled '" + l + "'");
  return bindings[i];
}

double OpenBookManifold::fiber_period(const PagePoint& w) const {
  return -primitive.value(atlas, w);
}

OpenBookManifold assemble_open_book(const PageAtlas& atlas,
                                    const MonodromyHamiltonian& monodromy) {
  if (monodromy.tw.size() != atlas.annuli.size())
    throw std::invalid_argument("monodromy must carry one twist profile per annulus");

  OpenBookManifold M;
  M.atlas = atlas;
  M.atlas.rebuild_boundaries();
  M.atlas.validate();
  M.monodromy = monodromy;

  // The monodromy must be the identity on every boundary collar: the twist is
  // a constant multiple of 2 pi with vanishing derivative there.
  const double cw = M.atlas.collar_width;
  for (std::size_t i = 0; i < M.atlas.annuli.size(); ++i) {
    for (int side : {-1, +1}) {
      for (int k = 0; k <= 8; ++k) {
        const double r = side * (1.0 - cw * k / 8.0);
        if (std::abs(wrap_centered(monodromy.tw[i](r), kTwoPi)) > 1e-9 ||
            std::abs(monodromy.tw[i].deriv(r)) > 1e-9)
          throw std::runtime_error("monodromy is not the identity on a boundary collar");
      }
    }
  }

  M.primitive = page_primitive_U(monodromy, M.atlas);

  // The fiber period must equal 1 on all collars so that the calibrated
  // binding plateau h2 = 1/(2 pi) reproduces the same fiber circles.
  for (std::size_t i = 0; i < M.atlas.annuli.size(); ++i)
    for (int side : {-1, +1})
      for (double fr : {1.0, 0.5, 0.25}) {
        PagePoint w;
        w.chart = PagePoint::Chart::Annulus;
        w.index = static_cast<int>(i);
        w.a = side * (1.0 - cw * fr);
        w.b = 0.3;
        if (std::abs(M.fiber_period(w) - 1.0) > 1e-8)
          throw std::runtime_error("collar fiber period must equal 1");
      }

  const ProfilePair prof = calibrated_profiles(1.0 / kTwoPi);
  M.glue_lo = prof.glue_lo;
  M.glue_hi = 1.0;
  // The whole gluing shell must sit inside the twist plateau collar.
  for (int k = 0; k <= 32; ++k) {
    const double rho = M.glue_lo + (M.glue_hi - M.glue_lo) * k / 32.0;
    if (prof.h1(rho) < 1.0 - cw)
      throw std::runtime_error("gluing shell leaves the collar plateau");
  }

  for (const BoundaryCircle& c : M.atlas.boundaries()) {
    BindingChart B;
    B.label = c.label;
    B.circle = c;
    B.profile = prof;
    B.init(M.atlas.tubes);
    M.bindings.push_back(std::move(B));
  }
  return M;
}

MPoint canonicalize(const OpenBookManifold& M, const MPoint& pt) {
  MPoint q = pt;
  if (q.chart == MChart::Binding) {
    const BindingChart& B = M.bindings.at(q.index);
    q.a = wrap_period(q.a, B.length);
    if (q.b <= 0.0) {
      q.b = 0.0;
      q.c = 0.0;  // the meridian angle is degenerate on the core
      return q;
    }
    q.c = wrap_period(q.c, kTwoPi);
    if (q.b > M.glue_lo && q.b < M.glue_hi) return glue_binding_to_torus(M, q);
    return q;
  }
  if (q.chart == MChart::TorusAnnulus) q.b = wrap_period(q.b, kTwoPi);
  const double period = M.fiber_period(page_of(q));
  const double n = std::floor(q.c / period);
  if (n != 0.0) {
    q.c -= n * period;
    if (q.chart == MChart::TorusAnnulus)
      q.b = wrap_period(q.b + n * M.monodromy.tw.at(q.index)(q.a), kTwoPi);
    // Tube charts: the monodromy is the identity there.
  }
  if (q.c < 0.0 || q.c >= period) q.c = wrap_period(q.c, period);
  return q;
}

double contact_form_eval(const OpenBookManifold& M, const MPoint& pt,
                         const std::array<double, 3>& v) {
  switch (pt.chart) {
    case MChart::TorusAnnulus:
      (void)M.atlas.annuli.at(pt.index);
      return v[2] + pt.a * v[1];
    case MChart::TorusTube: {
      const TubeChart& T = M.atlas.tubes.at(pt.index);
      return v[2] + T.f(pt.a) * v[1] + T.beta(pt.a) * (pt.b - 0.5) * v[0];
    }
    case MChart::Binding: {
      const ProfilePair& P = M.bindings.at(pt.index).profile;
      return P.h1(pt.b) * v[0] + P.h2(pt.b) * v[2];
    }
  }
  throw std::logic_error("unknown chart");
}

double contact_volume(const OpenBookManifold& M, const MPoint& pt) {
  switch (pt.chart) {
    case MChart::TorusAnnulus:
      (void)M.atlas.annuli.at(pt.index);
      return 1.0;
    case MChart::TorusTube:
      return M.atlas.tubes.at(pt.index).area_density(pt.a);
    case MChart::Binding:
      return M.bindings.at(pt.index).profile.D(pt.b);
  }
  throw std::logic_error("unknown chart");
}

double theta(const OpenBookManifold& M, const MPoint& pt_in) {
  const MPoint pt = canonicalize(M, pt_in);
  if (pt.chart == MChart::Binding) {
    if (pt.b <= 0.0)
      throw std::domain_error("the fibration angle is undefined on a binding core");
    return wrap_period(pt.c / kTwoPi, 1.0);
  }
  return wrap_period(pt.c / M.fiber_period(page_of(pt)), 1.0);
}

MPoint glue_binding_to_torus(const OpenBookManifold& M, const MPoint& pt) {
  return glue_impl(M, pt, nullptr, nullptr);
}

MPoint glue_binding_to_torus(const OpenBookManifold& M, const MPoint& pt,
                             const std::array<double, 3>& v,
                             std::array<double, 3>* v_out) {
  return glue_impl(M, pt, &v, v_out);
}

MPoint torus_to_binding(const OpenBookManifold& M, const MPoint& pt_in) {
  if (pt_in.chart == MChart::Binding)
    throw std::invalid_argument("torus_to_binding expects mapping-torus coordinates");
  const MPoint pt = canonicalize(M, pt_in);
  const ProfilePair& P = M.bindings.front().profile;
  const ExitInfo ex = liouville_exit(M, page_of(pt), tau_of_rho(P, 1.0));
  if (!ex.hit) throw std::invalid_argument("point is outside the gluing annulus");
  const double reff = std::exp(-ex.tau);
  if (reff >= P.h1(M.glue_lo) || reff <= P.h1(1.0))
    throw std::invalid_argument("point is outside the gluing annulus");
  const double rho = invert_h1(P, reff);
  return binding_point(ex.binding, ex.theta, rho, kTwoPi * pt.c);
}

std::string InvariantClass::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Binding:
      os << "binding(" << label << ")";
      break;
    case Kind::BindingTorus:
      os << "binding_torus(" << label << ", rho=" << rho << ")";
      break;
    case Kind::Tube:
      os << "tube(" << label << ")";
      break;
    case Kind::Page:
      os << "page(" << label << ")";
      break;
  }
  return os.str();
}

bool InvariantClass::same_class(const InvariantClass& o) const {
  return kind == o.kind && label == o.label && tube == o.tube;
}

InvariantClass classify(const OpenBookManifold& M, const MPoint& pt_in) {
  const MPoint pt = canonicalize(M, pt_in);
  InvariantClass c;
  if (pt.chart == MChart::Binding) {
    const BindingChart& B = M.bindings.at(pt.index);
    if (pt.b <= 0.0) {
      c.kind = InvariantClass::Kind::Binding;
      c.label = B.label;
      return c;
    }
    if (B.merged) {
      c.kind = InvariantClass::Kind::BindingTorus;
      c.label = B.label;
      c.rho = pt.b;
      return c;
    }
    c.kind = InvariantClass::Kind::Page;
    c.label = M.atlas.annuli.at(B.circle.segs.front().annulus).label;
    return c;
  }

  const PagePoint w = page_of(pt);
  const ProfilePair& P = M.bindings.front().profile;
  const ExitInfo ex = liouville_exit(M, w, tau_of_rho(P, 1.0));
  if (ex.hit) {
    const BindingChart& B = M.bindings.at(ex.binding);
    const double rho = invert_h1(P, std::exp(-ex.tau));
    if (rho <= 1e-12) {
      c.kind = InvariantClass::Kind::Binding;
      c.label = B.label;
      return c;
    }
    if (B.merged) {
      c.kind = InvariantClass::Kind::BindingTorus;
      c.label = B.label;
      c.rho = rho;
      return c;
    }
    c.kind = InvariantClass::Kind::Page;
    c.label = M.atlas.annuli.at(B.circle.segs.front().annulus).label;
    return c;
  }

  if (pt.chart == MChart::TorusTube) {
    const TubeChart& T = M.atlas.tubes.at(pt.index);
    if (std::abs(pt.a) < TubeChart::kZone) {
      c.kind = InvariantClass::Kind::Tube;
      c.tube = pt.index;
      c.label = T.label;
      return c;
    }
    const int e = (pt.a <= -TubeChart::kZone) ? 0 : 1;
    c.kind = InvariantClass::Kind::Page;
    c.label = M.atlas.annuli.at(T.end[e].annulus).label;
    return c;
  }
  c.kind = InvariantClass::Kind::Page;
  c.label = M.atlas.annuli.at(pt.index).label;
  return c;
}

OpenBookManifold book_connected_sum(const OpenBookManifold& ob1, const std::string& b1,
                                    const OpenBookManifold& ob2, const std::string& b2,
                                    double halfwidth, double depth) {
  ob1.binding(b1);
  ob2.binding(b2);
  const PageAtlas atlas = boundary_connected_sum(ob1.atlas, b1, ob2.atlas, b2, halfwidth, depth);
  const MonodromyHamiltonian H = extend_monodromy(ob1.monodromy, ob2.monodromy, atlas);
  OpenBookManifold M = assemble_open_book(atlas, H);
  M.sums = ob1.sums;
  const int tube_shift = static_cast<int>(ob1.atlas.tubes.size());
  for (SumRecord s : ob2.sums) {
    s.tube += tube_shift;
    M.sums.push_back(std::move(s));
  }
  SumRecord rec;
  rec.b1 = b1;
  rec.b2 = b2;
  rec.tube = static_cast<int>(M.atlas.tubes.size()) - 1;
  rec.halfwidth = halfwidth;
  rec.depth = depth;
  const Window& W = M.atlas.tubes.back().end[0];
  rec.label = M.atlas.side_label.at({W.annulus, W.side});
  M.sums.push_back(std::move(rec));
  return M;
}

// ---------------------------------------------------------------------------

std::string open_book_to_json(const OpenBookManifold& M) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "open_book";
  j["collar_width"] = M.atlas.collar_width;

  json anns = json::array();
  for (std::size_t i = 0; i < M.atlas.annuli.size(); ++i) {
    const TwistProfile& tw = M.monodromy.tw.at(i);
    if (tw.kind() != TwistProfile::Kind::Plateau)
      throw std::runtime_error("only plateau twist recipes serialize");
    anns.push_back({{"label", M.atlas.annuli[i].label},
                    {"twist", {{"type", "plateau"}, {"collar_width", tw.collar_width()}}}});
  }
  j["annuli"] = anns;

  json sums = json::array();
  for (const SumRecord& s : M.sums)
    sums.push_back({{"b1", s.b1},
                    {"b2", s.b2},
                    {"label", s.label},
                    {"tube", s.tube},
                    {"halfwidth", s.halfwidth},
                    {"depth", s.depth}});
  j["sums"] = sums;

  j["binding_profile"] = {{"plateau_target", 1.0 / kTwoPi}, {"glue_lo", M.glue_lo}};

  json bnd = json::array();
  for (const BindingChart& B : M.bindings) {
    json h1s = json::array(), h2s = json::array();
    for (double rho : {0.25, 0.5, 0.75}) {
      h1s.push_back(B.profile.h1(rho));
      h2s.push_back(B.profile.h2(rho));
    }
    bnd.push_back({{"label", B.label},
                   {"length", B.length},
                   {"merged", B.merged},
                   {"h1", h1s},
                   {"h2", h2s}});
  }
  j["bindings"] = bnd;
  return j.dump(2);
}

OpenBookManifold open_book_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported open-book format version");

  std::vector<OpenBookManifold> parts;
  for (const auto& a : j.at("annuli")) {
    const auto& tw = a.at("twist");
    if (tw.at("type").get<std::string>() != "plateau")
      throw std::runtime_error("unsupported twist type in recipe");
    auto [atlas, H] = make_annulus_page(
        TwistProfile::plateau(tw.at("collar_width").get<double>()),
        a.at("label").get<std::string>());
    parts.push_back(assemble_open_book(atlas, H));
  }

  for (const auto& s : j.at("sums")) {
    const std::string b1 = s.at("b1").get<std::string>();
    const std::string b2 = s.at("b2").get<std::string>();
    int i1 = -1, i2 = -1;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].binding_index(b1) >= 0) i1 = static_cast<int>(i);
      if (parts[i].binding_index(b2) >= 0) i2 = static_cast<int>(i);
    }
    if (i1 < 0 || i2 < 0) throw std::runtime_error("sum recipe names an unknown binding");
    if (i1 == i2) throw std::runtime_error("sum recipe must join two distinct components");
    OpenBookManifold merged =
        book_connected_sum(parts[i1], b1, parts[i2], b2, s.at("halfwidth").get<double>(),
                           s.at("depth").get<double>());
    parts.erase(parts.begin() + std::max(i1, i2));
    parts.erase(parts.begin() + std::min(i1, i2));
    parts.push_back(std::move(merged));
  }
  if (parts.size() != 1) throw std::runtime_error("sum recipe leaves the page disconnected");
  OpenBookManifold M = std::move(parts.front());

  if (std::abs(M.atlas.collar_width - j.at("collar_width").get<double>()) > 1e-12)
    throw std::runtime_error("recipe collar width mismatch");
  for (const auto& bj : j.at("bindings")) {
    const std::string label = bj.at("label").get<std::string>();
    const int bi = M.binding_index(label);
    if (bi < 0) throw std::runtime_error("rebuilt book is missing binding '" + label + "'");
    const BindingChart& B = M.bindings[bi];
    if (std::abs(B.length - bj.at("length").get<double>()) > 1e-9 ||
        B.merged != bj.at("merged").get<bool>())
      throw std::runtime_error("rebuilt book disagrees with its validation samples");
    const auto& h1s = bj.at("h1");
    const auto& h2s = bj.at("h2");
    const double rhos[] = {0.25, 0.5, 0.75};
    for (int k = 0; k < 3; ++k)
      if (std::abs(B.profile.h1(rhos[k]) - h1s.at(k).get<double>()) > 1e-12 ||
          std::abs(B.profile.h2(rhos[k]) - h2s.at(k).get<double>()) > 1e-12)
        throw std::runtime_error("rebuilt book disagrees with its validation samples");
  }
  return M;
}

}  // namespace reebbook
