#include "reebbook/embed.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace reebbook {
namespace {

Vec4 circle_pair(double amp1, double phase1, double amp2, double phase2) {
  return {amp1 * std::cos(phase1), amp1 * std::sin(phase1),
          amp2 * std::cos(phase2), amp2 * std::sin(phase2)};
}

void require_single(const OpenBookManifold& M) {
  if (M.atlas.annuli.size() != 1 || !M.atlas.tubes.empty() || !M.sums.empty())
    throw std::invalid_argument("embed: only the single-annulus book has the round model");
}

double dot4(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double det4(const Vec4& a, const Vec4& b, const Vec4& c, const Vec4& d) {
  double m[4][4] = {{a[0], a[1], a[2], a[3]},
                    {b[0], b[1], b[2], b[3]},
                    {c[0], c[1], c[2], c[3]},
                    {d[0], d[1], d[2], d[3]}};
  double det = 0.0;
  for (int j = 0; j < 4; ++j) {
    double sub[3][3];
    for (int r = 1; r < 4; ++r) {
      int cc = 0;
      for (int col = 0; col < 4; ++col) {
        if (col == j) continue;
        sub[r - 1][cc++] = m[r][col];
      }
    }
    const double minor = sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1]) -
                         sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0]) +
                         sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0]);
    det += ((j % 2 == 0) ? 1.0 : -1.0) * m[0][j] * minor;
  }
  return det;
}

Vec3 sub3(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }
Vec3 unit3(const Vec3& a) {
  const double n = norm3(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

// Signed solid angle of a spherical triangle with unit-vector corners.
double solid_angle(const Vec3& v1, const Vec3& v2, const Vec3& v3) {
  const double num = dot3(v1, cross3(v2, v3));
  const double den = 1.0 + dot3(v1, v2) + dot3(v2, v3) + dot3(v3, v1);
  return 2.0 * std::atan2(num, den);
}

// Minimum distance between two closed segments.
double segment_distance(const Vec3& p1, const Vec3& p2, const Vec3& q1, const Vec3& q2) {
  const Vec3 d1 = sub3(p2, p1), d2 = sub3(q2, q1), r = sub3(p1, q1);
  const double a = dot3(d1, d1), e = dot3(d2, d2), f = dot3(d2, r);
  double s = 0.0, t = 0.0;
  const double tiny = 1e-30;
  if (a <= tiny && e <= tiny) {
    // both degenerate
  } else if (a <= tiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot3(d1, r);
    if (e <= tiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot3(d1, d2), denom = a * e - b * b;
      if (denom > tiny) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  const Vec3 cp = {p1[0] + s * d1[0], p1[1] + s * d1[1], p1[2] + s * d1[2]};
  const Vec3 cq = {q1[0] + t * d2[0], q1[1] + t * d2[1], q1[2] + t * d2[2]};
  return norm3(sub3(cp, cq));
}

constexpr double kGaussCutoff = 1e-4;

}  // namespace

Vec4 embed_point(const OpenBookManifold& M, const MPoint& raw) {
  require_single(M);
  const MPoint pt = canonicalize(M, raw);
  if (pt.chart == MChart::Binding) {
    const BindingChart& B = M.bindings[pt.index];
    const int side = B.circle.segs.front().side;
    const double longit = kTwoPi * pt.a / B.length;
    if (pt.b <= 0.0) {  // core: one of the two coordinate circles
      return side > 0 ? circle_pair(1.0, longit, 0.0, 0.0)
                      : circle_pair(0.0, 0.0, 1.0, longit);
    }
    const double w = 0.5 * (1.0 + B.profile.h1(pt.b));
    const double big = std::sqrt(w), small = std::sqrt(1.0 - w);
    const double meridional = pt.c - longit;
    return side > 0 ? circle_pair(big, longit, small, meridional)
                    : circle_pair(small, meridional, big, longit);
  }
  // Mapping-torus chart (the single book has no tubes).
  const double r = pt.a, phi = pt.b;
  const double u = 0.5 * (1.0 + r);
  const double theta_page = theta(M, pt);
  const double tw = M.monodromy.tw[pt.index](r);
  return circle_pair(std::sqrt(u), phi + tw * theta_page, std::sqrt(1.0 - u),
                     -phi + (kTwoPi - tw) * theta_page);
}

Polyline4 embed_orbit(const OpenBookManifold& M, const OrbitRecord& rec, int n) {
  if (n < 3) throw std::invalid_argument("embed_orbit: need at least 3 samples");
  Polyline4 out;
  out.reserve(n);
  for (int j = 0; j < n; ++j)
    out.push_back(embed_point(M, reeb_flow(M, rec.base, rec.period * j / n)));
  return out;
}

Polyline3 stereographic(const Polyline4& curve, const Vec4& pole) {
  // Orthonormal frame of the pole's complement. At the antipode the sphere's
  // outward normal is -pole, so the projection preserves orientation (hence
  // linking numbers) exactly when (pole, f0, f1, f2) is NEGATIVELY oriented.
  int drop = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(pole[i]) > std::abs(pole[drop])) drop = i;
  Vec4 frame[3];
  int nf = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == drop) continue;
    Vec4 v{0, 0, 0, 0};
    v[i] = 1.0;
    const double vp = dot4(v, pole);
    for (int k = 0; k < 4; ++k) v[k] -= vp * pole[k];
    for (int k = 0; k < nf; ++k) {
      const double c = dot4(v, frame[k]);
      for (int m = 0; m < 4; ++m) v[m] -= c * frame[k][m];
    }
    const double nv = std::sqrt(dot4(v, v));
    for (int k = 0; k < 4; ++k) v[k] /= nv;
    frame[nf++] = v;
  }
  if (det4(pole, frame[0], frame[1], frame[2]) > 0.0) std::swap(frame[1], frame[2]);

  Polyline3 out;
  out.reserve(curve.size());
  for (const Vec4& x : curve) {
    const double denom = 1.0 - dot4(x, pole);
    if (denom < 1e-6)
      throw std::domain_error("stereographic: curve passes through the pole");
    out.push_back(
        {dot4(x, frame[0]) / denom, dot4(x, frame[1]) / denom, dot4(x, frame[2]) / denom});
  }
  return out;
}

Vec4 choose_pole(const Polyline4& a, const Polyline4& b) {
  static const double raw[][4] = {
      {0.31, 0.47, 0.62, 0.55},   {-0.52, 0.33, 0.41, 0.67}, {0.61, -0.29, 0.44, -0.59},
      {0.17, 0.83, -0.37, 0.39},  {-0.43, -0.51, 0.57, 0.48}, {0.73, 0.21, -0.33, 0.56},
      {-0.26, 0.62, -0.52, -0.52}, {0.48, -0.44, -0.61, 0.45}};
  for (const auto& c : raw) {
    Vec4 p{c[0], c[1], c[2], c[3]};
    const double n = std::sqrt(dot4(p, p));
    for (double& x : p) x /= n;
    double dmin = std::numeric_limits<double>::infinity();
    for (const Vec4& v : a) dmin = std::min(dmin, std::sqrt(dot4({v[0] - p[0], v[1] - p[1], v[2] - p[2], v[3] - p[3]}, {v[0] - p[0], v[1] - p[1], v[2] - p[2], v[3] - p[3]})));
    for (const Vec4& v : b) dmin = std::min(dmin, std::sqrt(dot4({v[0] - p[0], v[1] - p[1], v[2] - p[2], v[3] - p[3]}, {v[0] - p[0], v[1] - p[1], v[2] - p[2], v[3] - p[3]})));
    if (dmin > 0.05) return p;
  }
  throw std::runtime_error("choose_pole: no candidate pole clears both curves");
}

Polyline3 milnor_embed(const OpenBookManifold& M, const OrbitRecord& rec, int n) {
  const Polyline4 c = embed_orbit(M, rec, n);
  return stereographic(c, choose_pole(c, c));
}

std::pair<Polyline3, Polyline3> milnor_embed_pair(const OpenBookManifold& M,
                                                  const OrbitRecord& a,
                                                  const OrbitRecord& b, int n) {
  const Polyline4 ca = embed_orbit(M, a, n), cb = embed_orbit(M, b, n);
  const Vec4 pole = choose_pole(ca, cb);
  return {stereographic(ca, pole), stereographic(cb, pole)};
}

double gauss_linking(const Polyline3& c1, const Polyline3& c2) {
  if (c1.size() < 3 || c2.size() < 3)
    throw std::invalid_argument("gauss_linking: closed polylines need >= 3 vertices");
  const std::size_t n1 = c1.size(), n2 = c2.size();
  double omega_sum = 0.0;
  for (std::size_t i = 0; i < n1; ++i) {
    const Vec3& p1 = c1[i];
    const Vec3& p2 = c1[(i + 1) % n1];
    const bool p_degenerate = norm3(sub3(p2, p1)) < 1e-15;
    for (std::size_t j = 0; j < n2; ++j) {
      const Vec3& q1 = c2[j];
      const Vec3& q2 = c2[(j + 1) % n2];
      if (segment_distance(p1, p2, q1, q2) < kGaussCutoff)
        throw std::domain_error("gauss_linking: curves closer than the 1e-4 cutoff");
      if (p_degenerate || norm3(sub3(q2, q1)) < 1e-15) continue;
      // Gauss-map image of the segment pair: spherical quadrilateral with
      // corners e(s,t) = unit(p(s) - q(t)) at the parameter corners. Its
      // signed area, traversed (0,0)->(0,1)->(1,1)->(1,0), integrates the
      // linking form exactly.
      const Vec3 a = unit3(sub3(p1, q1));
      const Vec3 b = unit3(sub3(p1, q2));
      const Vec3 c = unit3(sub3(p2, q2));
      const Vec3 d = unit3(sub3(p2, q1));
      omega_sum += solid_angle(a, b, c) + solid_angle(a, c, d);
    }
  }
  return omega_sum / (4.0 * kPi);
}

double gauss_linking_refined(const OpenBookManifold& M, const OrbitRecord& a,
                             const OrbitRecord& b, int n0) {
  int n = std::max(n0, 16);
  auto value_at = [&](int samples) {
    const auto [pa, pb] = milnor_embed_pair(M, a, b, samples);
    return gauss_linking(pa, pb);
  };
  double prev = value_at(n);
  while (n <= 8192) {
    n *= 2;
    const double next = value_at(n);
    if (std::abs(next - prev) < 1e-3) return next;
    prev = next;
  }
  throw std::runtime_error("gauss_linking_refined: no convergence by 2^14 samples");
}

}  // namespace reebbook
