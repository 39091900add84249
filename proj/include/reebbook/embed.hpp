// Round-model embedding of the single-annulus open book and the Gauss
// linking-integral oracle.
//
// The single-annulus book with one positive boundary twist is a 3-sphere whose
// binding is the positive Hopf link.  We realize it inside the unit sphere of
// C^2 explicitly:
//
//   * the binding circle on the +1 side maps to {z2 = 0}, the -1 side to
//     {z1 = 0};
//   * the invariant torus at page radius r maps to the flat torus
//     |z1|^2 = (1+r)/2;
//   * pages map to fibers of arg(z1 z2): with fibration angle T in [0,1),
//     a mapping-torus point (r, phi, c) maps to
//        z1 = sqrt(u) exp(i(phi + tw(r) T)),
//        z2 = sqrt(1-u) exp(i(-phi + (2pi - tw(r)) T)),   u = (1+r)/2,
//     which is continuous across the suspension seam and sends the page
//     angular circle to a (1,-1) torus curve — the page framing of a binding
//     component is -1, as forced by the meridian classes.
//
// Binding-chart points use the same formulas through the gluing radius
// h1(rho), so the two chart formulas agree exactly on the overlap.  Under
// this identification an orbit with phase windings (w1, w2) has linking
// number w2 with the +1 binding and w1 with the -1 binding, and the two
// binding circles link +1.
//
// Curves are compared in R^3 after stereographic projection from a pole
// chosen away from both curves, with the projection frame oriented so that
// linking numbers are preserved.  gauss_linking evaluates the classical
// double integral exactly per segment pair (signed solid angles), so the
// only error is the polyline approximation of the smooth curve.
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "reebbook/dynamics.hpp"

namespace reebbook {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Polyline3 = std::vector<Vec3>;  // closed: segment i runs v[i] -> v[(i+1)%n]
using Polyline4 = std::vector<Vec4>;

// Unit-sphere image of one manifold point. Only single-annulus books embed;
// throws std::invalid_argument for summed or multi-annulus manifolds.
Vec4 embed_point(const OpenBookManifold& M, const MPoint& pt);

// A closed orbit as n points on the unit 3-sphere (samples at equal times).
Polyline4 embed_orbit(const OpenBookManifold& M, const OrbitRecord& rec, int n);

// Stereographic projection from a unit pole. The projection frame is chosen
// so the map preserves orientation (hence linking numbers). Throws
// std::domain_error when a vertex lies within 1e-6 of the pole.
Polyline3 stereographic(const Polyline4& curve, const Vec4& pole);

// Deterministic pole choice: the first of a fixed candidate list at distance
// > 0.05 from every vertex of both curves.
Vec4 choose_pole(const Polyline4& a, const Polyline4& b);

// Orbit to 3-space through the model above. The overload with a partner
// record picks one pole clear of both curves, as required for linking.
Polyline3 milnor_embed(const OpenBookManifold& M, const OrbitRecord& rec, int n);
std::pair<Polyline3, Polyline3> milnor_embed_pair(const OpenBookManifold& M,
                                                  const OrbitRecord& a,
                                                  const OrbitRecord& b, int n);

// Gauss linking integral of two disjoint closed polylines, exact per segment
// pair. Throws std::domain_error when the curves come within 1e-4.
double gauss_linking(const Polyline3& c1, const Polyline3& c2);

// Re-embeds both orbits with doubled sample counts until two successive
// Gauss values differ by less than 1e-3; returns the final value. Throws
// std::runtime_error if 2^16 samples do not stabilize it.
double gauss_linking_refined(const OpenBookManifold& M, const OrbitRecord& a,
                             const OrbitRecord& b, int n0 = 256);

}  // namespace reebbook
