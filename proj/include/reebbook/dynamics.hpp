#pragma once
// Reeb dynamics on an assembled open book.
//
// The contact form is alpha = d(fiber) + lambda on the mapping-torus charts
// and alpha = h1(rho) dtheta + h2(rho) dphi on the binding charts, so the
// Reeb field is explicit in every chart:
//
//   mapping torus:  R = d_fiber                       (lambda is fiber-free)
//   binding chart:  R = [h2' d_theta - h1' d_phi] / (h1 h2' - h2 h1')
//                   R = d_theta exactly on the core rho = 0
//
// Chart coordinates of the flow are LINEAR in time: the fiber coordinate
// advances at unit speed in the mapping torus (crossing the suspension glue
// applies the monodromy), and each binding torus rho = const carries a rigid
// rotation.  All flow operations here are therefore exact up to rounding --
// there is no ODE stepping anywhere in this module.
//
// The system is integrable.  The first integral of the pair is the
// symplectization coordinate, identically zero on the manifold itself and
// conserved structurally (the flow never leaves the unit slice); it has no
// runtime representation.  The second is implemented by integral_H2: the
// reduced Hamiltonian H(w) of the monodromy on the mapping torus, continued
// by h2(rho) + H_b - h2(1^-) onto the binding chart at a binding whose collar
// value is H_b.  The two expressions agree exactly on the gluing overlap
// because h2 has plateaued there.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "reebbook/openbook.hpp"

namespace reebbook {

// Reeb vector at pt, as components in pt's own chart coordinates.
std::array<double, 3> reeb_field(const OpenBookManifold& M, const MPoint& pt);

// d(alpha)(u, v) at pt, from the closed-form chart expressions.
double dalpha_eval(const OpenBookManifold& M, const MPoint& pt,
                   const std::array<double, 3>& u, const std::array<double, 3>& v);

// Time-t Reeb flow (t of either sign).  Exact; returns a canonical point.
MPoint reeb_flow(const OpenBookManifold& M, const MPoint& pt, double t);

// samples+1 points along [0, duration] of the flow through pt.
std::vector<MPoint> reeb_trajectory(const OpenBookManifold& M, const MPoint& pt,
                                    double duration, int samples);

// First return to the theta = 0 page: exactly (psi(w), -U(w)).  The input
// must be an open-page point (annulus charts require |r| < 1); binding-limit
// points are rejected with std::domain_error.
std::pair<PagePoint, double> return_map(const OpenBookManifold& M, const PagePoint& w);

// Rotation number of the invariant torus at radius rho in binding b's chart:
// winds around the binding per page return (per meridian turn), i.e.
// (2 pi / L_b) * (-h2'(rho) / h1'(rho)).  For the calibrated profiles it is
// constant on the pure-power zone, decreases monotonically across the
// transition annulus, and vanishes identically on the plateau.  rho in (0,1).
double rotation_number(const OpenBookManifold& M, int b, double rho);

// One periodic orbit, or a representative of a family of equal-period orbits.
struct OrbitRecord {
  std::string name;     // stable id, e.g. "core:u1#u2", "torus:l1:1/2"
  InvariantClass cls;   // invariant class of every point on the orbit
  MPoint base;          // canonical base point
  double period = 0.0;  // > 0; reeb_flow(base, period) returns to base
  int p = 0;            // winds around the binding (theta turns / phi winds)
  int q = 0;            // page returns (meridian turns / fiber periods)
  // "core": the binding circle itself.  "torus": the rational torus at an
  // isolated radius (1-parameter family of parallel orbits).  "band": a
  // radius interval on which every torus has the same rational rotation
  // number (2-parameter family).  "region": representative of the period-1
  // region that fills the plateau collars, the tubes, and the binding
  // shells (2-parameter family).
  std::string family;
  std::vector<MPoint> polyline;  // uniform-time samples, one period, no repeat
};

struct OrbitSpec {
  int max_q = 8;              // torus-orbit denominator bound (binding charts)
  int max_k = 6;              // page-return bound for interior annulus circles
  int polyline_samples = 256; // samples per orbit polyline
};

// Deterministic inventory: binding cores, rational-rotation binding tori
// (band families and isolated radii), period-1 region representatives
// (binding shells, plateau collars, tube saddles), and interior annulus
// circles where the twist is rational.  Complete up to the spec bounds:
// every periodic orbit lies on a binding core, a rational binding torus, or
// a mapping-torus circle with rational twist.
std::vector<OrbitRecord> periodic_orbits(const OpenBookManifold& M,
                                         const OrbitSpec& spec = {});

// n uniform-time samples along one period of rec (no repeated endpoint).
std::vector<MPoint> sample_orbit(const OpenBookManifold& M, const OrbitRecord& rec,
                                 int n);

// The conserved integral H2 (see header comment).
double integral_H2(const OpenBookManifold& M, const MPoint& pt);

// Max |H2(flow(seed, s)) - H2(seed)| over all seeds and `checks` times
// s in (0, duration].
double conservation_check(const OpenBookManifold& M, const std::vector<MPoint>& seeds,
                          double duration, int checks);

struct InvarianceReport {
  bool ok = true;
  std::string what;      // description of the first violation
  MPoint counterexample; // the offending sample (when !ok)
};

// classify(flow(x, t)) must match classify(x) for random samples x in all
// chart families and a grid of times t in (0, duration]; BindingTorus tags
// must also preserve rho to 1e-6.
InvarianceReport invariance_check(const OpenBookManifold& M, int samples,
                                  double duration, std::uint64_t seed);

struct ContactResiduals {
  double alpha = 0.0;   // max |alpha(R) - 1|
  double dalpha = 0.0;  // max |d(alpha)(R, e_i)| over coordinate frames
};

// Defining identities of the Reeb field, sampled across all chart families.
ContactResiduals contact_identity_check(const OpenBookManifold& M, int samples,
                                        std::uint64_t seed);

}  // namespace reebbook
