#pragma once
// The closed contact 3-manifold assembled from a page and its monodromy.
//
// Two chart families cover the manifold:
//
//  * Mapping-torus charts over the page: a page chart point w (annulus or
//    tube chart) together with a fiber time in [0, -U(w)), where U < 0 is the
//    radial primitive with psi^* lambda = lambda - dU.  The suspension glues
//    (w, -U(w)) to (psi(w), 0).  Contact form: alpha = d(fiber) + lambda.
//
//  * Binding charts: one solid torus around each boundary circle of the page,
//    with coordinates (theta, rho, phi_B) where theta is the lambda-arc-length
//    coordinate along the circle (theta in [0, L), L the circle's
//    lambda-length), rho in [0, 1) is the tube radius, and phi_B in [0, 2 pi)
//    is the meridian angle, degenerate at the core rho = 0.  Contact form:
//    alpha = h1(rho) dtheta + h2(rho) dphi_B with the calibrated profile pair
//    (h1(0) = 1, h1 strictly decreasing, h2 plateau equal to 1/(2 pi)).
//
// Gluing.  The page's Liouville field Y identifies the shell rho in
// (glue_lo, 1) of each binding chart with a collar of the mapping torus: the
// binding point (theta, rho, phi_B) sits at Liouville depth
// tau(rho) = -log h1(rho) inward from the boundary-circle point at arc-length
// theta, with fiber time phi_B / (2 pi) (all collars have fiber period 1, and
// h2 is on its plateau there).  Because iota_Y lambda = 0, pulling the contact
// form back through this map gives exactly h1 dtheta + h2 dphi_B, so the chart
// families carry one global form; the fiber-time fraction descends to a global
// fibration angle theta in R/Z away from the binding cores.
//
// Orientation conventions: binding cores are oriented by the induced boundary
// orientation of the page (the lambda-positive direction of theta), and all
// three chart types are positively oriented for alpha ^ dalpha.

#include <array>
#include <string>
#include <vector>

#include "reebbook/monodromy.hpp"
#include "reebbook/page.hpp"
#include "reebbook/profiles.hpp"
#include "reebbook/smooth.hpp"
#include "reebbook/twist.hpp"

namespace reebbook {

enum class MChart { TorusAnnulus, TorusTube, Binding };

// A manifold point in one of the three chart families.
struct MPoint {
  MChart chart = MChart::TorusAnnulus;
  int index = 0;  // annulus, tube, or binding index
  double a = 0.0, b = 0.0, c = 0.0;
  // TorusAnnulus: a = r in [-1, 1],  b = phi (mod 2 pi),  c = fiber time
  // TorusTube:    a = s in [-1, 1],  b = t in [0, 1],     c = fiber time
  // Binding:      a = theta (mod L), b = rho in [0, 1),   c = phi_B (mod 2 pi)
};

MPoint torus_annulus_point(int annulus, double r, double phi, double fiber);
MPoint torus_tube_point(int tube, double s, double t, double fiber);
MPoint binding_point(int binding, double theta, double rho, double phi_B);

// Page chart point under a mapping-torus point (throws on binding charts).
PagePoint page_of(const MPoint& pt);

// A position on a boundary circle, resolved from its arc-length coordinate.
struct CirclePoint {
  bool on_arc = true;
  int annulus = 0;  // arc data
  int side = +1;
  double phi = 0.0;
  int tube = -1;  // tube-edge data
  int t_edge = 0;
  double s = 0.0;
};

// One binding chart: a boundary circle with its arc-length parametrization and
// its radial profile pair.
class BindingChart {
 public:
  std::string label;
  BoundaryCircle circle;
  ProfilePair profile;
  bool merged = false;
  double length = 0.0;  // L: total lambda-length of the circle

  // Precompute the cumulative arc-length tables (needs the tube charts).
  void init(const std::vector<TubeChart>& tubes);

  // The circle point at arc-length theta (any real, wrapped mod length).
  CirclePoint at(double theta, const std::vector<TubeChart>& tubes) const;

  // Inverse maps; both throw std::invalid_argument when the location does not
  // lie on this circle.
  double arc_theta(int annulus, int side, double phi) const;
  double edge_theta(int tube, int t_edge, double s,
                    const std::vector<TubeChart>& tubes) const;

 private:
  std::vector<double> offset_;                // arc-length at each seg start
  std::vector<CumulativeIntegral> edge_cum_;  // per edge seg: int |beta|/2 ds
};

// A recorded boundary-connected sum: bindings b1 and b2 merged into one circle
// through the given tube.
struct SumRecord {
  std::string b1, b2;
  std::string label;  // merged circle label
  int tube = 0;
  double halfwidth = kPi / 6.0;
  double depth = 0.2;
};

struct OpenBookManifold {
  PageAtlas atlas;
  MonodromyHamiltonian monodromy;
  PagePrimitiveU primitive;
  std::vector<BindingChart> bindings;  // parallel to atlas.boundaries()
  std::vector<SumRecord> sums;         // construction history, in order
  double glue_lo = 0.5, glue_hi = 1.0;

  int binding_index(const std::string& label) const;             // -1 if absent
  const BindingChart& binding(const std::string& label) const;   // throws
  // Fiber period -U(w) > 0 of the mapping torus over page point w.
  double fiber_period(const PagePoint& w) const;
};

// Assemble the closed manifold of (page, monodromy).  Checks that the
// monodromy is the identity on every boundary collar, that the fiber period
// equals 1 on all collars and tubes (so the binding plateau 1/(2 pi) matches),
// and that the gluing shell stays inside the monodromy's collar plateau.
OpenBookManifold assemble_open_book(const PageAtlas& atlas,
                                    const MonodromyHamiltonian& monodromy);

// Canonical representative of a point: fiber time wrapped into
// [0, fiber period) by deck transformations, angles wrapped into their
// fundamental ranges, and overlap-shell binding points (rho > glue_lo)
// rewritten in mapping-torus coordinates.  Idempotent.
MPoint canonicalize(const OpenBookManifold& M, const MPoint& pt);

// alpha(v) for a tangent vector v in the coordinate basis of pt's chart.
double contact_form_eval(const OpenBookManifold& M, const MPoint& pt,
                         const std::array<double, 3>& v);

// Coefficient of alpha ^ dalpha against the coordinate volume of pt's chart.
// Positive everywhere (it degenerates linearly in rho at the binding cores).
double contact_volume(const OpenBookManifold& M, const MPoint& pt);

// Fibration angle in [0, 1): the fiber-time fraction on mapping-torus charts,
// phi_B / (2 pi) on binding charts.  Throws std::domain_error on the cores.
double theta(const OpenBookManifold& M, const MPoint& pt);

// Chart transition from a binding point with rho in (glue_lo, 1) to
// mapping-torus coordinates; optionally pushes a tangent vector forward.
// Throws std::invalid_argument when rho is outside the open overlap.
MPoint glue_binding_to_torus(const OpenBookManifold& M, const MPoint& pt);
MPoint glue_binding_to_torus(const OpenBookManifold& M, const MPoint& pt,
                             const std::array<double, 3>& v,
                             std::array<double, 3>* v_out);

// Inverse transition on the overlap: a mapping-torus point at Liouville depth
// tau(glue_lo) > tau > tau(1) from its nearest boundary circle.  Throws
// std::invalid_argument when the point is not in the gluing shell.
MPoint torus_to_binding(const OpenBookManifold& M, const MPoint& pt);

// Label of the invariant building block containing a point.
struct InvariantClass {
  enum class Kind { Binding, BindingTorus, Tube, Page };
  Kind kind = Kind::Page;
  std::string label;  // binding label (Binding/BindingTorus), annulus label (Page)
  int tube = -1;      // Tube only
  double rho = 0.0;   // BindingTorus only: radius of the invariant torus
  std::string name() const;
  bool same_class(const InvariantClass& o) const;  // ignores rho
};
InvariantClass classify(const OpenBookManifold& M, const MPoint& pt);

// Boundary-connected sum of two assembled books along the named bindings.
OpenBookManifold book_connected_sum(const OpenBookManifold& ob1, const std::string& b1,
                                    const OpenBookManifold& ob2, const std::string& b2,
                                    double halfwidth = kPi / 6.0, double depth = 0.2);

// Serialization: a versioned construction recipe (per-annulus plateau twists
// and the ordered sum list) plus validation samples; loading rebuilds the
// manifold deterministically and checks the samples.  Only plateau twists
// serialize.
std::string open_book_to_json(const OpenBookManifold& M);
OpenBookManifold open_book_from_json(const std::string& text);

}  // namespace reebbook
