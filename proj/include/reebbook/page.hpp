#pragma once
// Pages: Liouville surfaces with boundary assembled from annulus charts and
// handle (tube) charts, together with twist monodromies generated by
// autonomous Hamiltonians and the boundary-connected sum.
//
// Chart conventions
//   * AnnulusChart: (r, phi) in [-1, 1] x R/2piZ, Liouville form lambda = r dphi,
//     area form dr^dphi, Liouville field Y = r d_r (outward at both circles).
//   * TubeChart: (s, t) in [-1, 1] x [0, 1].  End zones s in [-1, -1/3] and
//     [1/3, 1] embed into the r-collar strips of the two attachment windows:
//         end 0:  r = eps0 (1 + (3d/2)(s + 1/3)),  phi = phi0* + eps0 w0 (t - 1/2)
//         end 1:  r = eps1 (1 + (3d/2)(1/3 - s)),  phi = phi1* - eps1 w1 (t - 1/2)
//     (d = overlap depth, w_e = full angular width of window e, eps_e = side).
//     Both maps send ds^dt to (3d/2) w_e dr^dphi > 0.  The tube Liouville form
//         lambda_T = f(s) dt + beta(s)(t - 1/2) ds
//     agrees with r dphi exactly on the end zones (f extends the pullbacks,
//     beta vanishes there) and has d(lambda_T) = (f' - beta) ds^dt with
//     f' - beta > 0 everywhere.  Its Liouville field has exactly one interior
//     zero (a saddle, index -1), so chi(page) = -#tubes.
//   * Boundary circles: on r = +1 the induced orientation is +phi, on r = -1
//     it is -phi; the free tube edges are traversed with +s on t = 0 and -s on
//     t = 1.  A window's corners mesh with these directions so that merged
//     circles close up combinatorially.
//
// Monodromies: the return map on an annulus is (r, phi) -> (r, phi + tw(r)).
// It is the time-1 flow (convention iota_{X_H}(dr^dphi) = -dH, X_H = H'(r) d_phi)
// of the raw Hamiltonian H(r) = c0 + int tw, and also of the reduced
// Hamiltonian with derivative tw - 2pi g (g a step localized at r < 0), which
// is locally constant on every boundary collar and is the representative used
// when extending over sums.

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "reebbook/monodromy.hpp"
#include "reebbook/smooth.hpp"
#include "reebbook/twist.hpp"

namespace reebbook {

struct PagePoint {
  enum class Chart { Annulus, Tube };
  Chart chart = Chart::Annulus;
  int index = 0;   // annulus or tube index in the atlas
  double a = 0.0;  // r (annulus) or s (tube)
  double b = 0.0;  // phi (annulus) or t (tube)
};

struct Window {
  int annulus = 0;
  int side = +1;            // +1: r = +1 circle, -1: r = -1 circle
  double center = 0.0;      // phi*
  double halfwidth = kPi / 6.0;
};

class TubeChart {
 public:
  std::string label;
  std::array<Window, 2> end;
  double depth = 0.2;

  void init();  // precompute the saddle and edge length after ends are set

  double width(int e) const { return 2.0 * end[e].halfwidth; }
  // End-zone image in the attachment annulus (formulas above, extended
  // analytically to all s so they can be blended).
  double end_r(int e, double s) const;
  double end_phi(int e, double t) const;
  // Inverse of the end-zone map: (r, phi) -> (s, t).
  std::array<double, 2> end_st(int e, double r, double phi) const;
  // s-interval of end zone e inside the tube.
  static constexpr double kZone = 1.0 / 3.0;
  static bool in_zone(int e, double s) { return e == 0 ? s <= -kZone : s >= kZone; }

  // Liouville data lambda_T = f(s) dt + beta(s)(t - 1/2) ds.
  double f_ext(int e, double s) const;  // pullback of r dphi through end e
  double f(double s) const;
  double df(double s) const;
  double beta(double s) const;          // <= 0, supported in the open middle
  double area_density(double s) const;  // f' - beta, must stay > 0
  std::array<double, 2> liouville(double s, double t) const;  // (Y_s, Y_t)
  double saddle_s() const { return saddle_s_; }
  double edge_lambda_length() const { return edge_len_; }  // per free t-edge

  // Smoothly blended radial profile: equals the end-zone r on both zones.
  double r_blend(double s) const;

 private:
  double blendS(double s) const { return step01((s + kZone) / (2.0 * kZone)); }
  double saddle_s_ = 0.0;
  double edge_len_ = 0.0;
};

struct AnnulusChart {
  std::string label;  // "1", "2", ... (boundary labels become u<label>/l<label>)
};

struct BoundarySeg {
  bool is_arc = true;
  // Arc: on (annulus, side), traversed from phi_begin by `side * length` in phi.
  int annulus = 0;
  int side = +1;
  double phi_begin = 0.0;
  double length = 0.0;  // traversal length in phi (equals lambda-length on arcs)
  // Tube edge: t_edge 0 is traversed with +s, t_edge 1 with -s.
  int tube = -1;
  int t_edge = 0;
  double lambda_length = 0.0;
};

struct BoundaryCircle {
  std::string label;
  std::vector<BoundarySeg> segs;
  double lambda_length = 0.0;
  bool merged() const { return segs.size() > 1; }
};

struct PageRegion {
  enum class Kind { Interior, Tube, Collar };
  Kind kind = Kind::Interior;
  int index = 0;        // annulus (Interior) or tube (Tube)
  std::string collar;   // boundary label when kind == Collar
};

class PageAtlas {
 public:
  std::vector<AnnulusChart> annuli;
  std::vector<TubeChart> tubes;
  double collar_width = TwistProfile::kDefaultCollarWidth;

  // Current boundary-circle label of each (annulus, side); maintained by the
  // constructors and by boundary_connected_sum.
  std::map<std::pair<int, int>, std::string> side_label;

  const std::vector<BoundaryCircle>& boundaries() const { return boundaries_; }
  const BoundaryCircle& boundary(const std::string& label) const;
  int euler() const { return -static_cast<int>(tubes.size()); }
  std::vector<std::pair<int, int>> windows_on(int annulus, int side) const;  // (tube, end), sorted by center
  void rebuild_boundaries();
  void validate() const;

 private:
  std::vector<BoundaryCircle> boundaries_;
};

PageRegion classify_page_point(const PageAtlas& atlas, const PagePoint& x);
// Tube points with t in the outer quarters (or in the end zones) count as
// collar points of the merged circle.
inline constexpr double kTubeCollarT = 0.25;

class MonodromyHamiltonian {
 public:
  std::vector<TwistProfile> tw;         // per annulus
  std::vector<RadialHamiltonian> Hraw;  // H' = tw, with per-annulus constant
  std::vector<ActionProfile> F;         // reduced: F' = tw - 2pi g, collar-constant
  std::vector<double> tube_value;       // constant reduced value per tube

  // Reduced Hamiltonian (locally constant on every boundary collar).
  double reduced(const PageAtlas& atlas, const PagePoint& x) const;
  // Raw Hamiltonian c0 + int tw (annulus charts only).
  double raw(const PagePoint& x) const;
  // Time-1 map of the Hamiltonian flow (annulus charts; identity on tubes).
  PagePoint time1(const PagePoint& x) const;
};

std::pair<PageAtlas, MonodromyHamiltonian> make_annulus_page(const TwistProfile& tw,
                                                             const std::string& label = "1");

PageAtlas boundary_connected_sum(const PageAtlas& P1, const std::string& b1,
                                 const PageAtlas& P2, const std::string& b2,
                                 double halfwidth = kPi / 6.0, double depth = 0.2);

MonodromyHamiltonian extend_monodromy(const MonodromyHamiltonian& H1,
                                      const MonodromyHamiltonian& H2,
                                      const PageAtlas& summed);

// Per-annulus primitives U with psi* lambda = lambda - dU; the value is -1 on
// every collar and tube for the plateau-symmetric profiles used here.
class PagePrimitiveU {
 public:
  std::vector<PrimitiveU> per_annulus;
  double value(const PageAtlas& atlas, const PagePoint& x) const;
};
PagePrimitiveU page_primitive_U(const MonodromyHamiltonian& H, const PageAtlas& atlas);

struct ContourLevel {
  double level = 0.0;
  // Each polyline lives in one annulus chart; points are (r, phi) samples.
  struct Polyline {
    int annulus = 0;
    std::vector<std::array<double, 2>> points;
  };
  std::vector<Polyline> polylines;
};
std::vector<ContourLevel> level_set_contours(const PageAtlas& atlas,
                                             const MonodromyHamiltonian& H, int levels,
                                             int segments = 96);

}  // namespace reebbook
