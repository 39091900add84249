#pragma once
// Radial twist profiles tw(r) on [-1, 1].  The annulus monodromy generated by
// such a profile is psi(r, phi) = (r, phi + tw(r)): a full positive shear,
// tw(-1) = 2*pi and tw(1) = 0, non-increasing.  With plateau collars the map
// is pointwise the identity near both boundary circles (a 2*pi shear of the
// angle is trivial), which is what lets the fibered structure close up over
// the bindings and the connecting tubes.

#include <functional>
#include <vector>

#include "reebbook/smooth.hpp"

namespace reebbook {

class TwistProfile {
 public:
  enum class Kind { Linear, Plateau, Sampled };

  // Width of the constant collars used by the assembled flows.  See the
  // profile-calibration notes in profiles.hpp: exact matching of the binding
  // models forces h1 >= 1 - width on the gluing annulus, and the disk-model
  // Taylor data is only reachable when width >= ~0.2; 0.30 leaves margin.
  static constexpr double kDefaultCollarWidth = 0.30;

  // tw(r) = pi*(1 - r): the elementary linear shear (no plateaus).
  static TwistProfile linear();

  // C-infinity monotone shear with tw == 2*pi on [-1, -1+w], tw == 0 on
  // [1-w, 1], and tw(r) + tw(-r) == 2*pi exactly.
  static TwistProfile plateau(double collar_width = kDefaultCollarWidth);

  // Monotone cubic (PCHIP) interpolant of sampled data; derivative from the
  // interpolant.  Samples must cover [-1, 1] and be non-increasing.
  static TwistProfile from_samples(std::vector<double> r, std::vector<double> tw);

  double operator()(double r) const { return f_(r); }
  double deriv(double r) const { return df_(r); }

  Kind kind() const { return kind_; }
  double collar_width() const { return w_; }

  // Whether tw(r) + tw(-r) == 2*pi holds (exact by construction for the
  // analytic kinds; tested on a grid for sampled data).  Symmetry makes the
  // two boundary values of the shear primitive equal on every annulus.
  bool symmetric() const;

  // Panel boundaries for quadrature over this profile.
  std::vector<double> breakpoints() const;

  // Endpoint and monotonicity invariants; throws on violation.
  void validate() const;

 private:
  Kind kind_ = Kind::Plateau;
  double w_ = kDefaultCollarWidth;
  std::function<double(double)> f_, df_;
};

}  // namespace reebbook
