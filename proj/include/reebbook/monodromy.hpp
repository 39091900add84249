#pragma once
// Per-annulus monodromy data derived from a twist profile:
//
//  * RadialHamiltonian  H(r) = c0 + int_{-1}^r tw.  With omega = dr ^ dphi and
//    i_X omega = -dH, the Hamiltonian field is X = H'(r) d_phi, so the time-1
//    flow is exactly the shear psi(r, phi) = (r, phi + tw(r)).
//
//  * PrimitiveU  the radial primitive of psi^*lambda - lambda = -dU for
//    lambda = r dphi, i.e. U'(r) = -r tw'(r), shifted by -1 - max(U_raw) so
//    that U < 0 everywhere with maximum value exactly -1.  U is the fiber
//    return time of the suspended flow.  For symmetric twists U is constant
//    (== -1 after the shift) on both plateau collars.
//
//  * ActionProfile  a conserved radial integral F with F' = tw - 2*pi*g,
//    where g is a C-infinity indicator of the lower half of the annulus.
//    F is locally constant on both collars with equal values for symmetric
//    twists, is invariant under both psi and the suspension flow, and is the
//    page-side branch of the manifold's second integral.  (The generator H
//    itself cannot be collar-constant: H' = tw == 2*pi on the lower collar.)

#include <utility>
#include <vector>

#include "reebbook/smooth.hpp"
#include "reebbook/twist.hpp"

namespace reebbook {

class RadialHamiltonian {
 public:
  RadialHamiltonian() = default;
  RadialHamiltonian(TwistProfile tw, double c0);
  double value(double r) const { return c0_ + integral_.value(r); }
  double deriv(double r) const { return tw_(r); }
  double c0() const { return c0_; }
  const TwistProfile& twist() const { return tw_; }
  // Time-1 Hamiltonian flow: the annulus shear.
  std::pair<double, double> time1(double r, double phi) const { return {r, phi + tw_(r)}; }

 private:
  TwistProfile tw_;
  double c0_ = 0.0;
  CumulativeIntegral integral_;
};

RadialHamiltonian hamiltonian_from_twist(const TwistProfile& tw, double c0);

class PrimitiveU {
 public:
  PrimitiveU() = default;
  explicit PrimitiveU(const TwistProfile& tw);

  // Shifted values: max == -1.
  double value(double r) const { return raw(r) + shift_; }
  double deriv(double r) const { return -std::clamp(r, -1.0, 1.0) * tw_.deriv(r); }
  // Raw primitive (int_{-1}^r of -s tw'(s)) before the shift.
  double raw(double r) const { return raw_.value(r); }
  double shift() const { return shift_; }
  double boundary_l() const { return value(-1.0); }
  double boundary_u() const { return value(1.0); }
  const TwistProfile& twist() const { return tw_; }

 private:
  TwistProfile tw_;
  CumulativeIntegral raw_;
  double shift_ = 0.0;
};

PrimitiveU primitive_U(const TwistProfile& tw);

class ActionProfile {
 public:
  ActionProfile() = default;
  ActionProfile(const TwistProfile& tw, double mid_bandwidth);

  double value(double r) const { return c_ + raw_.value(r); }
  double deriv(double r) const;
  double constant() const { return c_; }
  void set_constant(double c) { c_ = c; }
  double collar_l() const { return value(-1.0); }
  double collar_u() const { return value(1.0); }

 private:
  TwistProfile tw_;
  double band_ = 0.2;
  double c_ = 0.0;
  CumulativeIntegral raw_;
};

ActionProfile action_from_twist(const TwistProfile& tw, double mid_bandwidth = 0.2);

}  // namespace reebbook
