#include "reebbook/monodromy.hpp"

#include <algorithm>
#include <cmath>

namespace reebbook {

RadialHamiltonian::RadialHamiltonian(TwistProfile tw, double c0) : tw_(std::move(tw)), c0_(c0) {
  // The integrand owns a copy of the profile so the object stays valid
  // across copies and moves.
  auto f = [tw = tw_](double r) { return tw(r); };
  integral_ = CumulativeIntegral(f, tw_.breakpoints());
}

RadialHamiltonian hamiltonian_from_twist(const TwistProfile& tw, double c0) {
  return RadialHamiltonian(tw, c0);
}

PrimitiveU::PrimitiveU(const TwistProfile& tw) : tw_(tw) {
  auto f = [tw](double r) { return -r * tw.deriv(r); };
  raw_ = CumulativeIntegral(f, tw_.breakpoints());
  // Normalization contract: shift by -1 minus the maximum of the raw
  // primitive over a dense sample, so max U == -1 and U < 0 everywhere.
  double m = raw_.value(-1.0);
  for (int i = 0; i <= 2000; ++i) {
    const double r = -1.0 + 2.0 * i / 2000.0;
    m = std::max(m, raw_.value(r));
  }
  shift_ = -1.0 - m;
}

PrimitiveU primitive_U(const TwistProfile& tw) { return PrimitiveU(tw); }

ActionProfile::ActionProfile(const TwistProfile& tw, double mid_bandwidth)
    : tw_(tw), band_(mid_bandwidth) {
  auto breaks = tw_.breakpoints();
  breaks.push_back(-band_ / 2.0);
  breaks.push_back(band_ / 2.0);
  std::sort(breaks.begin(), breaks.end());
  auto f = [tw, band = band_](double r) {
    const double g = 1.0 - step01((r + band / 2.0) / band);
    return tw(r) - kTwoPi * g;
  };
  c_ = 0.0;
  raw_ = CumulativeIntegral(f, breaks);
}

double ActionProfile::deriv(double r) const {
  // g == 1 on the lower half, 0 on the upper half, C-infinity in between.
  const double g = 1.0 - step01((r + band_ / 2.0) / band_);
  return tw_(r) - kTwoPi * g;
}

ActionProfile action_from_twist(const TwistProfile& tw, double mid_bandwidth) {
  return ActionProfile(tw, mid_bandwidth);
}

}  // namespace reebbook
