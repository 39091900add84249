#pragma once
// Binding-disk profile pairs (h1, h2) on rho in [0, 1).  The solid-torus
// contact model near a binding circle is
//
//     alpha_B = h1(rho) * dtheta_arc + h2(rho) * dphi_B,
//
// with h1(0) = 1, h1 strictly decreasing (pure exponential tail), h2(0) = 0,
// and h2 constant on [r_star, 1).  Admissibility is the positivity of the
// Wronskian D = h1 h2' - h2 h1', which is the area density of d(alpha_B).
//
// Exact matching with the fibered side pins both plateaus:
//   * h2 must be constant on the gluing annulus [0.5, 1) with value equal to
//     (fiber period)/(2*pi) = -U_b/(2*pi) at that binding, and
//   * the radial coordinate maps onto the page collar by |r| = h1(rho), so
//     h1 must stay within the constant-U collar (h1 >= 1 - collar width) on
//     the whole gluing annulus.
// calibrated_profiles solves the transition shape for a requested plateau;
// the disk-model Taylor data h1 = 1 - rho^2, h2 = rho^2 is kept exactly on
// [0, 0.3].  If the requested plateau is unreachable with unit core
// amplitude, the core is rescaled (h2 ~ a rho^2) and flagged.

#include <functional>
#include <vector>

#include "reebbook/smooth.hpp"

namespace reebbook {

struct ProfilePair {
  std::function<double(double)> h1, dh1, h2, dh2;
  double plateau = 0.0;    // h2 on [r_star, 1)
  double r_star = 0.0;     // plateau start (<= 0.45 for calibrated pairs)
  double core_amp = 1.0;   // a in h2 = a rho^2 + O(rho^4)
  bool scaled_core = false;
  double kappa = 0.1;      // h1 tail rate: h1 = A exp(-kappa rho) beyond the tail start
  double tail_start = 0.48;
  double glue_lo = 0.5;    // gluing annulus [glue_lo, 1)
  std::vector<double> breakpoints;

  double D(double rho) const { return h1(rho) * dh2(rho) - h2(rho) * dh1(rho); }
  // Profile part of the rotation ratio (binding loops per disk loop come with
  // an extra 2*pi/L_b factor at the manifold level).
  double sigma_raw(double rho) const { return dh2(rho) / (-dh1(rho)); }
  void validate() const;  // Taylor data, monotonicity, plateau, D > 0
};

// Transition shape solved so that the h2 plateau equals p_target exactly.
ProfilePair calibrated_profiles(double p_target);

// Corner-rounding construction: h1 = e^f (1 - rho_D^2), h2 = e^{g - g(0)} rho_D^2
// with rho_D(t) = t for t <= 0.6 saturating smoothly by t = 3/4; f == 0 on
// [0, 1/4] then strictly decreasing to -eps_W; g(0) = -eps_D, strictly
// increasing on [0, 3/4), identically 0 on [3/4, 1].
struct RoundingData {
  std::function<double(double)> f, df, g, dg;
  double eps_W = 0.3, eps_D = 0.2;
};
RoundingData rounding_data(double eps_W = 0.3, double eps_D = 0.2);
ProfilePair profiles_from_fg(const RoundingData& data);
ProfilePair profiles_from_rounding(double eps_W = 0.3, double eps_D = 0.2);

// Saturating disk radius used by the rounding construction (exposed for tests).
double rounding_rho(double t);
double rounding_rho_deriv(double t);

}  // namespace reebbook
