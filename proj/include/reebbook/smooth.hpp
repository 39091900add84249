#pragma once
// Smooth (C-infinity) building blocks used by every radial profile in the
// library: bump/step mollifiers, piecewise-analytic 1D functions with exact
// derivatives, cached cumulative quadrature, and bracketed root finding.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace reebbook {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Representative of x in [0, period).  period must be positive.
inline double wrap_period(double x, double period) {
  double y = std::fmod(x, period);
  if (y < 0.0) y += period;
  if (y >= period) y = 0.0;  // fmod can round up to the period itself
  return y;
}

// Signed distance from x to the nearest multiple of period, in
// [-period/2, period/2].
inline double wrap_centered(double x, double period) { return std::remainder(x, period); }

// exp(-1/x) for x > 0, identically 0 for x <= 0.  All derivatives vanish at 0.
double cinf_ramp(double x);
double cinf_ramp_deriv(double x);

// Monotone C-infinity step: 0 for x <= 0, 1 for x >= 1, strictly increasing
// in between, with step01(x) + step01(1 - x) == 1 exactly.
double step01(double x);
double step01_deriv(double x);

// C-infinity bump supported on [0, 1], peak value 1 at x = 1/2.
double bump01(double x);
double bump01_deriv(double x);

// step01 rescaled to the interval [a, b].
struct SmoothStep {
  double a = 0.0, b = 1.0;
  double value(double x) const { return step01((x - a) / (b - a)); }
  double deriv(double x) const { return step01_deriv((x - a) / (b - a)) / (b - a); }
};

// A scalar function on [lo, hi] assembled from analytic pieces.  Each piece
// supplies value and derivative; pieces meet at breakpoints.  Evaluation
// clamps to the domain (profiles are constant beyond their plateaus anyway).
class Piecewise1D {
 public:
  using Fn = std::function<double(double)>;

  Piecewise1D() = default;
  Piecewise1D(std::vector<double> breaks, std::vector<Fn> fn, std::vector<Fn> dfn);

  double value(double x) const;
  double deriv(double x) const;
  double lo() const { return breaks_.front(); }
  double hi() const { return breaks_.back(); }
  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  std::size_t piece(double x) const;
  std::vector<double> breaks_;
  std::vector<Fn> fn_, dfn_;
};

// Adaptive Gauss–Kronrod integral of f over [a, b] (panel tolerance ~1e-14).
double integrate(const std::function<double(double)>& f, double a, double b);

// Cumulative integral F(x) = int_a^x f, with prefix sums cached at the given
// breakpoints so repeated evaluation is cheap and reproducible.
class CumulativeIntegral {
 public:
  CumulativeIntegral() = default;
  CumulativeIntegral(std::function<double(double)> f, std::vector<double> breaks);
  double value(double x) const;
  double total() const { return prefix_.back(); }

 private:
  std::function<double(double)> f_;
  std::vector<double> breaks_;
  std::vector<double> prefix_;
};

// Bracketed root of a continuous function (TOMS 748).  Requires a sign change.
double find_root(const std::function<double(double)>& f, double lo, double hi);

// All roots of f on [lo, hi] located by a uniform scan of n cells followed by
// bracketed refinement.  Tangencies that do not change sign are not reported.
std::vector<double> find_roots_scan(const std::function<double(double)>& f, double lo,
                                    double hi, int n);

}  // namespace reebbook
