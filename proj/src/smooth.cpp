#include "reebbook/smooth.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace reebbook {

double cinf_ramp(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double cinf_ramp_deriv(double x) {
  if (x <= 0.0) return 0.0;
  const double inv = 1.0 / x;
  return std::exp(-inv) * inv * inv;
}

double step01(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double e = cinf_ramp(x);
  const double eo = cinf_ramp(1.0 - x);
  return e / (e + eo);
}

double step01_deriv(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double e = cinf_ramp(x);
  const double eo = cinf_ramp(1.0 - x);
  const double s = e + eo;
  const double ix = 1.0 / x, iy = 1.0 / (1.0 - x);
  return e * eo * (ix * ix + iy * iy) / (s * s);
}

double bump01(double x) { return step01(2.0 * x) * step01(2.0 - 2.0 * x); }

double bump01_deriv(double x) {
  return 2.0 * step01_deriv(2.0 * x) * step01(2.0 - 2.0 * x) -
         2.0 * step01(2.0 * x) * step01_deriv(2.0 - 2.0 * x);
}

Piecewise1D::Piecewise1D(std::vector<double> breaks, std::vector<Fn> fn, std::vector<Fn> dfn)
    : breaks_(std::move(breaks)), fn_(std::move(fn)), dfn_(std::move(dfn)) {
  if (breaks_.size() < 2 || fn_.size() != breaks_.size() - 1 || dfn_.size() != fn_.size())
    throw std::invalid_argument("Piecewise1D: inconsistent piece count");
  if (!std::is_sorted(breaks_.begin(), breaks_.end()))
    throw std::invalid_argument("Piecewise1D: breakpoints not sorted");
}

std::size_t Piecewise1D::piece(double x) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
  if (k == 0) return 0;
  if (k >= breaks_.size()) return fn_.size() - 1;
  return k - 1;
}

double Piecewise1D::value(double x) const {
  const double xc = std::clamp(x, lo(), hi());
  return fn_[piece(xc)](xc);
}

double Piecewise1D::deriv(double x) const {
  const double xc = std::clamp(x, lo(), hi());
  return dfn_[piece(xc)](xc);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 10, 1e-14);
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f,
                                       std::vector<double> breaks)
    : f_(std::move(f)), breaks_(std::move(breaks)) {
  if (breaks_.size() < 2) throw std::invalid_argument("CumulativeIntegral: need >= 2 breakpoints");
  if (!std::is_sorted(breaks_.begin(), breaks_.end()))
    throw std::invalid_argument("CumulativeIntegral: breakpoints not sorted");
  prefix_.resize(breaks_.size(), 0.0);
  for (std::size_t k = 1; k < breaks_.size(); ++k)
    prefix_[k] = prefix_[k - 1] + integrate(f_, breaks_[k - 1], breaks_[k]);
}

double CumulativeIntegral::value(double x) const {
  const double xc = std::clamp(x, breaks_.front(), breaks_.back());
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), xc);
  std::size_t k = static_cast<std::size_t>(it - breaks_.begin());
  if (k == 0) return 0.0;
  --k;
  if (k >= breaks_.size() - 1) k = breaks_.size() - 2;
  return prefix_[k] + integrate(f_, breaks_[k], xc);
}

double find_root(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("find_root: no sign change in bracket");
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

std::vector<double> find_roots_scan(const std::function<double(double)>& f, double lo,
                                    double hi, int n) {
  std::vector<double> roots;
  double xp = lo, fp = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double fx = f(x);
    if (fp == 0.0) {
      roots.push_back(xp);
    } else if ((fp > 0.0) != (fx > 0.0)) {
      roots.push_back(find_root(f, xp, x));
    }
    xp = x;
    fp = fx;
  }
  if (fp == 0.0) roots.push_back(hi);
  return roots;
}

}  // namespace reebbook
