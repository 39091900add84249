#include "reebbook/twist.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

// boost 1.74 pchip.hpp calls isnan unqualified; provide it at global scope.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace reebbook {

TwistProfile TwistProfile::linear() {
  TwistProfile p;
  p.kind_ = Kind::Linear;
  p.w_ = 0.0;
  p.f_ = [](double r) { return kPi * (1.0 - std::clamp(r, -1.0, 1.0)); };
  p.df_ = [](double r) { return (r < -1.0 || r > 1.0) ? 0.0 : -kPi; };
  return p;
}

TwistProfile TwistProfile::plateau(double w) {
  if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("TwistProfile: collar width in (0,1)");
  TwistProfile p;
  p.kind_ = Kind::Plateau;
  p.w_ = w;
  const double a = -1.0 + w, span = 2.0 - 2.0 * w;
  // step01(x) + step01(1-x) == 1 gives tw(r) + tw(-r) == 2*pi exactly.
  p.f_ = [a, span](double r) { return kTwoPi * (1.0 - step01((r - a) / span)); };
  p.df_ = [a, span](double r) { return -kTwoPi * step01_deriv((r - a) / span) / span; };
  return p;
}

TwistProfile TwistProfile::from_samples(std::vector<double> r, std::vector<double> tw) {
  if (r.size() != tw.size() || r.size() < 5)
    throw std::invalid_argument("TwistProfile: need >= 5 samples");
  if (std::abs(r.front() + 1.0) > 1e-12 || std::abs(r.back() - 1.0) > 1e-12)
    throw std::invalid_argument("TwistProfile: samples must cover [-1, 1]");
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(r), std::move(tw));
  TwistProfile p;
  p.kind_ = Kind::Sampled;
  p.w_ = 0.0;
  p.f_ = [spline](double x) { return (*spline)(std::clamp(x, -1.0, 1.0)); };
  p.df_ = [spline](double x) { return spline->prime(std::clamp(x, -1.0, 1.0)); };
  p.validate();
  return p;
}

bool TwistProfile::symmetric() const {
  for (int i = 0; i <= 64; ++i) {
    const double r = -1.0 + 2.0 * i / 64.0;
    if (std::abs(f_(r) + f_(-r) - kTwoPi) > 1e-10) return false;
  }
  return true;
}

std::vector<double> TwistProfile::breakpoints() const {
  switch (kind_) {
    case Kind::Linear:
      return {-1.0, 1.0};
    case Kind::Plateau:
      return {-1.0, -1.0 + w_, 0.0, 1.0 - w_, 1.0};
    case Kind::Sampled: {
      std::vector<double> b;
      for (int i = 0; i <= 16; ++i) b.push_back(-1.0 + 2.0 * i / 16.0);
      return b;
    }
  }
  return {-1.0, 1.0};
}

void TwistProfile::validate() const {
  if (std::abs(f_(-1.0) - kTwoPi) > 1e-9) throw std::logic_error("twist: tw(-1) != 2*pi");
  if (std::abs(f_(1.0)) > 1e-9) throw std::logic_error("twist: tw(1) != 0");
  double prev = f_(-1.0);
  for (int i = 1; i <= 400; ++i) {
    const double r = -1.0 + 2.0 * i / 400.0;
    const double v = f_(r);
    if (v > prev + 1e-9) throw std::logic_error("twist: profile not non-increasing");
    prev = v;
  }
}

}  // namespace reebbook
