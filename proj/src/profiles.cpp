#include "reebbook/profiles.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace reebbook {

namespace {

constexpr double kPureEnd = 0.30;    // disk Taylor data kept exactly up to here
constexpr double kBlendInEnd = 0.35; // -h1' bends from 2*rho to the transit rate
constexpr double kRateZoneEnd = 0.43;
constexpr double kTransitRate = 0.6; // -h1' through the transition zone
constexpr double kTailStart = 0.48;  // pure exponential tail from here on
constexpr double kKappa = 0.1;       // tail rate
constexpr double kRStarMin = 0.315;
constexpr double kRStarMax = 0.45;

// -h1'(rho) for the calibrated family, given the tail amplitude A
// (h1 = A exp(-kappa rho) on [kTailStart, 1)).
double mu_of(double rho, double A) {
  if (rho <= kPureEnd) return 2.0 * rho;
  if (rho < kBlendInEnd) {
    double s = step01((rho - kPureEnd) / (kBlendInEnd - kPureEnd));
    return 2.0 * rho + (kTransitRate - 2.0 * rho) * s;
  }
  if (rho < kRateZoneEnd) return kTransitRate;
  double tail = kKappa * A * std::exp(-kKappa * rho);
  if (rho < kTailStart) {
    double s = step01((rho - kRateZoneEnd) / (kTailStart - kRateZoneEnd));
    return kTransitRate + (tail - kTransitRate) * s;
  }
  return tail;
}

// Tail amplitude is a one-dimensional fixed point: the drop accumulated up to
// kTailStart must hand off continuously to A exp(-kappa rho).  The
// A-sensitive part of the integrand lives only on the short hand-off blend,
// so the iteration is a strong contraction.
double solve_tail_amplitude() {
  double A = 0.85;
  for (int it = 0; it < 60; ++it) {
    auto mu = [A](double r) { return mu_of(r, A); };
    double drop = integrate(mu, 0.0, kPureEnd) + integrate(mu, kPureEnd, kBlendInEnd) +
                  integrate(mu, kBlendInEnd, kRateZoneEnd) +
                  integrate(mu, kRateZoneEnd, kTailStart);
    double next = (1.0 - drop) * std::exp(kKappa * kTailStart);
    if (std::abs(next - A) < 1e-15) return next;
    A = next;
  }
  return A;
}

// Transition shape for h2': fraction of the h1 drop converted into h2 gain,
// equal to 1 (flatly) for x <= c and to 0 (flatly) for x >= 1.
double sigma_shape(double x, double c) { return 1.0 - step01((x - c) / (1.0 - c)); }

// Unit-amplitude h2 gain over the transition annulus [kPureEnd, r_star].
double transition_gain(double r_star, double c, double A) {
  auto integrand = [=](double rho) {
    double x = (rho - kPureEnd) / (r_star - kPureEnd);
    return sigma_shape(x, c) * mu_of(rho, A);
  };
  return integrate(integrand, kPureEnd, r_star);
}

}  // namespace

ProfilePair calibrated_profiles(double p_target) {
  if (!(p_target > 0.0)) throw std::invalid_argument("profile plateau target must be positive");
  const double A = solve_tail_amplitude();

  // h1 is shared by every calibration: cumulative drop of mu.
  auto mu_fn = std::make_shared<std::function<double(double)>>(
      [A](double r) { return mu_of(r, A); });
  std::vector<double> h1_breaks = {0.0, kPureEnd, kBlendInEnd, kRateZoneEnd, kTailStart};
  auto h1_cum = std::make_shared<CumulativeIntegral>(*mu_fn, h1_breaks);

  ProfilePair pp;
  pp.kappa = kKappa;
  pp.tail_start = kTailStart;
  pp.h1 = [A, h1_cum](double rho) {
    if (rho >= kTailStart) return A * std::exp(-kKappa * rho);
    if (rho <= 0.0) return 1.0;
    return 1.0 - h1_cum->value(rho);
  };
  pp.dh1 = [mu_fn](double rho) { return rho <= 0.0 ? 0.0 : -(*mu_fn)(rho); };

  // Calibrate the transition so the plateau hits p_target with unit core
  // amplitude; rescale the core only if the target is out of reach.
  const double pure_gain = kPureEnd * kPureEnd;  // h2 = rho^2 on [0, kPureEnd]
  const double need = p_target - pure_gain;
  double a = 1.0, r_star = 0.0, c_used = 0.0;
  bool solved = false;
  for (double c : {0.6, 0.7, 0.8, 0.875}) {
    if (need < transition_gain(kRStarMin, c, A) + 1e-4) break;  // target too low for unit core
    if (transition_gain(kRStarMax, c, A) < need + 2e-3) continue;  // keep the root interior
    r_star = find_root(
        [&](double rs) { return transition_gain(rs, c, A) - need; }, kRStarMin, kRStarMax);
    c_used = c;
    solved = true;
    break;
  }
  if (!solved) {
    r_star = 0.42;
    c_used = 0.7;
    a = p_target / (pure_gain + transition_gain(r_star, c_used, A));
    pp.scaled_core = true;
  }

  auto dh2_fn = std::make_shared<std::function<double(double)>>(
      [=](double rho) {
        if (rho <= 0.0) return 0.0;
        if (rho <= kPureEnd) return a * 2.0 * rho;
        if (rho >= r_star) return 0.0;
        double x = (rho - kPureEnd) / (r_star - kPureEnd);
        return a * sigma_shape(x, c_used) * mu_of(rho, A);
      });
  std::vector<double> h2_breaks = {kPureEnd};
  for (double b : {kBlendInEnd, kRateZoneEnd})
    if (b < r_star) h2_breaks.push_back(b);
  h2_breaks.push_back(r_star);
  auto h2_cum = std::make_shared<CumulativeIntegral>(
      [dh2_fn](double r) { return (*dh2_fn)(r); }, h2_breaks);
  const double plateau = a * pure_gain + h2_cum->total();

  pp.h2 = [=](double rho) {
    if (rho <= 0.0) return 0.0;
    if (rho <= kPureEnd) return a * rho * rho;
    if (rho >= r_star) return plateau;
    return a * pure_gain + h2_cum->value(rho);
  };
  pp.dh2 = [dh2_fn](double rho) { return (*dh2_fn)(rho); };
  pp.plateau = plateau;
  pp.r_star = r_star;
  pp.core_amp = a;
  pp.breakpoints = {0.0, kPureEnd, kBlendInEnd, kRateZoneEnd, r_star, kTailStart, 1.0};

  if (std::abs(plateau - p_target) > 1e-10)
    throw std::runtime_error("profile calibration missed the plateau target");
  pp.validate();
  return pp;
}

double rounding_rho(double t) {
  // rho_D' = 1 - step01((t - 0.6)/0.15); the saturation radius is exactly
  // 0.6 + 0.15/2 because step01 integrates to 1/2 by its point symmetry.
  if (t <= 0.6) return t;
  if (t >= 0.75) return 0.675;
  static const CumulativeIntegral tailint(
      [](double u) { return 1.0 - step01((u - 0.6) / 0.15); }, {0.6, 0.75});
  return 0.6 + tailint.value(t);
}

double rounding_rho_deriv(double t) {
  if (t <= 0.6) return 1.0;
  if (t >= 0.75) return 0.0;
  return 1.0 - step01((t - 0.6) / 0.15);
}

RoundingData rounding_data(double eps_W, double eps_D) {
  if (!(eps_W > 0.0) || !(eps_D > 0.0))
    throw std::invalid_argument("rounding depths must be positive");
  RoundingData rd;
  rd.eps_W = eps_W;
  rd.eps_D = eps_D;

  // f: flat 0 on [0, 1/4], then strictly decreasing to -eps_W at t = 1.
  auto wf = std::make_shared<std::function<double(double)>>(
      [](double t) { return step01((t - 0.25) / 0.05); });
  const double Nf = 0.05 * 0.5 + 0.7;  // exact: ramp half-area plus the saturated stretch
  auto fcum = std::make_shared<CumulativeIntegral>(*wf, std::vector<double>{0.0, 0.25, 0.30, 1.0});
  rd.f = [=](double t) { return -eps_W * fcum->value(t) / Nf; };
  rd.df = [=](double t) { return -eps_W * (*wf)(t) / Nf; };

  // g: -eps_D at t = 0 (with all derivatives vanishing there), strictly
  // increasing up to t = 3/4, identically 0 afterwards.
  auto vg = std::make_shared<std::function<double(double)>>([](double t) {
    return step01(t / 0.1) * (1.0 - step01((t - 0.70) / 0.05));
  });
  auto gcum = std::make_shared<CumulativeIntegral>(
      *vg, std::vector<double>{0.0, 0.1, 0.70, 0.75});
  const double Ng = gcum->total();  // integral up to 0.75; v vanishes beyond
  rd.g = [=](double t) { return -eps_D * (1.0 - gcum->value(std::min(t, 0.75)) / Ng); };
  rd.dg = [=](double t) { return t >= 0.75 ? 0.0 : eps_D * (*vg)(t) / Ng; };
  return rd;
}

ProfilePair profiles_from_fg(const RoundingData& rd) {
  // Admissibility of the rounding pair (f, g): f vanishes on [0, 1/4] and then
  // decreases strictly to f(1) = -eps_W; g starts at -eps_D, increases
  // strictly on [0, 3/4), and vanishes identically on [3/4, 1].
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("rounding functions inadmissible: " + what);
  };
  for (int i = 0; i <= 50; ++i) {
    const double t = 0.25 * i / 50.0;
    if (std::abs(rd.f(t)) > 1e-12) bad("f must vanish on [0, 1/4]");
  }
  if (std::abs(rd.f(1.0) + rd.eps_W) > 1e-10) bad("f(1) must equal -eps_W");
  if (std::abs(rd.g(0.0) + rd.eps_D) > 1e-10) bad("g(0) must equal -eps_D");
  // Monotonicity is enforced non-strictly on the full interval and strictly on
  // the bulk; admissible data may be infinitely flat right at the endpoints of
  // the monotone windows, where a strict sampled test cannot resolve anything.
  for (int i = 0; i < 200; ++i) {
    const double t0 = 0.25 + 0.75 * i / 200.0, t1 = 0.25 + 0.75 * (i + 1) / 200.0;
    if (rd.f(t1) > rd.f(t0) + 1e-12) bad("f must not increase on (1/4, 1]");
  }
  for (int i = 0; i < 150; ++i) {
    const double t0 = 0.30 + 0.70 * i / 150.0, t1 = 0.30 + 0.70 * (i + 1) / 150.0;
    if (rd.f(t1) >= rd.f(t0) - 1e-12) bad("f must decrease strictly on the bulk of (1/4, 1]");
  }
  for (int i = 0; i < 200; ++i) {
    const double t0 = 0.75 * i / 200.0, t1 = 0.75 * (i + 1) / 200.0;
    if (rd.g(t1) < rd.g(t0) - 1e-12) bad("g must not decrease on [0, 3/4)");
  }
  for (int i = 0; i < 150; ++i) {
    const double t0 = 0.05 + 0.65 * i / 150.0, t1 = 0.05 + 0.65 * (i + 1) / 150.0;
    if (rd.g(t1) <= rd.g(t0) + 1e-12) bad("g must increase strictly on the bulk of [0, 3/4)");
  }
  for (int i = 0; i <= 50; ++i) {
    const double t = 0.75 + 0.25 * i / 50.0;
    if (std::abs(rd.g(t)) > 1e-12) bad("g must vanish on [3/4, 1]");
  }

  ProfilePair pp;
  const double g0 = rd.g(0.0);
  pp.h1 = [rd](double t) {
    double rho = rounding_rho(t);
    return std::exp(rd.f(t)) * (1.0 - rho * rho);
  };
  pp.dh1 = [rd](double t) {
    double rho = rounding_rho(t), dr = rounding_rho_deriv(t);
    return std::exp(rd.f(t)) * (rd.df(t) * (1.0 - rho * rho) - 2.0 * rho * dr);
  };
  pp.h2 = [rd, g0](double t) {
    double rho = rounding_rho(t);
    return std::exp(rd.g(t) - g0) * rho * rho;
  };
  pp.dh2 = [rd, g0](double t) {
    double rho = rounding_rho(t), dr = rounding_rho_deriv(t);
    return std::exp(rd.g(t) - g0) * (rd.dg(t) * rho * rho + 2.0 * rho * dr);
  };
  pp.r_star = 0.75;
  pp.plateau = pp.h2(0.80);
  pp.core_amp = 1.0;
  pp.kappa = 0.0;  // tail decays through f, not at a fixed exponential rate
  pp.tail_start = 0.75;
  pp.breakpoints = {0.0, 0.1, 0.25, 0.30, 0.6, 0.70, 0.75, 1.0};
  pp.validate();
  return pp;
}

ProfilePair profiles_from_rounding(double eps_W, double eps_D) {
  return profiles_from_fg(rounding_data(eps_W, eps_D));
}

void ProfilePair::validate() const {
  auto fail = [](const std::string& what) {
    throw std::runtime_error("profile admissibility violated: " + what);
  };
  if (std::abs(h1(0.0) - 1.0) > 1e-12) fail("h1(0) != 1");
  if (std::abs(h2(0.0)) > 1e-14) fail("h2(0) != 0");
  const double probe = 1e-3;
  if (std::abs(h2(probe) / (probe * probe) - core_amp) > 1e-4) fail("core amplitude");

  const int n = 1200;
  double prev_h1 = h1(0.0);
  for (int i = 1; i <= n; ++i) {
    double rho = 0.999 * i / n;
    double v1 = h1(rho);
    if (!(v1 < prev_h1)) fail("h1 not strictly decreasing");
    prev_h1 = v1;
    if (dh2(rho) < -1e-12) fail("h2 decreasing");
    double d = D(rho);
    if (!(d / std::max(rho, 1e-6) > 1e-3 * core_amp)) fail("Wronskian not positive");
    if (rho >= r_star && std::abs(h2(rho) - plateau) > 1e-11) fail("h2 plateau not constant");
  }
  if (!(h1(0.999) > 0.0)) fail("h1 must stay positive");
}

}  // namespace reebbook
