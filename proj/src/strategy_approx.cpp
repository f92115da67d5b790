#include "levyou/strategy_approx.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "levyou/csv.hpp"
#include "levyou/errors.hpp"

namespace levyou {

namespace {

ApproxFraction finish(double unclamped, double pi) {
  return {pi, unclamped, pi != unclamped};
}

double inv_sq(double v) { return 1.0 / (v * v); }

}  // namespace

ApproxFraction merton_fraction(double t, double s, const MarketCoefficients& coeffs, const AdmissibleSet& adm) {
  const double sg = coeffs.sigma(t);
  const double psi = coeffs.psi(t);
  const double denom = sg * sg + (coeffs.jumps.empty() ? 0.0 : psi * psi * coeffs.jumps.moment(2));
  if (!(denom > 0.0)) throw DegenerateError("merton_fraction: sigma^2 + sigma_L^2 vanishes at t=" + format_double(t));
  const double raw = (coeffs.compensated_drift(t) - coeffs.lambda * s) / denom;
  return finish(raw, adm.clamp(raw));
}

double jump_mean_polynomial(double pi, double t, double s, const MarketCoefficients& coeffs) {
  const double x = coeffs.compensated_drift(t) - coeffs.lambda * s;
  const double sg2 = coeffs.sigma(t) * coeffs.sigma(t);
  const double eta = coeffs.jumps.empty() ? 0.0 : coeffs.jumps.intensity();
  const double a = coeffs.jumps.empty() ? 0.0 : coeffs.psi(t) * coeffs.jumps.size_mean();
  return -sg2 * a * pi * pi + (a * x - eta * a * a - sg2) * pi + x;
}

ApproxFraction jump_mean_fraction(double t, double s, const MarketCoefficients& coeffs,
                                  const AdmissibleSet& adm) {
  const double x = coeffs.compensated_drift(t) - coeffs.lambda * s;
  const double sg2 = coeffs.sigma(t) * coeffs.sigma(t);
  if (coeffs.jumps.empty()) {
    if (!(sg2 > 0.0)) throw DegenerateError("jump_mean_fraction: no jumps and no diffusion");
    return finish(x / sg2, adm.clamp(x / sg2));
  }
  if (coeffs.jumps.kind() != JumpMeasure::Kind::CompoundPoisson) {
    throw ConfigError("jump_mean_fraction needs a compound Poisson jump measure");
  }
  const double eta = coeffs.jumps.intensity();
  const double mu = coeffs.jumps.size_mean();
  const double a = coeffs.psi(t) * mu;
  if (sg2 == 0.0 && mu == 0.0) throw DegenerateError("jump_mean_fraction: sigma and mu_F both vanish");
  if (x == 0.0) return {0.0, 0.0, false};

  // h = f'_approx, strictly decreasing where 1 + pi a > 0
  auto h = [&](double p) { return x - sg2 * p - eta * a * a * p / (1.0 + p * a); };

  double raw;
  if (a == 0.0) {
    raw = x / sg2;
  } else if (sg2 == 0.0) {
    const double gap = x - eta * a;
    raw = gap == 0.0 ? std::copysign(kInfinity, x) : -x / (a * gap);
  } else {
    const double p1 = a * x - eta * a * a - sg2;
    const double p3 = sg2 * a;
    const double p2 = p3 * x;
    const double disc = p1 * p1 + 4.0 * p2;
    if (disc < 0.0) {
      throw BranchError("jump_mean_fraction: negative discriminant " + format_double(disc) + " at t=" +
                        format_double(t) + ", s=" + format_double(s));
    }
    // q(-1/a) = eta a, so (p1 + sqrt(disc)) / (2 p3) is the root on the admissible side for either sign of a
    const double sq = std::sqrt(disc);
    raw = p1 >= 0.0 ? (p1 + sq) / (2.0 * p3) : -2.0 * x / (p1 - sq);
    if (!(1.0 + raw * a > 0.0)) {
      throw BranchError("jump_mean_fraction: selected root " + format_double(raw) + " violates 1 + pi psi mu_F > 0");
    }
  }

  const double lo = adm.pi_min();
  const double hi = adm.pi_max();
  if ((lo == 0.0 ? x : h(lo)) <= 0.0) return finish(raw, lo);
  if ((hi == 0.0 ? x : h(hi)) >= 0.0) return finish(raw, hi);
  const double slack = 1e-9 * (hi - lo);
  if (!(raw > lo - slack && raw < hi + slack)) {
    throw BranchError("jump_mean_fraction: root " + format_double(raw) + " outside the sign-change bracket [" +
                      format_double(lo) + ", " + format_double(hi) + "]");
  }
  return finish(raw, adm.clamp(raw));
}

StrategySurface merton_surface(const MarketCoefficients& coeffs, const AdmissibleSet& adm) {
  auto c = std::make_shared<const MarketCoefficients>(coeffs);
  return StrategySurface(
      SurfaceLabel::Merton, [c, adm](double t, double s) { return merton_fraction(t, s, *c, adm).pi; },
      "merton ratio coeffs=" + coeffs.fingerprint());
}

StrategySurface jump_mean_surface(const MarketCoefficients& coeffs, const AdmissibleSet& adm) {
  auto c = std::make_shared<const MarketCoefficients>(coeffs);
  return StrategySurface(
      SurfaceLabel::JumpMean, [c, adm](double t, double s) { return jump_mean_fraction(t, s, *c, adm).pi; },
      "jump-mean expansion coeffs=" + coeffs.fingerprint());
}

namespace {

ApproxBound echo(const MarketCoefficients& coeffs, const AdmissibleSet& adm, ApproxBound::Kind kind) {
  if (adm.tag() == CaseTag::D) throw CaseError("error bounds are not defined without jumps (case D)");
  ApproxBound b;
  b.kind = kind;
  b.tag = adm.tag();
  b.delta = adm.delta();
  b.pi_min = adm.pi_min();
  b.pi_max = adm.pi_max();
  b.m = coeffs.jumps.support().m;
  b.M = coeffs.jumps.support().M;
  b.psi1 = coeffs.psi1;
  b.psi2 = coeffs.psi2;
  b.sigma1_sq = coeffs.min_sigma_sq();
  return b;
}

}  // namespace

ApproxBound merton_error_bound(const MarketCoefficients& coeffs, const AdmissibleSet& adm) {
  ApproxBound b = echo(coeffs, adm, ApproxBound::Kind::Merton);
  b.third_moment = coeffs.jumps.abs_moment(3);
  const double denom = b.sigma1_sq + b.psi2 * b.psi2 * coeffs.jumps.moment(2);
  if (!(denom > 0.0)) throw DegenerateError("merton_error_bound: sigma_1^2 + psi_2^2 sigma_nu^2 vanishes");
  const double span = std::max(b.pi_min * b.pi_min, b.pi_max * b.pi_max);
  b.C0 = b.psi2 * b.psi2 * b.psi2 * span / denom;
  const double dp = b.delta * b.psi2;
  double floor = 1.0;
  if ((b.tag == CaseTag::A || b.tag == CaseTag::B) && std::isfinite(b.M)) floor = std::min(floor, dp * b.M);
  if ((b.tag == CaseTag::A || b.tag == CaseTag::C) && std::isfinite(b.m)) floor = std::min(floor, -dp * b.m);
  b.C = b.C0 / floor;
  b.bound_value = b.C == 0.0 ? 0.0 : (std::isfinite(b.third_moment) ? b.C * b.third_moment : kInfinity);
  return b;
}

ApproxBound jump_mean_error_bound(const MarketCoefficients& coeffs, const AdmissibleSet& adm) {
  ApproxBound b = echo(coeffs, adm, ApproxBound::Kind::JumpMean);
  if (coeffs.jumps.kind() != JumpMeasure::Kind::CompoundPoisson) {
    throw ConfigError("jump_mean_error_bound needs a compound Poisson jump measure");
  }
  b.eta = coeffs.jumps.intensity();
  b.mu_F = coeffs.jumps.size_mean();
  b.sigma_F = std::sqrt(coeffs.jumps.size_variance());
  if (b.sigma1_sq == 0.0 && b.mu_F == 0.0) throw DegenerateError("jump_mean_error_bound: sigma_1 and mu_F both vanish");

  const double dp = b.delta * b.psi2;
  const bool finite_M = std::isfinite(b.M);
  const bool finite_m = std::isfinite(b.m);
  switch (b.tag) {
    case CaseTag::A:
      if (finite_m && finite_M) {
        b.C1 = std::max({1.0, inv_sq(dp * b.M), inv_sq(dp * b.m)}) +
               std::max({1.0, 1.0 / (dp * b.M), 1.0 / (-dp * b.m)});
      } else if (finite_M) {
        b.C1 = std::max(1.0, inv_sq(dp * b.M)) + std::max(1.0, 1.0 / (dp * b.M));
      } else {
        b.C1 = std::max(1.0, inv_sq(dp * b.m)) + std::max(1.0, 1.0 / (-dp * b.m));
      }
      break;
    case CaseTag::B:
      b.C1 = finite_M ? std::max(1.0, inv_sq(dp * b.M)) + std::max(1.0, 1.0 / (dp * b.M)) : 1.0;
      break;
    case CaseTag::C:
      b.C1 = finite_m ? std::max(1.0, inv_sq(dp * b.m)) + std::max(1.0, 1.0 / (-dp * b.m)) : 1.0;
      break;
    case CaseTag::D:
      break;
  }
  if (b.mu_F > 0.0) {
    b.C2 = inv_sq(1.0 + b.pi_max * b.psi2 * b.mu_F);
  } else if (b.mu_F < 0.0) {
    b.C2 = inv_sq(1.0 + b.pi_min * b.psi1 * b.mu_F);
  } else {
    b.C2 = 1.0;
  }
  const double num = b.eta * b.psi2 * b.psi2 * b.C1;
  if (b.sigma_F == 0.0 || num == 0.0) {
    b.bound_value = 0.0;
  } else {
    b.bound_value = num * b.sigma_F / (b.sigma1_sq + b.eta * b.psi2 * b.psi2 * b.C2 * b.mu_F * b.mu_F);
  }
  return b;
}

}  // namespace levyou
