#pragma once

#include "levyou/market_model.hpp"
#include "levyou/strategy_core.hpp"

namespace levyou {

/// An approximate fraction before and after clamping to Pi.
struct ApproxFraction {
  double pi = 0.0;
  /// Unconstrained value; +-inf when the approximate objective has no stationary point.
  double unclamped = 0.0;
  bool clamped = false;
};

/// Merton-type ratio (b - lambda s) / (sigma^2 + psi^2 int y^2 nu), clamped to Pi.
ApproxFraction merton_fraction(double t, double s, const MarketCoefficients& coeffs, const AdmissibleSet& adm);

/// Maximizer over Pi of the objective with every jump replaced by its mean size mu_F.
ApproxFraction jump_mean_fraction(double t, double s, const MarketCoefficients& coeffs,
                                  const AdmissibleSet& adm);

/// q(pi) = -sigma^2 psi mu_F pi^2 + (mu_F psi x - eta mu_F^2 psi^2 - sigma^2) pi + x, the
/// polynomial whose admissible root is the jump-mean fraction.
double jump_mean_polynomial(double pi, double t, double s, const MarketCoefficients& coeffs);

StrategySurface merton_surface(const MarketCoefficients& coeffs, const AdmissibleSet& adm);
StrategySurface jump_mean_surface(const MarketCoefficients& coeffs, const AdmissibleSet& adm);

struct ApproxBound {
  enum class Kind { Merton, JumpMean };
  Kind kind = Kind::Merton;
  /// +inf when a required moment is infinite.
  double bound_value = 0.0;
  CaseTag tag = CaseTag::D;
  double C0 = 0.0;
  double C = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;

  // inputs echoed for auditing
  double delta = 0.0;
  double pi_min = 0.0;
  double pi_max = 0.0;
  double m = 0.0;
  double M = 0.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
  double sigma1_sq = 0.0;
  double third_moment = 0.0;
  double mu_F = 0.0;
  double sigma_F = 0.0;
  double eta = 0.0;
};

/// Uniform bound on |pi* - pi_1|, proportional to int |y|^3 nu(dy).
ApproxBound merton_error_bound(const MarketCoefficients& coeffs, const AdmissibleSet& adm);

/// Uniform bound on |pi* - pi_2| for compound Poisson jumps, proportional to sigma_F.
ApproxBound jump_mean_error_bound(const MarketCoefficients& coeffs, const AdmissibleSet& adm);

}  // namespace levyou
