#include <gtest/gtest.h>

#include <cmath>

#include "levyou/errors.hpp"
#include "levyou/levy_jump.hpp"

using namespace levyou;

namespace {

const ParetoJump kPareto{2.5406, 0.3648};
const double kEta = 3.7249 / 24.0;

JumpMeasure pareto_measure() { return JumpMeasure::compound_poisson(kEta, kPareto); }
JumpMeasure uniform_measure() { return JumpMeasure::compound_poisson(0.5, UniformJump{-0.5, 1.0}); }

// |y|^(-1.5) on [-1, 1]: infinite activity, symmetric
JumpMeasure stable_like() {
  return JumpMeasure::general_density({[](double y) { return std::pow(std::abs(y), -1.5); }, -1.0, 1.0, 0.5});
}

// Direct partial sums, long double, for |z| < 0.5.
double series_oracle(double a, double b, double c, double z) {
  long double term = 1.0L, sum = 1.0L;
  for (int n = 0; n < 2000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0L)) * z;
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST(ParetoLaw, MomentsMatchClosedForms) {
  EXPECT_NEAR(kPareto.mean(), 0.601590860703621965, 1e-15);
  EXPECT_NEAR(kPareto.raw_moment(2), 0.625417330788013319, 1e-15);
  EXPECT_TRUE(std::isinf(kPareto.raw_moment(3)));
  const JumpMeasure nu = pareto_measure();
  EXPECT_NEAR(nu.moment(2), 0.0970673756438446171, 1e-15);
  EXPECT_NEAR(nu.moment(1), 0.0933694082097883941, 1e-15);
  EXPECT_TRUE(std::isinf(nu.abs_moment(3)));
  EXPECT_EQ(nu.support().m, 0.3648);
  EXPECT_TRUE(std::isinf(nu.support().M));
}

TEST(ParetoLaw, SurvivalQuantileInvertsTail) {
  for (double u : {0.9, 0.5, 0.01, 1e-6}) {
    const double y = kPareto.survival_quantile(u);
    EXPECT_NEAR(std::pow(kPareto.z0 / y, kPareto.alpha), u, 1e-13 * u);
  }
}

TEST(ParetoLaw, RejectsInfiniteVariance) {
  EXPECT_THROW((ParetoJump{2.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((ParetoJump{3.0, -1.0}.validate()), ConfigError);
}

TEST(DragIntegral, ParetoMatchesHighPrecisionQuadrature) {
  // reference values from 30-digit adaptive quadrature
  const JumpMeasure nu = pareto_measure();
  const std::pair<double, double> cases[] = {
      {0.01, 0.000894909831142249184}, {0.1, 0.00734358147430868723}, {0.5, 0.0252878086825443064},
      {1.0, 0.0384190918413851432},    {10.0, 0.080368378696395869},  {100.0, 0.0918472569920171262}};
  for (auto [pi, ref] : cases) EXPECT_NEAR(drag_integral(nu, pi, 1.0), ref, 1e-10 * ref) << "pi=" << pi;
}

TEST(DragIntegral, ClosedFormAgreesWithQuadrature) {
  const JumpMeasure nu = pareto_measure();
  for (double pi : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double q = drag_integral(nu, pi, 1.0);
    EXPECT_NEAR(pareto_drag_closed_form(kPareto, kEta, pi), q, 1e-9 * q) << "pi=" << pi;
  }
}

TEST(OtherIntegrals, ParetoReferenceValues) {
  const JumpMeasure nu = pareto_measure();
  EXPECT_NEAR(log_penalty_integral(nu, 0.5, 1.0), -0.00728210008570136096, 1e-12);
  EXPECT_NEAR(log_penalty_integral(nu, 10.0, 1.0), -0.644059587404498706, 1e-10);
  EXPECT_NEAR(log_penalty_integral(nu, 0.01, 1.0), -4.55265132971395746e-06, 1e-16);
  EXPECT_NEAR(drag_slope_integral(nu, 0.5, 1.0), 0.0335370402998490217, 1e-12);
  EXPECT_NEAR(drag_slope_integral(nu, 0.01, 1.0), 0.0855859169494019977, 1e-12);
  EXPECT_NEAR(exposure_integral(nu, 0.5, 1.0), 0.0505756173650886129, 1e-12);
}

TEST(OtherIntegrals, PenaltyIsNonPositiveAndVanishesAtZero) {
  const JumpMeasure nu = uniform_measure();
  EXPECT_EQ(log_penalty_integral(nu, 0.0, 1.0), 0.0);
  EXPECT_EQ(drag_integral(nu, 0.0, 1.0), 0.0);
  for (double pi : {-0.9, -0.5, 0.3, 1.0, 1.9}) EXPECT_LE(log_penalty_integral(nu, pi, 1.0), 0.0);
}

TEST(OtherIntegrals, UniformReferenceValues) {
  const JumpMeasure nu = uniform_measure();
  EXPECT_NEAR(nu.moment(1), 0.125, 1e-15);
  EXPECT_NEAR(nu.moment(2), 0.125, 1e-15);
  EXPECT_NEAR(nu.moment(3), 0.078125, 1e-15);
  EXPECT_NEAR(nu.abs_moment(3), 0.0885416666666666667, 1e-15);
  const double drag[][2] = {{-0.5, -0.0967209758322067536}, {0.5, 0.0491962407465937459},
                            {1.0, 0.0870981203732968729}, {1.9, 0.236767591001516098},
                            {-0.9, -0.419917139681699061}};
  for (auto& c : drag) EXPECT_NEAR(drag_integral(nu, c[0], 1.0), c[1], 1e-11) << "pi=" << c[0];
  const double pen[][2] = {{-0.5, -0.0204979803848434337}, {1.9, -0.169526710358641799},
                           {-0.9, -0.102675679212405568}};
  for (auto& c : pen) EXPECT_NEAR(log_penalty_integral(nu, c[0], 1.0), c[1], 1e-11) << "pi=" << c[0];
}

TEST(OtherIntegrals, PointMassIsExact) {
  const JumpMeasure nu = JumpMeasure::compound_poisson(0.7, PointMassJump{-0.4});
  const double pi = 1.3, psi = 0.8, x = pi * psi * -0.4;
  EXPECT_NEAR(drag_integral(nu, pi, psi), 0.7 * pi * psi * psi * 0.16 / (1.0 + x), 1e-15);
  EXPECT_NEAR(log_penalty_integral(nu, pi, psi), 0.7 * (std::log1p(x) - x), 1e-15);
}

TEST(OtherIntegrals, InfiniteActivityDensity) {
  const JumpMeasure nu = stable_like();
  EXPECT_TRUE(std::isinf(nu.intensity()));
  EXPECT_NEAR(nu.moment(2), 4.0 / 3.0, 1e-10);
  EXPECT_NEAR(nu.abs_moment(3), 0.8, 1e-10);
  EXPECT_NEAR(nu.moment(1), 0.0, 1e-10);
  EXPECT_NEAR(drag_integral(nu, 0.5, 1.0), 0.752061457826715659, 1e-9);
  EXPECT_NEAR(drag_integral(nu, -0.7, 1.0), -1.22687051820750430, 1e-9);
  EXPECT_NEAR(drag_integral(nu, 0.05, 1.0), 0.0667382090832042430, 1e-10);
  EXPECT_NEAR(log_penalty_integral(nu, 0.5, 1.0), -0.176697312923153803, 1e-9);
  EXPECT_NEAR(log_penalty_integral(nu, -0.7, 1.0), -0.370929618962974822, 1e-9);
}

TEST(DragIntegral, AgreesWithLogSpaceRiemannSum) {
  // midpoint rule in u = log y up to y = 1e6, tail beyond added analytically
  const JumpMeasure nu = pareto_measure();
  const double pi = 2.0;
  const double u0 = std::log(kPareto.z0), u1 = std::log(1e6);
  const int n = 400000;
  const double h = (u1 - u0) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = std::exp(u0 + (i + 0.5) * h);
    sum += pi * y * y / (1.0 + pi * y) * kPareto.pdf(y) * y * h;
  }
  sum += kPareto.upper_tail_moment(1.0, 1e6);  // pi y^2/(1+pi y) ~ y for large y
  EXPECT_NEAR(drag_integral(nu, pi, 1.0), kEta * sum, 1e-6 * kEta * sum);
}

TEST(Admissibility, BindingEndOfSupport) {
  const JumpMeasure nu = uniform_measure();  // admissible fractions (-1, 2)
  EXPECT_TRUE(fraction_admissible(nu, 1.99, 1.0));
  EXPECT_FALSE(fraction_admissible(nu, 2.0, 1.0));
  EXPECT_TRUE(fraction_admissible(nu, -0.99, 1.0));
  EXPECT_FALSE(fraction_admissible(nu, -1.0, 1.0));
  EXPECT_THROW(drag_integral(nu, 2.5, 1.0), AdmissibilityError);
  const JumpMeasure par = pareto_measure();
  EXPECT_TRUE(fraction_admissible(par, 1e6, 1.0));
  EXPECT_FALSE(fraction_admissible(par, -1e-3, 1.0));
}

TEST(Hypergeometric, ReferenceValues) {
  const double b = 1.5406, c = 2.5406;
  const double cases[][2] = {{-10.0, 0.176983347961271918}, {-0.3, 0.849880265034051516},
                             {-274.12, 0.00958470887184026875}, {-0.9, 0.663379505319998253},
                             {-0.01, 0.993979253953664758}, {-1e6, 2.84701515237479634e-06},
                             {0.3, 1.23326734604664658}, {0.45, 1.41048630393969807}};
  for (auto& z : cases) EXPECT_NEAR(hyp2f1(1.0, b, c, z[0]), z[1], 1e-12 * z[1]) << "z=" << z[0];
  EXPECT_NEAR(hyp2f1(0.5, 1.5, 3.0, -4.0), 0.606547168906990291, 1e-12);
  EXPECT_NEAR(hyp2f1(2.0, 3.0, 5.0, -0.7), 0.511571611484394349, 1e-12);
  EXPECT_NEAR(hyp2f1(1.0, 2.0, 3.0, -20.0), 0.0847773878113828850, 1e-12);
}

TEST(Hypergeometric, MatchesBruteForceSeries) {
  for (double z : {-0.49, -0.2, 0.0, 0.1, 0.49}) {
    EXPECT_NEAR(hyp2f1(1.0, 1.5406, 2.5406, z), series_oracle(1.0, 1.5406, 2.5406, z), 1e-14);
    EXPECT_NEAR(hyp2f1(0.3, -1.7, 4.2, z), series_oracle(0.3, -1.7, 4.2, z), 1e-14);
  }
}

TEST(Hypergeometric, RejectsUnsupportedArguments) {
  EXPECT_THROW(hyp2f1(1.0, 1.0, -2.0, -0.3), DomainError);
  EXPECT_THROW(hyp2f1(1.0, 1.0, 2.0, 0.7), DomainError);
  EXPECT_THROW(hyp2f1(1.0, 1.0, 2.0, 1.0), DomainError);
}

TEST(Construction, RejectsBadInput) {
  EXPECT_THROW(JumpMeasure::compound_poisson(-1.0, kPareto), ConfigError);
  EXPECT_THROW(JumpMeasure::compound_poisson(1.0, UniformJump{1.0, 0.0}), ConfigError);
  EXPECT_THROW(JumpMeasure::compound_poisson(1.0, PointMassJump{0.0}), ConfigError);
  EXPECT_THROW(JumpMeasure::compound_poisson(1.0, DensityJump{[](double) { return 2.0; }, 0.0, 1.0}),
               ConfigError);
  EXPECT_THROW(JumpMeasure::general_density({[](double) { return 1.0; }, 0.1, 1.0, 0.0}), ConfigError);
  EXPECT_THROW(JumpMeasure::general_density({[](double) { return 1.0; }, -1.0, 1.0, 2.0}), ConfigError);
}

TEST(Construction, DensityLawMoments) {
  // triangular density 2y on [0, 1]
  const JumpMeasure nu = JumpMeasure::compound_poisson(2.0, DensityJump{[](double y) { return 2.0 * y; }, 0.0, 1.0});
  EXPECT_NEAR(nu.moment(1), 2.0 * 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(nu.moment(2), 2.0 * 0.5, 1e-10);
  EXPECT_NEAR(nu.size_mean(), 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(nu.size_variance(), 0.5 - 4.0 / 9.0, 1e-10);
  // exact: int 2y * y^2/(1+y) dy on [0,1] = 2 (1/3 - 1/2 + 1 - log 2)
  EXPECT_NEAR(drag_integral(nu, 1.0, 1.0), 2.0 * 2.0 * (1.0 / 3.0 - 0.5 + 1.0 - std::log(2.0)), 1e-10);
}

TEST(DragIntegral, LargeFractionLimitIsMuL) {
  const JumpMeasure nu = pareto_measure();
  const double mu_L = nu.moment(1);
  EXPECT_NEAR(drag_integral(nu, 1e6, 1.0), mu_L, 0.01 * mu_L);
}

TEST(DragIntegral, MonotoneAndSignConsistent) {
  const JumpMeasure uni = uniform_measure();
  double prev = -kInfinity;
  for (double pi = -0.95; pi < 1.95; pi += 0.05) {
    const double d = drag_integral(uni, pi, 1.0);
    EXPECT_GT(d, prev) << "pi=" << pi;
    EXPECT_GE(d * pi, 0.0);
    EXPECT_LE(log_penalty_integral(uni, pi, 1.0), 0.0);
    prev = d;
  }
  const JumpMeasure par = pareto_measure();
  prev = 0.0;
  for (double pi : {1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 1e3}) {
    const double d = drag_integral(par, pi, 1.0);
    EXPECT_GT(d, prev);
    prev = d;
  }
}

TEST(DragIntegral, ClosedFormCoefficientsOfThePreset) {
  // s = b/lambda - (eta mu_F / lambda) 2F1(1, alpha-1; alpha; -1/(z0 pi))
  const double lambda = 0.3333 / 24.0;
  const JumpMeasure nu = pareto_measure();
  EXPECT_NEAR(nu.moment(1) / lambda, 6.7233, 5e-4);
  EXPECT_NEAR(1.0 / kPareto.z0, 2.7412, 5e-4);
  EXPECT_THROW(pareto_drag_closed_form(kPareto, kEta, 0.0), DomainError);
  EXPECT_THROW(pareto_drag_closed_form(kPareto, kEta, -1.0), DomainError);
  EXPECT_LT(pareto_drag_closed_form(kPareto, kEta, 1e-9), 1e-9);
}

TEST(LogPenalty, AgreesWithRiemannSum) {
  const JumpMeasure nu = pareto_measure();
  const double pi = 0.5;
  const double u0 = std::log(kPareto.z0), u1 = std::log(1e6);
  const int n = 400000;
  const double h = (u1 - u0) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = std::exp(u0 + (i + 0.5) * h);
    sum += (std::log1p(pi * y) - pi * y) * kPareto.pdf(y) * y * h;
  }
  EXPECT_NEAR(log_penalty_integral(nu, pi, 1.0), kEta * sum, 1e-5);
}

TEST(Moments, AgreeWithRiemannSums) {
  const double u0 = std::log(kPareto.z0), u1 = std::log(1e8);
  const int n = 400000;
  const double h = (u1 - u0) / n;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = std::exp(u0 + (i + 0.5) * h);
    const double w = kPareto.pdf(y) * y * h;
    m1 += y * w;
    m2 += y * y * w;
  }
  EXPECT_NEAR(kPareto.raw_moment(1), m1, 1e-5 * m1);
  // truncation at 1e8 drops a tail of relative size ~ 1e-8^(0.54)
  EXPECT_NEAR(kPareto.raw_moment(2), m2, 1e-4 * m2);
  const JumpMeasure none = JumpMeasure::none();
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(none.moment(k), 0.0);
  EXPECT_EQ(drag_integral(none, 5.0, 1.0), 0.0);
  EXPECT_EQ(log_penalty_integral(none, 5.0, 1.0), 0.0);
}

TEST(Hypergeometric, ClassicalIdentities) {
  EXPECT_EQ(hyp2f1(0.7, 1.3, 2.1, 0.0), 1.0);
  EXPECT_NEAR(hyp2f1(1.0, 1.0, 2.0, -1.0), std::log(2.0), 1e-13);
  for (double z : {-0.3, -3.0, -40.0}) EXPECT_NEAR(hyp2f1(1.0, 1.0, 2.0, z), -std::log1p(-z) / z, 1e-13);
}

TEST(Hypergeometric, MatchesTransformedSeriesAtMinusTen) {
  // Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)), summed term by term
  const double a = 1.0, b = 1.5406, c = 2.5406, z = -10.0;
  const long double w = z / (z - 1.0);
  long double term = 1.0L, sum = 1.0L;
  for (int n = 0; n < 1000000; ++n) {
    term *= (a + n) * (c - b + n) / ((c + n) * (n + 1.0L)) * w;
    sum += term;
  }
  const double ref = static_cast<double>(std::pow(1.0L - z, -a) * sum);
  EXPECT_NEAR(hyp2f1(a, b, c, z), ref, 1e-10 * ref);
}
