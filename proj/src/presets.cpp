#include "levyou/presets.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levyou/csv.hpp"
#include "levyou/errors.hpp"
#include "levyou/strategy_approx.hpp"

namespace levyou {

namespace {

// Daily calibration of the spike component, rescaled to hours.
constexpr double kHoursPerDay = 24.0;
constexpr double kDailyReversion = 0.3333;
constexpr double kDailySpikeRate = 3.7249;
constexpr double kParetoAlpha = 2.5406;
constexpr double kParetoScale = 0.3648;
constexpr double kSeasonTheta = 14.0163;
constexpr double kSeasonK = 0.5;
constexpr double kSeasonTau = 0.42;
constexpr double kSeasonD = 1.0359;

Preset benth2012() {
  Preset p;
  p.name = "benth2012";
  p.description =
      "Spike component of a two-factor electricity spot model: Pareto jumps, no diffusion, hourly units";
  MarketCoefficients& c = p.coeffs;
  c.lambda = kDailyReversion / kHoursPerDay;
  c.sigma = TimeFunction::constant(0.0);
  c.psi = TimeFunction::constant(1.0);
  c.psi1 = c.psi2 = 1.0;
  c.horizon = kHoursPerDay;
  c.jumps = JumpMeasure::compound_poisson(kDailySpikeRate / kHoursPerDay, ParetoJump{kParetoAlpha, kParetoScale});
  c.compensated = true;
  p.pi_min = 0.0;
  p.pi_max = 10.0;
  p.b_frac = 0.8;
  p.notes = {
      "time unit: hour (daily calibration divided by C = 24)",
      "lambda = 0.3333 / 24 per hour, eta = 3.7249 / 24 spikes per hour",
      "b is not part of the calibration; the default 0.8 * mu_L is arbitrary",
  };
  return p;
}

Preset gaussian() {
  Preset p;
  p.name = "gaussian";
  p.description = "Mean-reverting price without jumps (closed-form optimal fraction)";
  MarketCoefficients& c = p.coeffs;
  c.lambda = kDailyReversion / kHoursPerDay;
  c.sigma = TimeFunction::constant(0.1);
  c.psi = TimeFunction::constant(0.0);
  c.psi1 = c.psi2 = 0.0;
  c.horizon = kHoursPerDay;
  c.jumps = JumpMeasure::none();
  p.pi_min = -10.0;
  p.pi_max = 10.0;
  p.b_frac = std::numeric_limits<double>::quiet_NaN();
  c.b = TimeFunction::constant(0.05);
  p.notes = {"time unit: hour", "no jumps: pi* = clamp((b - lambda s) / sigma^2, Pi)"};
  return p;
}

Preset uniform_two_sided() {
  Preset p;
  p.name = "uniform-a";
  p.description = "Two-sided bounded jumps, sizes uniform on [-0.5, 1], plus a small diffusion";
  MarketCoefficients& c = p.coeffs;
  c.lambda = kDailyReversion / kHoursPerDay;
  c.sigma = TimeFunction::constant(0.1);
  c.psi = TimeFunction::constant(1.0);
  c.psi1 = c.psi2 = 1.0;
  c.horizon = kHoursPerDay;
  c.jumps = JumpMeasure::compound_poisson(0.5, UniformJump{-0.5, 1.0});
  c.compensated = true;
  p.pi_min = -0.5;
  p.pi_max = 1.0;
  p.b_frac = std::numeric_limits<double>::quiet_NaN();
  c.b = TimeFunction::constant(0.05);
  p.notes = {"time unit: hour", "admissible fractions (-1, 2); Pi = [-0.5, 1] keeps delta = 0.5"};
  return p;
}

}  // namespace

std::vector<std::string> preset_names() { return {"benth2012", "gaussian", "uniform-a"}; }

Preset make_preset(const std::string& name, const PresetOverrides& ov) {
  Preset p;
  if (name == "benth2012") {
    p = benth2012();
  } else if (name == "gaussian") {
    p = gaussian();
  } else if (name == "uniform-a") {
    p = uniform_two_sided();
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  if (ov.compensated) p.coeffs.compensated = *ov.compensated;
  if (ov.pi_min) p.pi_min = *ov.pi_min;
  if (ov.pi_max) p.pi_max = *ov.pi_max;
  if (ov.b) {
    p.coeffs.b = TimeFunction::constant(*ov.b);
    p.b_frac = std::numeric_limits<double>::quiet_NaN();
  } else if (ov.b_frac || std::isfinite(p.b_frac)) {
    if (p.coeffs.jumps.empty()) throw ConfigError("--b-frac needs a preset with jumps (mu_L = 0 here)");
    p.b_frac = ov.b_frac ? *ov.b_frac : p.b_frac;
    p.coeffs.b = TimeFunction::constant(p.b_frac * p.mu_L());
  }
  p.coeffs.validate();
  (void)p.admissible();
  return p;
}

double seasonal_intensity_mean(double theta, double k, double tau, double d) {
  (void)tau;  // a full period is averaged, so the phase drops out
  auto e = [&](double u) {
    const double base = 2.0 / (1.0 + std::sin(std::numbers::pi * u / k)) - 1.0;
    return theta * std::pow(base, d);
  };
  // |sin| has period k, so the mean over 2k equals the mean over one hump
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(e, 0.0, k, 15, 1e-13) / k;
}

std::string describe(const Preset& p) {
  std::ostringstream os;
  const MarketCoefficients& c = p.coeffs;
  const AdmissibleSet adm = p.admissible();
  os << "preset: " << p.name << "\n";
  os << "description: " << p.description << "\n";
  for (const auto& n : p.notes) os << "note: " << n << "\n";
  os << "horizon T: " << format_double(c.horizon) << "\n";
  os << "lambda: " << format_double(c.lambda) << "\n";
  os << "b: " << format_double(p.b());
  if (std::isfinite(p.b_frac)) os << " (" << format_double(p.b_frac) << " * mu_L)";
  os << "\n";
  os << "sigma: " << format_double(c.sigma(0.0)) << "\n";
  os << "psi: " << format_double(c.psi(0.0)) << " in [" << format_double(c.psi1) << ", " << format_double(c.psi2)
     << "]\n";
  os << "drift convention: "
     << (c.compensated ? "compensated (b is the drift of the compensated jump form)"
                       : "raw (b is the drift of the uncompensated jump process)")
     << "\n";
  if (!c.jumps.empty()) {
    os << "jump intensity eta: " << format_double(c.jumps.intensity()) << "\n";
    if (const auto* par = std::get_if<ParetoJump>(&c.jumps.size_law())) {
      os << "jump sizes: Pareto(alpha=" << format_double(par->alpha) << ", z0=" << format_double(par->z0) << ")\n";
      os << "drag coefficient eta*mu_F/lambda: " << format_double(c.jumps.moment(1) / c.lambda) << "\n";
      os << "hypergeometric argument scale 1/z0: " << format_double(1.0 / par->z0) << "\n";
      os << "seasonal spike rate mean (theta=14.0163, k=0.5, tau=0.42, d=1.0359): "
         << format_double(seasonal_intensity_mean(kSeasonTheta, kSeasonK, kSeasonTau, kSeasonD)) << " per day\n";
    } else if (const auto* uni = std::get_if<UniformJump>(&c.jumps.size_law())) {
      os << "jump sizes: Uniform[" << format_double(uni->lo) << ", " << format_double(uni->hi) << "]\n";
    }
    os << "jump support: [" << format_double(c.jumps.support().m) << ", " << format_double(c.jumps.support().M)
       << "]\n";
    os << "mu_F: " << format_double(c.jumps.size_mean()) << "\n";
    os << "size second moment: " << format_double(c.jumps.moment(2) / c.jumps.intensity()) << "\n";
    os << "mu_L: " << format_double(p.mu_L()) << "\n";
    os << "sigma_L^2: " << format_double(c.jumps.moment(2)) << "\n";
  }
  const FractionDomain& d = adm.domain();
  os << "case: " << to_string(adm.tag()) << "\n";
  os << "admissible fractions: " << (d.lo_closed ? "[" : "(") << format_double(d.lo) << ", " << format_double(d.hi)
     << (d.hi_closed ? "]" : ")") << "\n";
  os << "Pi: [" << format_double(adm.pi_min()) << ", " << format_double(adm.pi_max()) << "]\n";
  os << "delta: " << format_double(adm.delta()) << "\n";
  const Thresholds th = thresholds(c, adm, {0.0});
  os << "thresholds s1, s2: " << format_double(th.s1) << ", " << format_double(th.s2) << "\n";
  os << "reversion level b/lambda: " << format_double(c.compensated_drift(0.0) / c.lambda) << "\n";
  if (adm.tag() != CaseTag::D) {
    os << "merton error bound: " << format_double(merton_error_bound(c, adm).bound_value) << "\n";
    if (c.jumps.kind() == JumpMeasure::Kind::CompoundPoisson) {
      os << "jump-mean error bound: " << format_double(jump_mean_error_bound(c, adm).bound_value) << "\n";
    }
  }
  return os.str();
}

}  // namespace levyou
