#pragma once

#include <optional>
#include <string>
#include <vector>

#include "levyou/market_model.hpp"
#include "levyou/strategy_core.hpp"

namespace levyou {

/// Values that replace a preset's defaults. b takes precedence over b_frac.
struct PresetOverrides {
  std::optional<double> b;
  std::optional<double> b_frac;
  std::optional<double> pi_min;
  std::optional<double> pi_max;
  std::optional<bool> compensated;
};

struct Preset {
  std::string name;
  std::string description;
  MarketCoefficients coeffs;
  double pi_min = 0.0;
  double pi_max = 1.0;
  /// Drift as a multiple of mu_L = int y nu(dy); NaN when b was set directly.
  double b_frac = 0.0;
  /// Free-form lines shown by describe-preset.
  std::vector<std::string> notes;

  AdmissibleSet admissible() const { return AdmissibleSet::for_market(coeffs, pi_min, pi_max); }
  double mu_L() const { return coeffs.jumps.empty() ? 0.0 : coeffs.jumps.moment(1); }
  double b() const { return coeffs.b(0.0); }
};

std::vector<std::string> preset_names();

/// Throws ConfigError for an unknown name or an invalid override.
Preset make_preset(const std::string& name, const PresetOverrides& overrides = {});

/// Multi-line human-readable summary.
std::string describe(const Preset& preset);

/// Average over one period 2k of theta (2 / (1 + |sin(pi (t - tau) / k)|) - 1)^d.
double seasonal_intensity_mean(double theta, double k, double tau, double d);

}  // namespace levyou
