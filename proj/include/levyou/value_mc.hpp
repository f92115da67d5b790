#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <vector>

#include "levyou/market_model.hpp"
#include "levyou/strategy_core.hpp"

namespace levyou {

/// How f*(u, S) is evaluated along paths: by the exact solver, or through a
/// precomputed PolicyTable when one is supplied.
struct ValueOptions {
  std::shared_ptr<const PolicyTable> table;
  SolverOptions solver{};
};

struct ValueEstimate {
  double g_hat = 0.0;
  double std_err = 0.0;
  std::size_t n_paths = 0;
  double t = 0.0;
  double horizon = 0.0;
  std::size_t n_steps = 0;
  SeedRecord seed_record;
};

/// Monte Carlo estimate of g(t, s) = E int_t^T f*(u, S(u)) du, trapezoid rule on
/// the step grid with jump times as extra nodes.
ValueEstimate estimate_value(double t, double s, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                             const SimConfig& mc, const ValueOptions& opts = {});

/// Same estimator on an existing bundle (common random numbers).
ValueEstimate estimate_value(const PathBundle& paths, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                             const ValueOptions& opts = {});

/// Integral of f* along path p of the bundle; the per-path sample behind estimate_value.
double path_value(const PathBundle& paths, std::size_t p, const MarketCoefficients& coeffs,
                  const AdmissibleSet& adm, const ValueOptions& opts = {});

/// log(x) + g(t, s).
double total_value(double t, double s, double x, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                   const SimConfig& mc, const ValueOptions& opts = {});

struct WealthRun {
  std::vector<double> log_terminal_wealth;
  std::size_t positivity_violations = 0;
  SurfaceLabel label = SurfaceLabel::Zero;
  double x0 = 1.0;

  double mean() const;
  double std_err() const;
};

/// Wealth X with dX = X(u-) pi(u) dS(u) under `surface`, replayed on the given paths.
WealthRun wealth_simulate(const StrategySurface& surface, const PathBundle& paths, double x,
                          const MarketCoefficients& coeffs);
WealthRun wealth_simulate(const StrategySurface& surface, double t, double s, double x,
                          const MarketCoefficients& coeffs, const SimConfig& mc);

struct TowerReport {
  double direct = 0.0;
  double direct_se = 0.0;
  double nested = 0.0;
  double nested_se = 0.0;
  double combined_se = 0.0;
  /// (nested - direct) / combined_se.
  double discrepancy = 0.0;
  std::size_t outer_paths = 0;
  std::size_t inner_paths = 0;
};

/// Compares g(t, s) with E[int_t^{t+h} f* du + g(t+h, S(t+h))], the inner g
/// estimated per outer path with ceil(sqrt(outer)) paths.
TowerReport tower_check(double t, double s, double h, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                        const SimConfig& mc, const ValueOptions& opts = {});

struct ValuePoint {
  double t = 0.0;
  double s = 0.0;
  double g_hat = 0.0;
  double std_err = 0.0;
};

std::vector<ValuePoint> value_surface(const std::vector<double>& t_grid, const std::vector<double>& s_grid,
                                      const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                                      const SimConfig& mc, const ValueOptions& opts = {});

/// path_id,log_terminal_wealth
void write_wealth_csv(std::ostream& out, const WealthRun& run);
/// t,s,g_hat,std_err
void write_value_csv(std::ostream& out, const std::vector<ValuePoint>& points);

}  // namespace levyou
