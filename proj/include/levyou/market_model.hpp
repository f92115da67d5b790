#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "levyou/levy_jump.hpp"
#include "levyou/rng.hpp"

namespace levyou {

/// Deterministic coefficient t -> value, optionally with its derivative.
class TimeFunction {
 public:
  TimeFunction() : TimeFunction(constant(0.0)) {}
  TimeFunction(std::function<double(double)> value, std::function<double(double)> derivative = {});
  static TimeFunction constant(double value);

  double operator()(double t) const { return constant_ ? level_ : value_(t); }
  /// Analytic derivative when supplied, else a central difference with step 1e-5.
  double derivative(double t) const;
  bool has_derivative() const { return constant_ || static_cast<bool>(derivative_); }
  bool is_constant() const { return constant_; }

  static constexpr double kDifferenceStep = 1e-5;

 private:
  bool constant_ = false;
  double level_ = 0.0;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
};

/// Coefficients of dS = -lambda S du + dL on [0, T], where
/// dL = b du + sigma dW + psi * (jumps of nu).
///
/// With `compensated` set, the jumps enter through the compensated measure
/// (the form used by the first-order condition). Otherwise `b` is the drift of
/// the raw jump process and the compensated-form drift is b + psi * int y nu(dy).
struct MarketCoefficients {
  double lambda = 1.0;
  TimeFunction b = TimeFunction::constant(0.0);
  TimeFunction sigma = TimeFunction::constant(0.0);
  TimeFunction psi = TimeFunction::constant(1.0);
  double psi1 = 1.0;
  double psi2 = 1.0;
  double horizon = 1.0;
  JumpMeasure jumps;
  bool compensated = true;

  /// Throws ConfigError when an invariant fails (sampled on a 257-point grid).
  void validate() const;
  /// Drift of the compensated-form SDE at t; this is the b of the optimizer.
  double compensated_drift(double t) const;
  double compensated_drift_derivative(double t) const;
  bool time_homogeneous() const;
  /// min over [0, T] of sigma(t)^2 (sampled when sigma is time dependent).
  double min_sigma_sq() const;
  /// Short hex digest of the coefficients, for provenance records.
  std::string fingerprint() const;
};

enum class CaseTag { A, B, C, D };

std::string to_string(CaseTag tag);

/// The open set of fractions keeping 1 + pi*psi*y > 0 on the support.
/// An end attached to an infinite support end is closed at 0.
struct FractionDomain {
  CaseTag tag = CaseTag::D;
  double lo = -kInfinity;
  double hi = kInfinity;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double pi) const;
  bool interior(double pi) const;
};

/// Case A/B/C/D classification and the matching fraction domain for psi bound psi2.
/// Throws DegenerateError when the support is the whole real line.
FractionDomain classify_case(const JumpMeasure& jumps, double psi2);

/// E[S(u)] given S(t) = s.
double analytic_mean(const MarketCoefficients& coeffs, double t, double s, double u);
/// Var[S(u)] given S(t) = s.
double analytic_variance(const MarketCoefficients& coeffs, double t, double u);

struct SimConfig {
  std::size_t n_paths = 1000;
  std::size_t n_steps = 24;
  std::uint64_t seed = 1;
  /// 0 = use worker_count() default.
  int workers = 0;
  bool keep_jumps = true;
};

struct JumpRecord {
  double time = 0.0;
  /// Raw size y drawn from nu; the price moves by psi(time) * size.
  double size = 0.0;
  double pre_price = 0.0;
};

/// Simulated price paths on a uniform grid plus the exact jump history.
struct PathBundle {
  std::vector<double> time_grid;
  std::size_t n_paths = 0;
  /// Path-major: prices[p * time_grid.size() + k].
  std::vector<double> prices;
  std::vector<std::vector<JumpRecord>> jumps;
  SeedRecord seed_record;

  std::size_t n_times() const { return time_grid.size(); }
  double price(std::size_t path, std::size_t k) const { return prices[path * n_times() + k]; }
  std::span<const double> path(std::size_t p) const {
    return {prices.data() + p * n_times(), n_times()};
  }
};

/// Exact-OU stepping with coefficients frozen at the left end of each step
/// and compound Poisson jumps placed at their exact arrival times.
class PathSimulator {
 public:
  PathSimulator(const MarketCoefficients& coeffs, std::vector<double> time_grid);

  const std::vector<double>& time_grid() const { return grid_; }
  /// Fills prices[0..n_times) and, if non-null, the jump history.
  void simulate(Engine& rng, double s, double* prices, std::vector<JumpRecord>* jumps) const;

 private:
  struct Step {
    double drift;
    double sigma;
  };
  double advance(double x, double dt, const Step& st, Engine& rng) const;
  double draw_size(Engine& rng) const;

  const MarketCoefficients* coeffs_;
  std::vector<double> grid_;
  std::vector<Step> steps_;
  double rate_ = 0.0;
  double density_envelope_ = 0.0;
};

std::vector<double> uniform_grid(double t, double T, std::size_t n_steps);

PathBundle simulate_paths(const MarketCoefficients& coeffs, double t, double s,
                          const SimConfig& config, const SeedRecord& seeds);
PathBundle simulate_paths(const MarketCoefficients& coeffs, double t, double s,
                          const SimConfig& config);
/// Same as simulate_paths on an arbitrary increasing grid inside [0, T];
/// config.n_steps is ignored.
PathBundle simulate_on_grid(const MarketCoefficients& coeffs, std::vector<double> grid, double s,
                            const SimConfig& config, const SeedRecord& seeds);

/// CSV with columns path_id,time,price.
void write_paths_csv(std::ostream& out, const PathBundle& bundle);

}  // namespace levyou
