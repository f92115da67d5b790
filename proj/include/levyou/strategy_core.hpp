#pragma once

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "levyou/levy_jump.hpp"
#include "levyou/market_model.hpp"

namespace levyou {

struct SolverOptions {
  /// tol_root = root_rel * (1 + |b(t) - lambda s|).
  double root_rel = 1e-10;
  /// tol_pi = pi_rel * (pi_max - pi_min).
  double pi_rel = 1e-10;
  int max_iterations = 200;
  QuadratureOptions quadrature{};
};

/// Compact trading interval [pi_min, pi_max] inside the admissible domain.
class AdmissibleSet {
 public:
  AdmissibleSet(double pi_min, double pi_max, const JumpMeasure& jumps, double psi2);
  static AdmissibleSet for_market(const MarketCoefficients& coeffs, double pi_min, double pi_max) {
    return AdmissibleSet(pi_min, pi_max, coeffs.jumps, coeffs.psi2);
  }

  double pi_min() const { return pi_min_; }
  double pi_max() const { return pi_max_; }
  CaseTag tag() const { return domain_.tag; }
  const FractionDomain& domain() const { return domain_; }
  /// Distance from [pi_min, pi_max] to the open (finite-jump) ends of the domain;
  /// +inf when there is none.
  double delta() const { return delta_; }
  double max_abs() const { return std::max(-pi_min_, pi_max_); }
  double clamp(double pi) const { return std::min(std::max(pi, pi_min_), pi_max_); }
  bool contains(double pi) const { return pi >= pi_min_ && pi <= pi_max_; }

 private:
  double pi_min_;
  double pi_max_;
  FractionDomain domain_;
  double delta_;
};

/// (b(t) - lambda s) pi - sigma(t)^2 pi^2 / 2 + int [log(1 + pi psi y) - pi psi y] nu(dy).
double f_value(double pi, double t, double s, const MarketCoefficients& coeffs,
               const QuadratureOptions& quad = {});
/// d f / d pi.
double f_prime(double pi, double t, double s, const MarketCoefficients& coeffs,
               const QuadratureOptions& quad = {});
/// d^2 f / d pi^2 (independent of s).
double f_second(double pi, double t, const MarketCoefficients& coeffs,
                const QuadratureOptions& quad = {});

struct OptimalFraction {
  double pi = 0.0;
  bool at_boundary = false;
  int iterations = 0;
};

OptimalFraction optimal_fraction(double t, double s, const MarketCoefficients& coeffs,
                                 const AdmissibleSet& adm, const SolverOptions& opts = {});

/// The price s at which pi is the unconstrained maximizer.
double inverse_price(double t, double pi, const MarketCoefficients& coeffs,
                     const QuadratureOptions& quad = {});

struct Thresholds {
  std::vector<double> t;
  std::vector<double> s1_t;
  std::vector<double> s2_t;
  double s1 = 0.0;
  double s2 = 0.0;
};

Thresholds thresholds(const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                      const std::vector<double>& t_grid, const QuadratureOptions& quad = {});

struct FStar {
  double value = 0.0;
  double d_dt = 0.0;
  double d_ds = 0.0;
  double pi = 0.0;
};

FStar f_star(double t, double s, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
             const SolverOptions& opts = {});

/// C with |f*(t, s)| <= C (1 + |s|) on [0, T].
double f_star_growth_constant(const MarketCoefficients& coeffs, const AdmissibleSet& adm);

/// Tabulated pi*(t, s) and f*(t, s).
///
/// Nodes are uniform in pi (refined geometrically next to 0); each node's price is inverse_price, so no root
/// solves are needed. Between nodes both quantities use cubic Hermite
/// interpolation with the exact slopes d pi/ds = -lambda / (sigma^2 + drag')
/// and d f*/ds = -lambda pi. Outside [s1(t), s2(t)] the policy sits on a
/// bound and f* is evaluated exactly. Time-dependent coefficients are handled
/// by linear interpolation between time slices.
class PolicyTable {
 public:
  PolicyTable(const MarketCoefficients& coeffs, const AdmissibleSet& adm, int pi_nodes = 1025,
              int time_nodes = 0, const QuadratureOptions& quad = {});

  double pi(double t, double s) const;
  double f_star(double t, double s) const;

  /// Largest deviation from the exact solver observed at pi and time midpoints.
  double max_pi_error() const { return max_pi_error_; }
  double max_f_error() const { return max_f_error_; }

 private:
  struct Slice {
    double time;
    std::vector<double> s;       // increasing
    std::vector<double> pi;      // decreasing
    std::vector<double> dpi_ds;
    std::vector<double> f;
    double base_lo;  // f(pi_min; s) = base_lo - lambda pi_min s
    double base_hi;  // f(pi_max; s) = base_hi - lambda pi_max s
  };
  Slice build_slice(double t, const QuadratureOptions& quad) const;
  void slice_eval(const Slice& sl, double s, double& pi, double& f) const;
  void eval(double t, double s, double& pi, double& f) const;
  void measure_error(const QuadratureOptions& quad);

  std::shared_ptr<const MarketCoefficients> coeffs_;
  double pi_min_;
  double pi_max_;
  int pi_nodes_;
  std::vector<double> pi_grid_;  // decreasing
  static constexpr int kZeroRefinement = 30;
  std::vector<Slice> slices_;
  double max_pi_error_ = 0.0;
  double max_f_error_ = 0.0;
};

enum class SurfaceLabel { Exact, Merton, JumpMean, Zero };
std::string to_string(SurfaceLabel label);

/// Immutable policy (t, s) -> pi with values in the trading interval.
class StrategySurface {
 public:
  using Evaluator = std::function<double(double, double)>;
  StrategySurface(SurfaceLabel label, Evaluator eval, std::string provenance)
      : label_(label), eval_(std::move(eval)), provenance_(std::move(provenance)) {}

  double operator()(double t, double s) const { return eval_(t, s); }
  SurfaceLabel label() const { return label_; }
  const std::string& provenance() const { return provenance_; }

 private:
  SurfaceLabel label_;
  Evaluator eval_;
  std::string provenance_;
};

StrategySurface exact_surface(const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                              const SolverOptions& opts = {});
StrategySurface exact_surface(std::shared_ptr<const PolicyTable> table);
StrategySurface zero_surface();

/// Rectangular grid export: header comments describe the grid, then t,s,pi_exact rows.
void write_surface_csv(std::ostream& out, const StrategySurface& surface,
                       const std::vector<double>& t_grid, const std::vector<double>& s_grid);

}  // namespace levyou
