#pragma once

#include <functional>
#include <limits>
#include <variant>

namespace levyou {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Closed hull [m, M] of the jump support; either end may be infinite.
struct Support {
  double m = 0.0;
  double M = 0.0;
};

/// Pareto(alpha, z0) jump sizes with density alpha z0^alpha / y^(alpha+1) on [z0, inf).
struct ParetoJump {
  double alpha = 3.0;
  double z0 = 1.0;

  void validate() const;
  double pdf(double y) const;
  double mean() const;
  double variance() const;
  /// E[Y^k]; +inf when k >= alpha.
  double raw_moment(int k) const;
  double abs_moment(int k) const { return raw_moment(k); }
  /// int_{y >= level} y^p f(y) dy, for level >= z0 and p < alpha.
  double upper_tail_moment(double p, double level) const;
  /// Inverse of the survival function: P(Y > quantile(u)) = u.
  double survival_quantile(double u) const;
  Support support() const { return {z0, kInfinity}; }
};

struct UniformJump {
  double lo = 0.0;
  double hi = 1.0;

  void validate() const;
  double pdf(double y) const;
  double raw_moment(int k) const;
  double abs_moment(int k) const;
  Support support() const { return {lo, hi}; }
};

/// All jumps have the same size.
struct PointMassJump {
  double size = 1.0;

  void validate() const;
  double raw_moment(int k) const;
  double abs_moment(int k) const;
  Support support() const { return {size, size}; }
};

/// Arbitrary probability density on a bounded interval.
struct DensityJump {
  std::function<double(double)> pdf;
  double lo = 0.0;
  double hi = 1.0;

  void validate() const;
  Support support() const { return {lo, hi}; }
};

using SizeLaw = std::variant<ParetoJump, UniformJump, PointMassJump, DensityJump>;

/// Infinite-activity Levy density on a bounded support [m, M] containing 0.
/// Near the origin the density is assumed to behave like |y|^(-1-activity_index);
/// activity_index must lie in [0, 2) so that int y^2 nu(dy) is finite.
struct LevyDensity {
  std::function<double(double)> density;
  double m = -1.0;
  double M = 1.0;
  double activity_index = 0.0;
};

struct QuadratureOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-300;
  /// Stop adding tail panels once the analytic tail bound falls below
  /// tail_rel * |accumulated value|.
  double tail_rel = 1e-12;
  unsigned max_depth = 18;
  int max_panels = 600;
};

/// The Levy measure nu driving the jump part of the price.
///
/// Three representations are supported: no jumps, compound Poisson
/// (nu = eta F with F a size law) and a general infinite-activity density.
/// Moments of order 1..3 are computed once at construction, so a
/// constructed measure is immutable and safe to share across threads.
class JumpMeasure {
 public:
  enum class Kind { None, CompoundPoisson, GeneralDensity };

  JumpMeasure();
  static JumpMeasure none();
  static JumpMeasure compound_poisson(double intensity, SizeLaw law);
  static JumpMeasure general_density(LevyDensity density);

  Kind kind() const { return kind_; }
  bool empty() const { return kind_ == Kind::None; }
  /// Jump rate eta; 0 without jumps and +inf for an infinite-activity density.
  double intensity() const;
  Support support() const { return support_; }
  const SizeLaw& size_law() const;
  const LevyDensity& levy_density() const;

  /// int y^k nu(dy), k in {1,2,3}. Infinite values are returned as +-inf.
  double moment(int k) const;
  /// int |y|^k nu(dy), k in {1,2,3}.
  double abs_moment(int k) const;
  /// Mean and variance of the jump-size law F (compound Poisson only).
  double size_mean() const;
  double size_variance() const;

  /// Density of nu with respect to Lebesgue measure (eta f for compound Poisson).
  double density(double y) const;

 private:
  void compute_moments();

  Kind kind_ = Kind::None;
  double intensity_ = 0.0;
  Support support_{};
  SizeLaw law_{};
  LevyDensity levy_{};
  double moments_[3] = {0.0, 0.0, 0.0};
  double abs_moments_[3] = {0.0, 0.0, 0.0};
};

double moment(const JumpMeasure& measure, int k);
double abs_moment(const JumpMeasure& measure, int k);

/// True when 1 + pi*psi*y > 0 for every y in the support.
bool fraction_admissible(const JumpMeasure& measure, double pi, double psi);

/// int pi psi^2 y^2 / (1 + pi psi y) nu(dy), the jump drag in the first-order condition.
double drag_integral(const JumpMeasure& measure, double pi, double psi,
                     const QuadratureOptions& opts = {});

/// int [log(1 + pi psi y) - pi psi y] nu(dy) <= 0.
double log_penalty_integral(const JumpMeasure& measure, double pi, double psi,
                            const QuadratureOptions& opts = {});

/// d/dpi of drag_integral: int psi^2 y^2 / (1 + pi psi y)^2 nu(dy).
double drag_slope_integral(const JumpMeasure& measure, double pi, double psi,
                           const QuadratureOptions& opts = {});

/// int y^2 / (1 + pi psi y) nu(dy); enters the time derivative of f*.
double exposure_integral(const JumpMeasure& measure, double pi, double psi,
                         const QuadratureOptions& opts = {});

/// Drag for Pareto sizes with psi = 1 in closed form:
/// eta * mu_F * 2F1(1, alpha-1; alpha; -1/(pi z0)).
double pareto_drag_closed_form(const ParetoJump& law, double intensity, double pi);

/// Gauss hypergeometric function on the real branch z <= 0 (and |z| < 1).
double hyp2f1(double a, double b, double c, double z);

}  // namespace levyou
