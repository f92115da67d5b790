#include "levyou/levy_jump.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levyou/errors.hpp"

namespace levyou {

namespace {

constexpr double kPanelGrowth = 4.0;

bool is_finite(double x) { return std::isfinite(x); }

// log(1 + x) - x without cancellation for small |x|.
double log1p_minus_x(double x) {
  if (std::abs(x) < 1e-3) {
    double term = -x * x / 2.0;
    double sum = term;
    double power = x * x;
    for (int n = 3; n <= 9; ++n) {
      power *= x;
      term = ((n % 2 == 1) ? 1.0 : -1.0) * power / n;
      sum += term;
    }
    return sum;
  }
  return std::log1p(x) - x;
}

// ---------------------------------------------------------------------------
// Integrands. Each one knows
//   * its value g(y),
//   * a majorant of int_{|y| >= level} |g| dF built from tail moments of F
//     (valid on tails where pi*psi*y >= 0, which admissibility forces),
//   * its second-order behaviour at the origin, g(y) = c2 y^2 + O(|y|^3),
//     with a bound on the cubic remainder coefficient for |y| <= eps.
// ---------------------------------------------------------------------------

struct DragIntegrand {
  double pi, psi;
  double x_scale() const { return pi * psi; }
  double operator()(double y) const {
    double x = pi * psi * y;
    return pi * psi * psi * y * y / (1.0 + x);
  }
  template <class Tail>
  double tail_bound(const Tail& tail, double level) const {
    double linear = std::abs(psi) * tail(1.0, level);
    double quadratic = std::abs(pi) * psi * psi * tail(2.0, level);
    return std::min(linear, quadratic);
  }
  double c2() const { return pi * psi * psi; }
  double remainder(double eps) const {
    double a = std::abs(pi * psi);
    return pi * pi * std::abs(psi * psi * psi) / (1.0 - a * eps);
  }
};

struct LogPenaltyIntegrand {
  double pi, psi;
  double x_scale() const { return pi * psi; }
  double operator()(double y) const { return log1p_minus_x(pi * psi * y); }
  template <class Tail>
  double tail_bound(const Tail& tail, double level) const {
    double a = std::abs(pi * psi);
    return std::min(a * tail(1.0, level), 0.5 * a * a * tail(2.0, level));
  }
  double c2() const { return -0.5 * pi * pi * psi * psi; }
  double remainder(double eps) const {
    double a = std::abs(pi * psi);
    return a * a * a / (3.0 * (1.0 - a * eps));
  }
};

struct DragSlopeIntegrand {
  double pi, psi;
  double x_scale() const { return pi * psi; }
  double operator()(double y) const {
    double d = 1.0 + pi * psi * y;
    return psi * psi * y * y / (d * d);
  }
  template <class Tail>
  double tail_bound(const Tail& tail, double level) const {
    double quadratic = psi * psi * tail(2.0, level);
    if (pi == 0.0) return quadratic;
    return std::min(quadratic, tail(0.0, level) / (pi * pi));
  }
  double c2() const { return psi * psi; }
  double remainder(double eps) const {
    double a = std::abs(pi * psi);
    double d = 1.0 - a * eps;
    return psi * psi * a * (2.0 + a * eps) / (d * d);
  }
};

struct ExposureIntegrand {
  double pi, psi;
  double x_scale() const { return pi * psi; }
  double operator()(double y) const { return y * y / (1.0 + pi * psi * y); }
  template <class Tail>
  double tail_bound(const Tail& tail, double level) const {
    double quadratic = tail(2.0, level);
    double a = std::abs(pi * psi);
    if (a == 0.0) return quadratic;
    return std::min(quadratic, tail(1.0, level) / a);
  }
  double c2() const { return 1.0; }
  double remainder(double eps) const {
    double a = std::abs(pi * psi);
    return a / (1.0 - a * eps);
  }
};

struct PowerIntegrand {
  int k;
  bool absolute;
  double x_scale() const { return 0.0; }
  double operator()(double y) const {
    double v = std::pow(std::abs(y), k);
    if (!absolute && y < 0.0 && (k % 2 == 1)) v = -v;
    return v;
  }
  template <class Tail>
  double tail_bound(const Tail& tail, double level) const {
    return tail(static_cast<double>(k), level);
  }
};

// ---------------------------------------------------------------------------
// Panel quadrature
// ---------------------------------------------------------------------------

template <class H>
double gk_panel(const H& h, double a, double b, const QuadratureOptions& o) {
  if (!(b > a)) return 0.0;
  // Boost's error estimate degrades on very short intervals, so every panel is mapped onto [0, 1].
  const double w = b - a;
  auto unit = [&](double u) { return w * h(a + w * u); };
  double err = 0.0;
  double l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      unit, 0.0, 1.0, o.max_depth, o.rel_tol, &err, &l1);
  if (!is_finite(v)) {
    throw QuadratureError("non-finite panel integral on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  if (err > 1e3 * std::max(o.rel_tol * l1, o.abs_tol) && err > 1e-14 * l1) {
    throw QuadratureError("quadrature tolerance not met on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  return v;
}

// Panels graded toward both ends of [a, b]; extra grading where 1 + x_scale*y
// approaches zero so the near-singular end of the integrand is resolved.
template <class H>
double graded_integral(const H& h, double a, double b, double x_scale,
                       const QuadratureOptions& o) {
  if (!(b > a)) return 0.0;
  const double width = b - a;
  std::vector<double> pts{a, b};
  if (a < 0.0 && b > 0.0) pts.push_back(0.0);
  for (int j = 1; j <= 6; ++j) {
    double off = width * std::ldexp(1.0, -j);
    pts.push_back(a + off);
    pts.push_back(b - off);
  }
  auto grade_end = [&](double e, double dir) {
    if (x_scale == 0.0) return;
    double gap = 1.0 + x_scale * e;
    if (!(gap > 0.0) || gap >= 0.1) return;
    double d = gap / std::abs(x_scale);
    for (double off = d; off < 0.5 * width; off *= 2.0) pts.push_back(e + dir * off);
  };
  grade_end(a, 1.0);
  grade_end(b, -1.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] < a || pts[i + 1] > b) continue;
    sum += gk_panel(h, pts[i], pts[i + 1], o);
  }
  return sum;
}

// int_a^inf g(y) pdf(y) dy with geometric panels and an analytic tail stop.
template <class G, class Pdf, class Tail>
double density_integral(const G& g, const Pdf& pdf, double a, double b, const Tail& tail,
                        const QuadratureOptions& o) {
  auto h = [&](double y) {
    double p = pdf(y);
    return p == 0.0 ? 0.0 : g(y) * p;
  };
  if (is_finite(b)) return graded_integral(h, a, b, g.x_scale(), o);
  if (!(a > 0.0)) throw QuadratureError("unbounded support must start at a positive level");

  double accum = 0.0;
  double level = a;
  // first panel carries the density kink at the lower end
  double next = a * kPanelGrowth;
  accum += graded_integral(h, level, next, g.x_scale(), o);
  level = next;
  for (int panel = 0;; ++panel) {
    double bound = g.tail_bound(tail, level);
    if (bound <= o.tail_rel * std::abs(accum) + o.abs_tol) break;
    if (panel >= o.max_panels) throw QuadratureError("tail truncation did not converge");
    next = level * kPanelGrowth;
    accum += gk_panel(h, level, next, o);
    level = next;
  }
  return accum;
}

// int over (0, eps] (side = +1) or [-eps, 0) (side = -1) of h, by panels
// halving toward the origin; h must be integrable there.
template <class H>
double near_zero_integral(const H& h, double eps, double side, const QuadratureOptions& o) {
  double accum = 0.0;
  double hi = eps;
  double prev = 0.0;
  for (int panel = 0; panel < 4000; ++panel) {
    double lo = 0.5 * hi;
    double v = side > 0 ? gk_panel(h, lo, hi, o) : gk_panel(h, -hi, -lo, o);
    accum += v;
    if (panel >= 3 && prev != 0.0) {
      double ratio = std::abs(v / prev);
      if (ratio < 0.999) {
        double rest = std::abs(v) * ratio / (1.0 - ratio);
        if (rest <= o.rel_tol * std::abs(accum) + o.abs_tol) return accum;
      }
    }
    if (v == 0.0 && panel > 3) return accum;
    prev = v;
    hi = lo;
    if (hi < 1e-300) break;
  }
  throw QuadratureError("small-jump integral did not converge (activity index too close to 2?)");
}

template <class G>
double levy_integral_taylor(const LevyDensity& lv, const G& g, const QuadratureOptions& o) {
  const double c2 = g.c2();
  const double extent = std::max(-lv.m, lv.M);
  const double a = std::abs(g.x_scale());
  double eps = 0.1 * extent;
  if (a > 0.0) eps = std::min(eps, 0.5 / a);
  if (c2 != 0.0) {
    while (g.remainder(eps) * eps > o.rel_tol * std::abs(c2) && eps > 1e-250) eps *= 0.5;
  }
  auto h = [&](double y) {
    double d = lv.density(y);
    return d == 0.0 ? 0.0 : g(y) * d;
  };
  auto second = [&](double y) { return y * y * lv.density(y); };

  double sum = 0.0;
  // Taylor region (-eps, eps)
  double s2 = 0.0;
  if (lv.M > 0.0) s2 += near_zero_integral(second, std::min(eps, lv.M), 1.0, o);
  if (lv.m < 0.0) s2 += near_zero_integral(second, std::min(eps, -lv.m), -1.0, o);
  sum += c2 * s2;
  // outer regions, graded geometrically away from eps
  auto outer = [&](double from, double to, double side) {
    if (!(to > from)) return 0.0;
    double acc = 0.0;
    double lo = from;
    while (lo < to) {
      double hi = std::min(to, lo * kPanelGrowth);
      acc += side > 0 ? graded_integral(h, lo, hi, g.x_scale(), o)
                      : graded_integral(h, -hi, -lo, g.x_scale(), o);
      lo = hi;
    }
    return acc;
  };
  if (lv.M > eps) sum += outer(eps, lv.M, 1.0);
  if (-lv.m > eps) sum += outer(eps, -lv.m, -1.0);
  return sum;
}

double levy_power_integral(const LevyDensity& lv, int k, bool absolute,
                           const QuadratureOptions& o) {
  if (k <= lv.activity_index) {
    // int |y|^k |y|^(-1-beta) dy diverges at the origin
    if (absolute || k % 2 == 0) return kInfinity;
    bool pos = lv.M > 0.0;
    bool neg = lv.m < 0.0;
    if (pos && neg) return std::numeric_limits<double>::quiet_NaN();
    return pos ? kInfinity : -kInfinity;
  }
  PowerIntegrand g{k, absolute};
  auto h = [&](double y) { return g(y) * lv.density(y); };
  const double extent = std::max(-lv.m, lv.M);
  const double eps = 0.1 * extent;
  double sum = 0.0;
  if (lv.M > 0.0) {
    double e = std::min(eps, lv.M);
    sum += near_zero_integral(h, e, 1.0, o);
    double lo = e;
    while (lo < lv.M) {
      double hi = std::min(lv.M, lo * kPanelGrowth);
      sum += graded_integral(h, lo, hi, 0.0, o);
      lo = hi;
    }
  }
  if (lv.m < 0.0) {
    double e = std::min(eps, -lv.m);
    sum += near_zero_integral(h, e, -1.0, o);
    double lo = e;
    while (lo < -lv.m) {
      double hi = std::min(-lv.m, lo * kPanelGrowth);
      sum += graded_integral(h, -hi, -lo, 0.0, o);
      lo = hi;
    }
  }
  return sum;
}

// Integral of g against the size law F (not yet multiplied by eta).
template <class G>
double law_integral(const SizeLaw& law, const G& g, const QuadratureOptions& o) {
  return std::visit(
      [&](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, PointMassJump>) {
          return g(l.size);
        } else if constexpr (std::is_same_v<L, ParetoJump>) {
          auto pdf = [&](double y) { return l.pdf(y); };
          auto tail = [&](double p, double level) { return l.upper_tail_moment(p, level); };
          return density_integral(g, pdf, l.z0, kInfinity, tail, o);
        } else if constexpr (std::is_same_v<L, UniformJump>) {
          auto pdf = [&](double y) { return l.pdf(y); };
          auto tail = [](double, double) { return 0.0; };
          return density_integral(g, pdf, l.lo, l.hi, tail, o);
        } else {
          auto tail = [](double, double) { return 0.0; };
          return density_integral(g, l.pdf, l.lo, l.hi, tail, o);
        }
      },
      law);
}

template <class G>
double measure_integral(const JumpMeasure& nu, const G& g, const QuadratureOptions& o) {
  switch (nu.kind()) {
    case JumpMeasure::Kind::None:
      return 0.0;
    case JumpMeasure::Kind::CompoundPoisson:
      return nu.intensity() * law_integral(nu.size_law(), g, o);
    case JumpMeasure::Kind::GeneralDensity:
      return levy_integral_taylor(nu.levy_density(), g, o);
  }
  return 0.0;
}

void require_admissible(const JumpMeasure& nu, double pi, double psi, const char* what) {
  if (!fraction_admissible(nu, pi, psi)) {
    throw AdmissibilityError(std::string(what) + ": 1 + pi*psi*y <= 0 on the jump support (pi=" +
                             std::to_string(pi) + ", psi=" + std::to_string(psi) + ")");
  }
}

// ---------------------------------------------------------------------------
// 2F1 helpers
// ---------------------------------------------------------------------------

double hyp_series(double a, double b, double c, double z, long max_terms) {
  double term = 1.0;
  double sum = 1.0;
  int small = 0;
  for (long n = 0; n < max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (term == 0.0) return sum;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++small >= 2) return sum;
    } else {
      small = 0;
    }
  }
  throw ConvergenceError("hyp2f1 series budget exhausted");
}

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

}  // namespace

// ---------------------------------------------------------------------------
// Size laws
// ---------------------------------------------------------------------------

void ParetoJump::validate() const {
  if (!(alpha > 2.0) || !(z0 > 0.0) || !is_finite(alpha) || !is_finite(z0)) {
    throw ConfigError("Pareto jumps need alpha > 2 and z0 > 0");
  }
}

double ParetoJump::pdf(double y) const {
  if (y < z0) return 0.0;
  return alpha / z0 * std::pow(z0 / y, alpha + 1.0);
}

double ParetoJump::mean() const { return alpha * z0 / (alpha - 1.0); }

double ParetoJump::variance() const {
  double mu = mean();
  return raw_moment(2) - mu * mu;
}

double ParetoJump::raw_moment(int k) const {
  if (k == 0) return 1.0;
  if (k >= alpha) return kInfinity;
  return alpha * std::pow(z0, k) / (alpha - k);
}

double ParetoJump::upper_tail_moment(double p, double level) const {
  if (p >= alpha) return kInfinity;
  level = std::max(level, z0);
  return alpha * std::pow(z0, alpha) * std::pow(level, p - alpha) / (alpha - p);
}

double ParetoJump::survival_quantile(double u) const { return z0 * std::pow(u, -1.0 / alpha); }

void UniformJump::validate() const {
  if (!(hi > lo) || !is_finite(lo) || !is_finite(hi)) {
    throw ConfigError("uniform jumps need finite lo < hi");
  }
}

double UniformJump::pdf(double y) const {
  return (y < lo || y > hi) ? 0.0 : 1.0 / (hi - lo);
}

double UniformJump::raw_moment(int k) const {
  return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo));
}

double UniformJump::abs_moment(int k) const {
  if (lo >= 0.0) return raw_moment(k);
  if (hi <= 0.0) return UniformJump{-hi, -lo}.raw_moment(k);
  return (std::pow(-lo, k + 1) + std::pow(hi, k + 1)) / ((k + 1) * (hi - lo));
}

void PointMassJump::validate() const {
  if (size == 0.0 || !is_finite(size)) throw ConfigError("point-mass jump size must be finite and non-zero");
}

double PointMassJump::raw_moment(int k) const { return std::pow(size, k); }
double PointMassJump::abs_moment(int k) const { return std::pow(std::abs(size), k); }

void DensityJump::validate() const {
  if (!pdf) throw ConfigError("density jump law needs a density function");
  if (!(hi > lo) || !is_finite(lo) || !is_finite(hi)) {
    throw ConfigError("density jump law needs a bounded support lo < hi");
  }
  QuadratureOptions o;
  o.rel_tol = 1e-10;
  PowerIntegrand one{0, false};
  auto tail = [](double, double) { return 0.0; };
  double mass = density_integral(one, pdf, lo, hi, tail, o);
  if (std::abs(mass - 1.0) > 1e-6) {
    throw ConfigError("jump size density integrates to " + std::to_string(mass) + ", expected 1");
  }
}

// ---------------------------------------------------------------------------
// JumpMeasure
// ---------------------------------------------------------------------------

JumpMeasure::JumpMeasure() = default;

JumpMeasure JumpMeasure::none() { return JumpMeasure{}; }

JumpMeasure JumpMeasure::compound_poisson(double intensity, SizeLaw law) {
  if (!(intensity > 0.0) || !is_finite(intensity)) {
    throw ConfigError("compound Poisson intensity must be positive and finite");
  }
  std::visit([](const auto& l) { l.validate(); }, law);
  JumpMeasure nu;
  nu.kind_ = Kind::CompoundPoisson;
  nu.intensity_ = intensity;
  nu.support_ = std::visit([](const auto& l) { return l.support(); }, law);
  nu.law_ = std::move(law);
  nu.compute_moments();
  return nu;
}

JumpMeasure JumpMeasure::general_density(LevyDensity density) {
  if (!density.density) throw ConfigError("Levy density function missing");
  if (!is_finite(density.m) || !is_finite(density.M) || !(density.m <= 0.0) ||
      !(density.M >= 0.0) || density.m == density.M) {
    throw ConfigError("Levy density support must be bounded and contain the origin");
  }
  if (!(density.activity_index >= 0.0) || !(density.activity_index < 2.0)) {
    throw ConfigError("activity index must lie in [0, 2)");
  }
  JumpMeasure nu;
  nu.kind_ = Kind::GeneralDensity;
  nu.intensity_ = kInfinity;
  nu.support_ = {density.m, density.M};
  nu.levy_ = std::move(density);
  nu.compute_moments();
  return nu;
}

double JumpMeasure::intensity() const { return intensity_; }

const SizeLaw& JumpMeasure::size_law() const {
  if (kind_ != Kind::CompoundPoisson) throw DomainError("size law requested for a non compound-Poisson measure");
  return law_;
}

const LevyDensity& JumpMeasure::levy_density() const {
  if (kind_ != Kind::GeneralDensity) throw DomainError("Levy density requested for a measure of another kind");
  return levy_;
}

void JumpMeasure::compute_moments() {
  QuadratureOptions o;
  o.rel_tol = 1e-12;
  for (int k = 1; k <= 3; ++k) {
    double raw = 0.0;
    double absm = 0.0;
    if (kind_ == Kind::CompoundPoisson) {
      std::visit(
          [&](const auto& l) {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, DensityJump>) {
              raw = law_integral(law_, PowerIntegrand{k, false}, o);
              absm = law_integral(law_, PowerIntegrand{k, true}, o);
            } else {
              raw = l.raw_moment(k);
              absm = l.abs_moment(k);
            }
          },
          law_);
      raw *= intensity_;
      absm *= intensity_;
    } else if (kind_ == Kind::GeneralDensity) {
      raw = levy_power_integral(levy_, k, false, o);
      absm = levy_power_integral(levy_, k, true, o);
    }
    moments_[k - 1] = raw;
    abs_moments_[k - 1] = absm;
  }
}

double JumpMeasure::moment(int k) const {
  if (k < 1 || k > 3) throw DomainError("moment order must be 1, 2 or 3");
  return moments_[k - 1];
}

double JumpMeasure::abs_moment(int k) const {
  if (k < 1 || k > 3) throw DomainError("moment order must be 1, 2 or 3");
  return abs_moments_[k - 1];
}

double JumpMeasure::size_mean() const {
  if (kind_ != Kind::CompoundPoisson) throw DomainError("size mean needs a compound Poisson measure");
  return moments_[0] / intensity_;
}

double JumpMeasure::size_variance() const {
  double mu = size_mean();
  return moments_[1] / intensity_ - mu * mu;
}

double JumpMeasure::density(double y) const {
  switch (kind_) {
    case Kind::None:
      return 0.0;
    case Kind::GeneralDensity:
      return (y < levy_.m || y > levy_.M || y == 0.0) ? 0.0 : levy_.density(y);
    case Kind::CompoundPoisson:
      return std::visit(
          [&](const auto& l) -> double {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, PointMassJump>) {
              throw DomainError("a point-mass jump law has no density");
            } else if constexpr (std::is_same_v<L, DensityJump>) {
              return (y < l.lo || y > l.hi) ? 0.0 : intensity_ * l.pdf(y);
            } else {
              return intensity_ * l.pdf(y);
            }
          },
          law_);
  }
  return 0.0;
}

double moment(const JumpMeasure& measure, int k) { return measure.moment(k); }
double abs_moment(const JumpMeasure& measure, int k) { return measure.abs_moment(k); }

bool fraction_admissible(const JumpMeasure& measure, double pi, double psi) {
  if (!is_finite(pi)) return false;
  if (measure.empty()) return true;
  const double x = pi * psi;
  if (x == 0.0) return true;
  const Support sp = measure.support();
  // the binding end is m for x > 0 and M for x < 0
  double end = x > 0.0 ? sp.m : sp.M;
  if (!is_finite(end)) return false;
  return 1.0 + x * end > 0.0;
}

double drag_integral(const JumpMeasure& measure, double pi, double psi,
                     const QuadratureOptions& opts) {
  require_admissible(measure, pi, psi, "drag_integral");
  if (pi == 0.0 || psi == 0.0 || measure.empty()) return 0.0;
  return measure_integral(measure, DragIntegrand{pi, psi}, opts);
}

double log_penalty_integral(const JumpMeasure& measure, double pi, double psi,
                            const QuadratureOptions& opts) {
  require_admissible(measure, pi, psi, "log_penalty_integral");
  if (pi == 0.0 || psi == 0.0 || measure.empty()) return 0.0;
  return std::min(0.0, measure_integral(measure, LogPenaltyIntegrand{pi, psi}, opts));
}

double drag_slope_integral(const JumpMeasure& measure, double pi, double psi,
                           const QuadratureOptions& opts) {
  require_admissible(measure, pi, psi, "drag_slope_integral");
  if (psi == 0.0 || measure.empty()) return 0.0;
  return measure_integral(measure, DragSlopeIntegrand{pi, psi}, opts);
}

double exposure_integral(const JumpMeasure& measure, double pi, double psi,
                         const QuadratureOptions& opts) {
  require_admissible(measure, pi, psi, "exposure_integral");
  if (measure.empty()) return 0.0;
  return measure_integral(measure, ExposureIntegrand{pi, psi}, opts);
}

double pareto_drag_closed_form(const ParetoJump& law, double intensity, double pi) {
  law.validate();
  if (!(pi > 0.0)) throw DomainError("closed-form Pareto drag needs pi > 0");
  return intensity * law.mean() * hyp2f1(1.0, law.alpha - 1.0, law.alpha, -1.0 / (pi * law.z0));
}

double hyp2f1(double a, double b, double c, double z) {
  if (c <= 0.0 && near_integer(c)) throw DomainError("hyp2f1: c must not be a non-positive integer");
  if (!is_finite(z) || z >= 1.0 || (z > 0.0 && z >= 0.5)) {
    throw DomainError("hyp2f1: only z <= 0 or |z| < 0.5 is supported");
  }
  if (z == 0.0) return 1.0;
  constexpr long kBudget = 20'000'000;
  if (std::abs(z) < 0.5) return hyp_series(a, b, c, z, kBudget);

  // Pfaff: F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1)), with w in [1/3, 1).
  const double w = z / (z - 1.0);
  const double pre = std::pow(1.0 - z, -a);
  const double bp = c - b;
  if (w <= 0.75) return pre * hyp_series(a, bp, c, w, kBudget);

  // Close to w = 1: connection formula in 1 - w (needs c - a - bp non-integral).
  const double e = c - a - bp;
  if (!near_integer(e)) {
    const double g1 = std::tgamma(c) * std::tgamma(e) / (std::tgamma(c - a) * std::tgamma(c - bp));
    const double g2 = std::tgamma(c) * std::tgamma(-e) / (std::tgamma(a) * std::tgamma(bp));
    const double v = 1.0 - w;
    if (is_finite(g1) && is_finite(g2)) {
      double t1 = g1 == 0.0 ? 0.0 : g1 * hyp_series(a, bp, 1.0 - e, v, kBudget);
      double t2 = g2 == 0.0 ? 0.0 : g2 * std::pow(v, e) * hyp_series(c - a, c - bp, e + 1.0, v, kBudget);
      return pre * (t1 + t2);
    }
  }
  return pre * hyp_series(a, bp, c, w, kBudget);
}

}  // namespace levyou
