#include "levyou/strategy_core.hpp"

#include <algorithm>
#include <cmath>

#include "levyou/csv.hpp"
#include "levyou/errors.hpp"

namespace levyou {

AdmissibleSet::AdmissibleSet(double pi_min, double pi_max, const JumpMeasure& jumps, double psi2)
    : pi_min_(pi_min), pi_max_(pi_max), domain_(classify_case(jumps, psi2)), delta_(kInfinity) {
  if (!std::isfinite(pi_min) || !std::isfinite(pi_max)) throw ConfigError("Pi must be a bounded interval");
  if (!(pi_min <= 0.0 && 0.0 <= pi_max) || !(pi_min < pi_max)) {
    throw ConfigError("Pi = [pi_min, pi_max] must contain 0 and have positive length");
  }
  if (!domain_.contains(pi_min) || !domain_.contains(pi_max)) {
    throw AdmissibilityError("Pi = [" + format_double(pi_min) + ", " + format_double(pi_max) +
                             "] is not inside the admissible domain (" + format_double(domain_.lo) +
                             ", " + format_double(domain_.hi) + ")");
  }
  if (std::isfinite(domain_.lo) && !domain_.lo_closed) delta_ = std::min(delta_, pi_min - domain_.lo);
  if (std::isfinite(domain_.hi) && !domain_.hi_closed) delta_ = std::min(delta_, domain_.hi - pi_max);
}

namespace {

double excess_drift(double t, double s, const MarketCoefficients& c) {
  return c.compensated_drift(t) - c.lambda * s;
}

void require_fraction(const MarketCoefficients& c, double pi, double t) {
  if (!fraction_admissible(c.jumps, pi, c.psi(t))) {
    throw AdmissibilityError("fraction " + format_double(pi) + " leaves the admissible domain at t=" +
                             format_double(t));
  }
}

}  // namespace

double f_value(double pi, double t, double s, const MarketCoefficients& coeffs,
               const QuadratureOptions& quad) {
  require_fraction(coeffs, pi, t);
  const double sg = coeffs.sigma(t);
  double v = excess_drift(t, s, coeffs) * pi - 0.5 * sg * sg * pi * pi;
  if (!coeffs.jumps.empty() && pi != 0.0) v += log_penalty_integral(coeffs.jumps, pi, coeffs.psi(t), quad);
  return v;
}

double f_prime(double pi, double t, double s, const MarketCoefficients& coeffs,
               const QuadratureOptions& quad) {
  require_fraction(coeffs, pi, t);
  const double sg = coeffs.sigma(t);
  double v = excess_drift(t, s, coeffs) - sg * sg * pi;
  if (!coeffs.jumps.empty() && pi != 0.0) v -= drag_integral(coeffs.jumps, pi, coeffs.psi(t), quad);
  return v;
}

double f_second(double pi, double t, const MarketCoefficients& coeffs, const QuadratureOptions& quad) {
  require_fraction(coeffs, pi, t);
  const double sg = coeffs.sigma(t);
  double v = -sg * sg;
  if (!coeffs.jumps.empty()) v -= drag_slope_integral(coeffs.jumps, pi, coeffs.psi(t), quad);
  return v;
}

OptimalFraction optimal_fraction(double t, double s, const MarketCoefficients& coeffs,
                                 const AdmissibleSet& adm, const SolverOptions& opts) {
  const QuadratureOptions& q = opts.quadrature;
  const double x = excess_drift(t, s, coeffs);
  if (!std::isfinite(x)) throw DomainError("non-finite drift or price at t=" + format_double(t));
  const double lo0 = adm.pi_min();
  const double hi0 = adm.pi_max();
  const double tol_root = opts.root_rel * (1.0 + std::abs(x));
  const double tol_pi = opts.pi_rel * (hi0 - lo0);
  auto fp = [&](double p) { return f_prime(p, t, s, coeffs, q); };

  // f'(0) = x exactly, which settles the sign tests at a zero endpoint.
  if ((lo0 == 0.0 ? x : fp(lo0)) <= 0.0) return {lo0, true, 0};
  if ((hi0 == 0.0 ? x : fp(hi0)) >= 0.0) return {hi0, true, 0};
  if (x == 0.0) return {0.0, false, 0};

  // invariant: f'(lo) > 0 > f'(hi)
  double lo = x > 0.0 ? 0.0 : lo0;
  double hi = x > 0.0 ? hi0 : 0.0;
  const double sg = coeffs.sigma(t);
  const double psi = coeffs.psi(t);
  const double curvature = sg * sg + (coeffs.jumps.empty() ? 0.0 : psi * psi * coeffs.jumps.moment(2));
  double p = curvature > 0.0 ? x / curvature : 0.5 * (lo + hi);
  if (!(p > lo && p < hi)) p = 0.5 * (lo + hi);
  double last_step = hi - lo;

  for (int it = 1; it <= opts.max_iterations; ++it) {
    const double g = fp(p);
    if (g == 0.0) return {p, false, it};
    if (std::abs(g) <= tol_root) {
      const double a = std::max(lo, p - 0.5 * tol_pi);
      const double b = std::min(hi, p + 0.5 * tol_pi);
      const double ga = a == lo ? 1.0 : fp(a);
      const double gb = b == hi ? -1.0 : fp(b);
      if (ga > 0.0 && gb < 0.0) return {p, false, it};
      if (ga <= 0.0) hi = a;
      if (gb >= 0.0) lo = b;
    }
    if (g > 0.0) {
      lo = std::max(lo, p);
    } else {
      hi = std::min(hi, p);
    }
    if (hi - lo <= tol_pi) {
      const double mid = 0.5 * (lo + hi);
      return {mid, false, it};
    }
    const double d = f_second(p, t, coeffs, q);
    double next = p - g / d;
    if (!std::isfinite(next) || next <= lo || next >= hi || std::abs(next - p) > 0.5 * last_step) {
      next = 0.5 * (lo + hi);
    }
    last_step = std::abs(next - p);
    p = next;
  }
  throw SolverError("optimal_fraction: no convergence at t=" + format_double(t) + ", s=" + format_double(s) +
                    " (bracket [" + format_double(lo) + ", " + format_double(hi) + "])");
}

double inverse_price(double t, double pi, const MarketCoefficients& coeffs, const QuadratureOptions& quad) {
  require_fraction(coeffs, pi, t);
  const double sg = coeffs.sigma(t);
  double num = coeffs.compensated_drift(t) - sg * sg * pi;
  if (!coeffs.jumps.empty() && pi != 0.0) num -= drag_integral(coeffs.jumps, pi, coeffs.psi(t), quad);
  return num / coeffs.lambda;
}

Thresholds thresholds(const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                      const std::vector<double>& t_grid, const QuadratureOptions& quad) {
  if (t_grid.empty()) throw ConfigError("thresholds need a non-empty time grid");
  Thresholds th;
  th.t = t_grid;
  th.s1 = kInfinity;
  th.s2 = -kInfinity;
  for (double t : t_grid) {
    if (t < 0.0 || t > coeffs.horizon) throw DomainError("threshold time outside [0, T]");
    const double s1 = inverse_price(t, adm.pi_max(), coeffs, quad);
    const double s2 = inverse_price(t, adm.pi_min(), coeffs, quad);
    th.s1_t.push_back(s1);
    th.s2_t.push_back(s2);
    th.s1 = std::min(th.s1, s1);
    th.s2 = std::max(th.s2, s2);
  }
  return th;
}

FStar f_star(double t, double s, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
             const SolverOptions& opts) {
  FStar out;
  const OptimalFraction opt = optimal_fraction(t, s, coeffs, adm, opts);
  const double pi = opt.pi;
  out.pi = pi;
  out.d_ds = -coeffs.lambda * pi;
  if (pi == 0.0) return out;
  out.value = f_value(pi, t, s, coeffs, opts.quadrature);
  const double sg = coeffs.sigma(t);
  double dt = coeffs.compensated_drift_derivative(t) * pi - sg * coeffs.sigma.derivative(t) * pi * pi;
  if (!coeffs.jumps.empty()) {
    const double psi = coeffs.psi(t);
    const double dpsi = coeffs.psi.derivative(t);
    if (dpsi != 0.0) dt -= psi * dpsi * pi * pi * exposure_integral(coeffs.jumps, pi, psi, opts.quadrature);
  }
  out.d_dt = dt;
  return out;
}

double f_star_growth_constant(const MarketCoefficients& coeffs, const AdmissibleSet& adm) {
  double bmax = 0.0;
  for (int i = 0; i <= 256; ++i) {
    bmax = std::max(bmax, std::abs(coeffs.compensated_drift(coeffs.horizon * i / 256.0)));
  }
  return adm.max_abs() * std::max(bmax, coeffs.lambda);
}

PolicyTable::PolicyTable(const MarketCoefficients& coeffs, const AdmissibleSet& adm, int pi_nodes,
                         int time_nodes, const QuadratureOptions& quad)
    : coeffs_(std::make_shared<const MarketCoefficients>(coeffs)),
      pi_min_(adm.pi_min()),
      pi_max_(adm.pi_max()),
      pi_nodes_(pi_nodes) {
  if (pi_nodes < 3) throw ConfigError("policy table needs at least 3 pi nodes");
  // Drag is only C^(1+) at pi = 0 when the third jump moment is infinite,
  // so the cells next to 0 are refined geometrically.
  const double h = (pi_max_ - pi_min_) / (pi_nodes - 1);
  for (int i = 0; i + 1 < pi_nodes; ++i) {
    const double p = pi_min_ + h * i;
    pi_grid_.push_back(std::abs(p) < 1e-9 * h ? 0.0 : p);
  }
  for (int j = 1; j <= kZeroRefinement; ++j) {
    const double r = h * std::ldexp(1.0, -j);
    if (pi_min_ < -r) pi_grid_.push_back(-r);
    if (pi_max_ > r) pi_grid_.push_back(r);
  }
  pi_grid_.push_back(pi_max_);
  pi_grid_.push_back(0.0);
  std::sort(pi_grid_.begin(), pi_grid_.end(), std::greater<>());
  pi_grid_.erase(std::unique(pi_grid_.begin(), pi_grid_.end()), pi_grid_.end());
  if (time_nodes <= 0) time_nodes = coeffs.time_homogeneous() ? 1 : 65;
  if (time_nodes == 1) {
    slices_.push_back(build_slice(0.0, quad));
  } else {
    for (int k = 0; k < time_nodes; ++k) {
      slices_.push_back(build_slice(coeffs.horizon * k / (time_nodes - 1), quad));
    }
  }
  measure_error(quad);
}

PolicyTable::Slice PolicyTable::build_slice(double t, const QuadratureOptions& quad) const {
  const MarketCoefficients& c = *coeffs_;
  Slice sl;
  sl.time = t;
  const double sg2 = c.sigma(t) * c.sigma(t);
  for (double p : pi_grid_) {
    const double s = inverse_price(t, p, c, quad);
    const double slope = sg2 + (c.jumps.empty() ? 0.0 : drag_slope_integral(c.jumps, p, c.psi(t), quad));
    sl.s.push_back(s);
    sl.pi.push_back(p);
    sl.dpi_ds.push_back(-c.lambda / slope);
    sl.f.push_back(f_value(p, t, s, c, quad));
  }
  sl.base_lo = f_value(pi_min_, t, 0.0, c, quad);
  sl.base_hi = f_value(pi_max_, t, 0.0, c, quad);
  return sl;
}

void PolicyTable::slice_eval(const Slice& sl, double s, double& pi, double& f) const {
  const double lam = coeffs_->lambda;
  if (s <= sl.s.front()) {
    pi = pi_max_;
    f = sl.base_hi - lam * pi_max_ * s;
    return;
  }
  if (s >= sl.s.back()) {
    pi = pi_min_;
    f = sl.base_lo - lam * pi_min_ * s;
    return;
  }
  const auto it = std::upper_bound(sl.s.begin(), sl.s.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - sl.s.begin()) - 1;
  const double h = sl.s[j + 1] - sl.s[j];
  const double u = (s - sl.s[j]) / h;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  pi = h00 * sl.pi[j] + h10 * h * sl.dpi_ds[j] + h01 * sl.pi[j + 1] + h11 * h * sl.dpi_ds[j + 1];
  pi = std::min(std::max(pi, pi_min_), pi_max_);
  f = h00 * sl.f[j] - h10 * h * lam * sl.pi[j] + h01 * sl.f[j + 1] - h11 * h * lam * sl.pi[j + 1];
}

void PolicyTable::eval(double t, double s, double& pi, double& f) const {
  if (slices_.size() == 1) {
    slice_eval(slices_.front(), s, pi, f);
    return;
  }
  const double pos = std::clamp(t / coeffs_->horizon, 0.0, 1.0) * static_cast<double>(slices_.size() - 1);
  const std::size_t k = std::min(static_cast<std::size_t>(pos), slices_.size() - 2);
  const double w = pos - static_cast<double>(k);
  double p0, f0, p1, f1;
  slice_eval(slices_[k], s, p0, f0);
  slice_eval(slices_[k + 1], s, p1, f1);
  pi = (1.0 - w) * p0 + w * p1;
  f = (1.0 - w) * f0 + w * f1;
}

double PolicyTable::pi(double t, double s) const {
  double p, f;
  eval(t, s, p, f);
  return p;
}

double PolicyTable::f_star(double t, double s) const {
  double p, f;
  eval(t, s, p, f);
  return f;
}

void PolicyTable::measure_error(const QuadratureOptions& quad) {
  const MarketCoefficients& c = *coeffs_;
  for (const Slice& sl : slices_) {
    for (std::size_t i = 0; i + 1 < sl.pi.size(); ++i) {
      const double p = 0.5 * (sl.pi[i] + sl.pi[i + 1]);
      const double s = inverse_price(sl.time, p, c, quad);
      double tp, tf;
      slice_eval(sl, s, tp, tf);
      max_pi_error_ = std::max(max_pi_error_, std::abs(tp - p));
      max_f_error_ = std::max(max_f_error_, std::abs(tf - f_value(p, sl.time, s, c, quad)));
    }
  }
  if (slices_.size() < 2) return;
  AdmissibleSet adm(pi_min_, pi_max_, c.jumps, c.psi2);
  SolverOptions opts;
  opts.quadrature = quad;
  for (std::size_t k = 0; k + 1 < slices_.size(); ++k) {
    const double t = 0.5 * (slices_[k].time + slices_[k + 1].time);
    const double lo = std::min(slices_[k].s.front(), slices_[k + 1].s.front());
    const double hi = std::max(slices_[k].s.back(), slices_[k + 1].s.back());
    for (int j = 0; j <= 16; ++j) {
      const double s = lo + (hi - lo) * j / 16.0;
      const FStar exact = levyou::f_star(t, s, c, adm, opts);
      double tp, tf;
      eval(t, s, tp, tf);
      max_pi_error_ = std::max(max_pi_error_, std::abs(tp - exact.pi));
      max_f_error_ = std::max(max_f_error_, std::abs(tf - exact.value));
    }
  }
}

std::string to_string(SurfaceLabel label) {
  switch (label) {
    case SurfaceLabel::Exact:
      return "exact";
    case SurfaceLabel::Merton:
      return "merton";
    case SurfaceLabel::JumpMean:
      return "jump_mean";
    case SurfaceLabel::Zero:
      return "zero";
  }
  return "?";
}

StrategySurface exact_surface(const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                              const SolverOptions& opts) {
  auto c = std::make_shared<const MarketCoefficients>(coeffs);
  std::string prov = "solver coeffs=" + coeffs.fingerprint() + " root_rel=" + format_double(opts.root_rel) +
                     " pi_rel=" + format_double(opts.pi_rel);
  return StrategySurface(
      SurfaceLabel::Exact, [c, adm, opts](double t, double s) { return optimal_fraction(t, s, *c, adm, opts).pi; },
      std::move(prov));
}

StrategySurface exact_surface(std::shared_ptr<const PolicyTable> table) {
  std::string prov = "policy table max_pi_error=" + format_double(table->max_pi_error());
  return StrategySurface(
      SurfaceLabel::Exact, [table](double t, double s) { return table->pi(t, s); }, std::move(prov));
}

StrategySurface zero_surface() {
  return StrategySurface(SurfaceLabel::Zero, [](double, double) { return 0.0; }, "constant 0");
}

void write_surface_csv(std::ostream& out, const StrategySurface& surface, const std::vector<double>& t_grid,
                       const std::vector<double>& s_grid) {
  CsvWriter w(out);
  w.comment("surface: " + to_string(surface.label()));
  w.comment("provenance: " + surface.provenance());
  w.comment("t grid: " + std::to_string(t_grid.size()) + " points" +
            (t_grid.empty() ? "" : " from " + format_double(t_grid.front()) + " to " + format_double(t_grid.back())));
  w.comment("s grid: " + std::to_string(s_grid.size()) + " points" +
            (s_grid.empty() ? "" : " from " + format_double(s_grid.front()) + " to " + format_double(s_grid.back())));
  const std::string column = "pi_" + to_string(surface.label());
  w.header({"t", "s", column});
  for (double t : t_grid) {
    for (double s : s_grid) {
      w.field(t).field(s).field(surface(t, s));
      w.end_row();
    }
  }
}

}  // namespace levyou
