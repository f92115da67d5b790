#include "levyou/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levyou/csv.hpp"
#include "levyou/errors.hpp"
#include "levyou/parallel.hpp"

namespace levyou {

namespace {

constexpr int kCheckPoints = 257;

double integrate_time(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 15, 1e-12);
}

// (1 - e^{-k dt}) / k, stable for small k dt.
double decay_integral(double k, double dt) { return -std::expm1(-k * dt) / k; }

}  // namespace

TimeFunction::TimeFunction(std::function<double(double)> value,
                           std::function<double(double)> derivative)
    : value_(std::move(value)), derivative_(std::move(derivative)) {
  if (!value_) throw ConfigError("time function without a value callback");
}

TimeFunction TimeFunction::constant(double value) {
  TimeFunction f([value](double) { return value; });
  f.constant_ = true;
  f.level_ = value;
  return f;
}

double TimeFunction::derivative(double t) const {
  if (constant_) return 0.0;
  if (derivative_) return derivative_(t);
  const double h = kDifferenceStep;
  return (value_(t + h) - value_(t - h)) / (2.0 * h);
}

void MarketCoefficients::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon T must be positive");
  if (!(psi1 >= 0.0) || !(psi2 >= psi1)) throw ConfigError("need 0 <= psi1 <= psi2");
  for (int i = 0; i < kCheckPoints; ++i) {
    const double t = horizon * i / (kCheckPoints - 1);
    const double p = psi(t);
    const double sg = sigma(t);
    if (!std::isfinite(p) || !std::isfinite(sg) || !std::isfinite(b(t))) {
      throw ConfigError("non-finite coefficient at t=" + std::to_string(t));
    }
    if (p < psi1 - 1e-12 || p > psi2 + 1e-12) {
      throw ConfigError("psi(t) leaves [psi1, psi2] at t=" + std::to_string(t));
    }
    if (jumps.empty()) {
      if (!(sg != 0.0)) throw ConfigError("without jumps sigma must not vanish (t=" + std::to_string(t) + ")");
    } else if (sg == 0.0 && p == 0.0) {
      throw ConfigError("sigma and psi vanish together at t=" + std::to_string(t));
    }
  }
  if (!jumps.empty() && !std::isfinite(jumps.moment(2))) {
    throw ConfigError("jump measure must have a finite second moment");
  }
  if (!compensated && !std::isfinite(jumps.moment(1))) {
    throw ConfigError("raw (uncompensated) drift convention needs a finite first jump moment");
  }
}

double MarketCoefficients::compensated_drift(double t) const {
  if (compensated || jumps.empty()) return b(t);
  return b(t) + psi(t) * jumps.moment(1);
}

double MarketCoefficients::compensated_drift_derivative(double t) const {
  if (compensated || jumps.empty()) return b.derivative(t);
  return b.derivative(t) + psi.derivative(t) * jumps.moment(1);
}

bool MarketCoefficients::time_homogeneous() const {
  return b.is_constant() && sigma.is_constant() && psi.is_constant();
}

double MarketCoefficients::min_sigma_sq() const {
  if (sigma.is_constant()) return sigma(0.0) * sigma(0.0);
  double lo = kInfinity;
  for (int i = 0; i < 1001; ++i) {
    const double v = sigma(horizon * i / 1000.0);
    lo = std::min(lo, v * v);
  }
  return lo;
}

std::string MarketCoefficients::fingerprint() const {
  std::string text = format_double(lambda) + "|" + format_double(horizon) + "|" +
                     format_double(psi1) + "|" + format_double(psi2) + "|" +
                     (compensated ? "c" : "r");
  for (int i = 0; i <= 8; ++i) {
    const double t = horizon * i / 8.0;
    text += "|" + format_double(b(t)) + "," + format_double(sigma(t)) + "," + format_double(psi(t));
  }
  if (!jumps.empty()) {
    text += "|" + format_double(jumps.intensity()) + "," + format_double(jumps.support().m) + "," +
            format_double(jumps.support().M);
    for (int k = 1; k <= 3; ++k) text += "," + format_double(jumps.moment(k));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(text));
  return buf;
}

std::string to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::A:
      return "A";
    case CaseTag::B:
      return "B";
    case CaseTag::C:
      return "C";
    case CaseTag::D:
      return "D";
  }
  return "?";
}

bool FractionDomain::contains(double pi) const {
  bool above = lo_closed ? pi >= lo : pi > lo;
  bool below = hi_closed ? pi <= hi : pi < hi;
  return above && below;
}

bool FractionDomain::interior(double pi) const { return pi > lo && pi < hi; }

FractionDomain classify_case(const JumpMeasure& jumps, double psi2) {
  FractionDomain d;
  if (jumps.empty()) return d;
  const double m = jumps.support().m;
  const double M = jumps.support().M;
  if (std::isinf(m) && std::isinf(M)) {
    throw DegenerateError("jump support is the whole real line: only pi = 0 is admissible");
  }
  if (m < 0.0 && M > 0.0) {
    d.tag = CaseTag::A;
  } else if (m >= 0.0 && M != 0.0) {
    d.tag = CaseTag::B;
  } else if (M <= 0.0 && m != 0.0) {
    d.tag = CaseTag::C;
  } else {
    return d;
  }
  if (psi2 == 0.0) return d;
  // lower end from the largest positive jump, upper end from the most negative one
  if (M > 0.0) {
    if (std::isinf(M)) {
      d.lo = 0.0;
      d.lo_closed = true;
    } else {
      d.lo = -1.0 / (M * psi2);
    }
  }
  if (m < 0.0) {
    if (std::isinf(m)) {
      d.hi = 0.0;
      d.hi_closed = true;
    } else {
      d.hi = -1.0 / (m * psi2);
    }
  }
  return d;
}

double analytic_mean(const MarketCoefficients& coeffs, double t, double s, double u) {
  if (u < t) throw DomainError("analytic_mean needs u >= t");
  const double lam = coeffs.lambda;
  const double head = s * std::exp(-lam * (u - t));
  const bool constant_drift = coeffs.b.is_constant() && (coeffs.compensated || coeffs.psi.is_constant());
  if (constant_drift) return head + coeffs.compensated_drift(t) * decay_integral(lam, u - t);
  auto integrand = [&](double v) { return std::exp(-lam * (u - v)) * coeffs.compensated_drift(v); };
  return head + integrate_time(integrand, t, u);
}

double analytic_variance(const MarketCoefficients& coeffs, double t, double u) {
  if (u < t) throw DomainError("analytic_variance needs u >= t");
  const double lam = coeffs.lambda;
  const double m2 = coeffs.jumps.empty() ? 0.0 : coeffs.jumps.moment(2);
  auto local = [&](double v) {
    const double sg = coeffs.sigma(v);
    const double p = coeffs.psi(v);
    return sg * sg + p * p * m2;
  };
  if (coeffs.sigma.is_constant() && coeffs.psi.is_constant()) {
    return local(t) * decay_integral(2.0 * lam, u - t);
  }
  auto integrand = [&](double v) { return std::exp(-2.0 * lam * (u - v)) * local(v); };
  return integrate_time(integrand, t, u);
}

std::vector<double> uniform_grid(double t, double T, std::size_t n_steps) {
  std::vector<double> g(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) {
    g[k] = t + (T - t) * static_cast<double>(k) / static_cast<double>(n_steps);
  }
  g.back() = T;
  return g;
}

PathSimulator::PathSimulator(const MarketCoefficients& coeffs, std::vector<double> time_grid)
    : coeffs_(&coeffs), grid_(std::move(time_grid)) {
  if (grid_.size() < 2) throw ConfigError("time grid needs at least one step");
  const JumpMeasure& nu = coeffs.jumps;
  if (nu.kind() == JumpMeasure::Kind::GeneralDensity) {
    throw ConfigError("path simulation supports compound Poisson jumps only");
  }
  const double mean_jump = nu.empty() ? 0.0 : nu.moment(1);
  if (coeffs.compensated && !std::isfinite(mean_jump)) {
    throw ConfigError("compensated simulation needs a finite first jump moment");
  }
  steps_.reserve(grid_.size() - 1);
  for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
    const double u = grid_[k];
    double drift = coeffs.b(u);
    if (coeffs.compensated) drift -= coeffs.psi(u) * mean_jump;
    steps_.push_back({drift, coeffs.sigma(u)});
  }
  rate_ = nu.empty() ? 0.0 : nu.intensity();
  if (!nu.empty()) {
    if (const auto* d = std::get_if<DensityJump>(&nu.size_law())) {
      double peak = 0.0;
      for (int i = 0; i <= 4096; ++i) peak = std::max(peak, d->pdf(d->lo + (d->hi - d->lo) * i / 4096.0));
      density_envelope_ = 1.25 * peak;
    }
  }
}

double PathSimulator::advance(double x, double dt, const Step& st, Engine& rng) const {
  if (dt <= 0.0) return x;
  const double lam = coeffs_->lambda;
  double next = x * std::exp(-lam * dt) + st.drift * decay_integral(lam, dt);
  if (st.sigma != 0.0) {
    std::normal_distribution<double> normal;
    next += st.sigma * std::sqrt(decay_integral(2.0 * lam, dt)) * normal(rng);
  }
  return next;
}

double PathSimulator::draw_size(Engine& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::visit(
      [&](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, ParetoJump>) {
          return l.survival_quantile(1.0 - unif(rng));
        } else if constexpr (std::is_same_v<L, UniformJump>) {
          return l.lo + (l.hi - l.lo) * unif(rng);
        } else if constexpr (std::is_same_v<L, PointMassJump>) {
          return l.size;
        } else {
          for (;;) {
            const double y = l.lo + (l.hi - l.lo) * unif(rng);
            if (unif(rng) * density_envelope_ <= l.pdf(y)) return y;
          }
        }
      },
      coeffs_->jumps.size_law());
}

void PathSimulator::simulate(Engine& rng, double s, double* prices,
                             std::vector<JumpRecord>* jumps) const {
  if (jumps) jumps->clear();
  prices[0] = s;
  double x = s;
  std::exponential_distribution<double> gap(rate_ > 0.0 ? rate_ : 1.0);
  double next_jump = rate_ > 0.0 ? grid_.front() + gap(rng) : kInfinity;
  for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
    const Step& st = steps_[k];
    const double end = grid_[k + 1];
    double cur = grid_[k];
    while (next_jump < end) {
      x = advance(x, next_jump - cur, st, rng);
      const double y = draw_size(rng);
      if (jumps) jumps->push_back({next_jump, y, x});
      x += coeffs_->psi(next_jump) * y;
      cur = next_jump;
      next_jump += gap(rng);
    }
    x = advance(x, end - cur, st, rng);
    prices[k + 1] = x;
  }
}

PathBundle simulate_on_grid(const MarketCoefficients& coeffs, std::vector<double> grid, double s,
                            const SimConfig& config, const SeedRecord& seeds) {
  if (config.n_paths < 1) throw ConfigError("n_paths must be >= 1");
  if (!std::isfinite(s)) throw ConfigError("start price must be finite");
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    if (!(grid[k] < grid[k + 1])) throw ConfigError("time grid must be increasing");
  }
  if (!grid.empty() && (grid.front() < 0.0 || grid.back() > coeffs.horizon)) {
    throw ConfigError("time grid must lie inside [0, T]");
  }
  PathSimulator sim(coeffs, std::move(grid));
  PathBundle bundle;
  bundle.time_grid = sim.time_grid();
  bundle.n_paths = config.n_paths;
  bundle.seed_record = seeds;
  const std::size_t n = bundle.n_times();
  bundle.prices.resize(config.n_paths * n);
  if (config.keep_jumps) bundle.jumps.resize(config.n_paths);
  parallel_chunks(config.n_paths, worker_count(config.workers),
                  [&](std::size_t begin, std::size_t end, int) {
                    for (std::size_t p = begin; p < end; ++p) {
                      Engine rng = make_stream(seeds, p);
                      sim.simulate(rng, s, bundle.prices.data() + p * n,
                                   config.keep_jumps ? &bundle.jumps[p] : nullptr);
                    }
                  });
  return bundle;
}

PathBundle simulate_paths(const MarketCoefficients& coeffs, double t, double s,
                          const SimConfig& config, const SeedRecord& seeds) {
  if (config.n_paths < 1 || config.n_steps < 1) throw ConfigError("n_paths and n_steps must be >= 1");
  if (!(t < coeffs.horizon) || t < 0.0) throw ConfigError("simulation needs 0 <= t < T");
  return simulate_on_grid(coeffs, uniform_grid(t, coeffs.horizon, config.n_steps), s, config, seeds);
}

PathBundle simulate_paths(const MarketCoefficients& coeffs, double t, double s,
                          const SimConfig& config) {
  SeedRecord seeds;
  seeds.seed = config.seed;
  return simulate_paths(coeffs, t, s, config, seeds);
}

void write_paths_csv(std::ostream& out, const PathBundle& bundle) {
  CsvWriter w(out);
  w.header({"path_id", "time", "price"});
  for (std::size_t p = 0; p < bundle.n_paths; ++p) {
    for (std::size_t k = 0; k < bundle.n_times(); ++k) {
      w.field(static_cast<long long>(p)).field(bundle.time_grid[k]).field(bundle.price(p, k));
      w.end_row();
    }
  }
}

}  // namespace levyou
