#include "levyou/value_mc.hpp"

#include <algorithm>
#include <cmath>

#include "levyou/csv.hpp"
#include "levyou/errors.hpp"
#include "levyou/parallel.hpp"

namespace levyou {

namespace {

struct Sample {
  double mean;
  double std_err;
};

Sample summarize(const std::vector<double>& xs) {
  if (xs.empty()) return {std::nan(""), std::nan("")};
  const double n = static_cast<double>(xs.size());
  // shifted by the first sample so a constant sample has exact mean and zero spread
  const double shift = xs.front();
  double d = 0.0;
  for (double x : xs) d += x - shift;
  d /= n;
  const double mean = shift + d;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - shift - d) * (x - shift - d);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double eval_f_star(double u, double s, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                   const ValueOptions& opts) {
  if (opts.table) return opts.table->f_star(u, s);
  return f_star(u, s, coeffs, adm, opts.solver).value;
}

// Walks one path node by node: grid points and jump times, in time order.
// visit(a, s_a_right, b, s_b_left) is called per continuous segment and
// jump(tau, s_left, size) per jump.
template <class Segment, class Jump>
void walk_path(const PathBundle& paths, std::size_t p, Segment&& segment, Jump&& jump) {
  const auto prices = paths.path(p);
  const auto& grid = paths.time_grid;
  static const std::vector<JumpRecord> kNoJumps;
  const auto& jumps = paths.jumps.empty() ? kNoJumps : paths.jumps[p];
  double a = grid.front();
  double sa = prices[0];
  std::size_t j = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    while (j < jumps.size() && jumps[j].time < grid[k]) {
      const JumpRecord& r = jumps[j];
      segment(a, sa, r.time, r.pre_price);
      sa = jump(r.time, r.pre_price, r.size);
      a = r.time;
      ++j;
    }
    segment(a, sa, grid[k], prices[k]);
    a = grid[k];
    sa = prices[k];
  }
}

void require_jump_log(const PathBundle& paths, const JumpMeasure& jumps) {
  if (!jumps.empty() && paths.jumps.size() != paths.n_paths) {
    throw ConfigError("path bundle lacks the jump log needed for exact jump nodes");
  }
}

}  // namespace

double path_value(const PathBundle& paths, std::size_t p, const MarketCoefficients& coeffs,
                  const AdmissibleSet& adm, const ValueOptions& opts) {
  double total = 0.0;
  walk_path(
      paths, p,
      [&](double a, double sa, double b, double sb) {
        if (b > a) total += 0.5 * (b - a) * (eval_f_star(a, sa, coeffs, adm, opts) + eval_f_star(b, sb, coeffs, adm, opts));
      },
      [&](double tau, double s_left, double size) { return s_left + coeffs.psi(tau) * size; });
  return total;
}

ValueEstimate estimate_value(const PathBundle& paths, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                             const ValueOptions& opts) {
  require_jump_log(paths, coeffs.jumps);
  std::vector<double> samples(paths.n_paths);
  parallel_chunks(paths.n_paths, worker_count(), [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t p = begin; p < end; ++p) samples[p] = path_value(paths, p, coeffs, adm, opts);
  });
  const Sample sm = summarize(samples);
  ValueEstimate est;
  est.g_hat = sm.mean;
  est.std_err = sm.std_err;
  est.n_paths = paths.n_paths;
  est.t = paths.time_grid.front();
  est.horizon = paths.time_grid.back();
  est.n_steps = paths.n_times() - 1;
  est.seed_record = paths.seed_record;
  return est;
}

ValueEstimate estimate_value(double t, double s, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                             const SimConfig& mc, const ValueOptions& opts) {
  if (t > coeffs.horizon) throw DomainError("estimate_value needs t <= T");
  if (t == coeffs.horizon) {
    ValueEstimate est;
    est.t = t;
    est.horizon = coeffs.horizon;
    est.seed_record.seed = mc.seed;
    return est;
  }
  SimConfig cfg = mc;
  cfg.keep_jumps = true;
  const PathBundle paths = simulate_paths(coeffs, t, s, cfg);
  return estimate_value(paths, coeffs, adm, opts);
}

double total_value(double t, double s, double x, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                   const SimConfig& mc, const ValueOptions& opts) {
  if (!(x > 0.0)) throw DomainError("initial wealth must be positive");
  return std::log(x) + estimate_value(t, s, coeffs, adm, mc, opts).g_hat;
}

double WealthRun::mean() const { return summarize(log_terminal_wealth).mean; }
double WealthRun::std_err() const { return summarize(log_terminal_wealth).std_err; }

WealthRun wealth_simulate(const StrategySurface& surface, const PathBundle& paths, double x,
                          const MarketCoefficients& coeffs) {
  if (!(x > 0.0)) throw DomainError("initial wealth must be positive");
  require_jump_log(paths, coeffs.jumps);
  WealthRun run;
  run.label = surface.label();
  run.x0 = x;
  run.log_terminal_wealth.assign(paths.n_paths, 0.0);
  std::vector<std::size_t> breaches(paths.n_paths, 0);
  const double log_x = std::log(x);
  parallel_chunks(paths.n_paths, worker_count(), [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t p = begin; p < end; ++p) {
      double lw = log_x;
      walk_path(
          paths, p,
          [&](double a, double sa, double b, double sb) {
            const double pi = surface(a, sa);
            if (pi == 0.0) return;
            const double sg = coeffs.sigma(a);
            lw += pi * (sb - sa) - 0.5 * sg * sg * pi * pi * (b - a);
          },
          [&](double tau, double s_left, double size) {
            const double pi = surface(tau, s_left);
            const double jump = coeffs.psi(tau) * size;
            const double factor = 1.0 + pi * jump;
            if (factor > 0.0) {
              lw += std::log1p(pi * jump);
            } else {
              ++breaches[p];
              lw = -kInfinity;
            }
            return s_left + jump;
          });
      run.log_terminal_wealth[p] = lw;
    }
  });
  for (std::size_t b : breaches) run.positivity_violations += b;
  return run;
}

WealthRun wealth_simulate(const StrategySurface& surface, double t, double s, double x,
                          const MarketCoefficients& coeffs, const SimConfig& mc) {
  SimConfig cfg = mc;
  cfg.keep_jumps = true;
  return wealth_simulate(surface, simulate_paths(coeffs, t, s, cfg), x, coeffs);
}

TowerReport tower_check(double t, double s, double h, const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                        const SimConfig& mc, const ValueOptions& opts) {
  const double T = coeffs.horizon;
  if (!(t < t + h && t + h <= T)) throw DomainError("tower_check needs 0 < h <= T - t");
  if (mc.n_steps < 1 || mc.n_paths < 1) throw ConfigError("n_paths and n_steps must be >= 1");
  TowerReport rep;
  rep.outer_paths = mc.n_paths;
  rep.inner_paths = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(mc.n_paths))));

  SimConfig cfg = mc;
  cfg.keep_jumps = true;
  const SeedRecord direct_seeds{mc.seed, {0}};
  const ValueEstimate direct =
      estimate_value(simulate_paths(coeffs, t, s, cfg, direct_seeds), coeffs, adm, opts);
  rep.direct = direct.g_hat;
  rep.direct_se = direct.std_err;

  const double mid = t + h;
  const std::size_t head_steps =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(mc.n_steps * h / (T - t))), 1, mc.n_steps);
  const std::size_t tail_steps = std::max<std::size_t>(mc.n_steps - head_steps, 1);
  const PathBundle outer = simulate_on_grid(coeffs, uniform_grid(t, mid, head_steps), s, cfg, {mc.seed, {1}});

  std::vector<double> samples(outer.n_paths);
  const bool has_tail = mid < T;
  std::vector<double> tail_grid = has_tail ? uniform_grid(mid, T, tail_steps) : std::vector<double>{};
  parallel_chunks(outer.n_paths, worker_count(mc.workers), [&](std::size_t begin, std::size_t end, int) {
    std::unique_ptr<PathSimulator> inner_sim;
    PathBundle inner;
    if (has_tail) {
      inner_sim = std::make_unique<PathSimulator>(coeffs, tail_grid);
      inner.time_grid = tail_grid;
      inner.n_paths = rep.inner_paths;
      inner.prices.resize(rep.inner_paths * tail_grid.size());
      inner.jumps.resize(rep.inner_paths);
    }
    for (std::size_t o = begin; o < end; ++o) {
      double y = path_value(outer, o, coeffs, adm, opts);
      if (has_tail) {
        const double s_mid = outer.price(o, outer.n_times() - 1);
        const SeedRecord inner_seeds{mc.seed, {2, static_cast<std::uint64_t>(o)}};
        double acc = 0.0;
        for (std::size_t i = 0; i < rep.inner_paths; ++i) {
          Engine rng = make_stream(inner_seeds, i);
          inner_sim->simulate(rng, s_mid, inner.prices.data() + i * tail_grid.size(), &inner.jumps[i]);
          acc += path_value(inner, i, coeffs, adm, opts);
        }
        y += acc / static_cast<double>(rep.inner_paths);
      }
      samples[o] = y;
    }
  });
  const Sample nested = summarize(samples);
  rep.nested = nested.mean;
  rep.nested_se = nested.std_err;
  rep.combined_se = std::hypot(rep.direct_se, rep.nested_se);
  rep.discrepancy = rep.combined_se > 0.0 ? (rep.nested - rep.direct) / rep.combined_se
                                          : (rep.nested == rep.direct ? 0.0 : kInfinity);
  return rep;
}

std::vector<ValuePoint> value_surface(const std::vector<double>& t_grid, const std::vector<double>& s_grid,
                                      const MarketCoefficients& coeffs, const AdmissibleSet& adm,
                                      const SimConfig& mc, const ValueOptions& opts) {
  std::vector<ValuePoint> out;
  for (double t : t_grid) {
    for (double s : s_grid) {
      const ValueEstimate est = estimate_value(t, s, coeffs, adm, mc, opts);
      out.push_back({t, s, est.g_hat, est.std_err});
    }
  }
  return out;
}

void write_wealth_csv(std::ostream& out, const WealthRun& run) {
  CsvWriter w(out);
  w.comment("strategy: " + to_string(run.label));
  w.comment("x0: " + format_double(run.x0));
  w.comment("positivity_violations: " + std::to_string(run.positivity_violations));
  w.header({"path_id", "log_terminal_wealth"});
  for (std::size_t p = 0; p < run.log_terminal_wealth.size(); ++p) {
    w.field(static_cast<long long>(p)).field(run.log_terminal_wealth[p]);
    w.end_row();
  }
}

void write_value_csv(std::ostream& out, const std::vector<ValuePoint>& points) {
  CsvWriter w(out);
  w.header({"t", "s", "g_hat", "std_err"});
  for (const ValuePoint& v : points) {
    w.field(v.t).field(v.s).field(v.g_hat).field(v.std_err);
    w.end_row();
  }
}

}  // namespace levyou
