#include "levyou/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "levyou/csv.hpp"
#include "levyou/errors.hpp"
#include "levyou/market_model.hpp"
#include "levyou/presets.hpp"
#include "levyou/strategy_approx.hpp"
#include "levyou/strategy_core.hpp"
#include "levyou/svg.hpp"
#include "levyou/value_mc.hpp"

namespace levyou {

namespace {

const char* const kSettingKeys[] = {"preset", "b", "b_frac", "pi_min", "pi_max", "compensated", "t",
                                    "s", "s_grid", "x0", "paths", "steps", "seed", "fractions",
                                    "out", "table"};

using Settings = std::map<std::string, std::string>;

struct Grid {
  double lo;
  double hi;
  std::size_t n;
};

double to_double(const Settings& st, const std::string& key, double fallback) {
  auto it = st.find(key);
  if (it == st.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("invalid number for " + key + ": '" + it->second + "'");
  }
}

std::size_t to_count(const Settings& st, const std::string& key, std::size_t fallback) {
  const double v = to_double(st, key, static_cast<double>(fallback));
  if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(key + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
  std::string v = text;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

bool flag(const Settings& st, const std::string& key) {
  auto it = st.find(key);
  return it != st.end() && to_bool(key, it->second);
}

std::optional<Grid> grid_setting(const Settings& st) {
  auto it = st.find("s_grid");
  if (it == st.end()) return std::nullopt;
  std::vector<std::string> parts;
  std::stringstream ss(it->second);
  std::string piece;
  while (std::getline(ss, piece, ':')) parts.push_back(piece);
  if (parts.size() != 3) throw ConfigError("--s-grid expects min:max:n, got '" + it->second + "'");
  Settings tmp{{"lo", parts[0]}, {"hi", parts[1]}, {"n", parts[2]}};
  Grid g{to_double(tmp, "lo", 0), to_double(tmp, "hi", 0), to_count(tmp, "n", 1)};
  if (!(g.hi >= g.lo)) throw ConfigError("--s-grid needs max >= min");
  return g;
}

std::vector<double> expand(const Grid& g) {
  std::vector<double> v(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    v[i] = g.n == 1 ? g.lo : g.lo + (g.hi - g.lo) * static_cast<double>(i) / static_cast<double>(g.n - 1);
  }
  return v;
}

std::vector<double> fraction_list(const Settings& st) {
  auto it = st.find("fractions");
  if (it == st.end()) return {1.5, 0.8, 0.5, 0.2};
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    Settings tmp{{"fraction", piece}};
    out.push_back(to_double(tmp, "fraction", 0));
  }
  if (out.empty()) throw ConfigError("--fractions is empty");
  return out;
}

void load_config(const std::string& path, Settings& st, const std::string& cli_preset) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot read config '" + path + "': " + e.message());
  }
  auto apply = [&](const boost::property_tree::ptree& node, const std::string& where) {
    for (const auto& [key, child] : node) {
      if (!child.empty()) continue;
      const auto* known = std::find(std::begin(kSettingKeys), std::end(kSettingKeys), key);
      if (known == std::end(kSettingKeys)) throw ConfigError("unknown key '" + key + "' in " + where + " of " + path);
      st[key] = child.data();
    }
  };
  apply(tree, "top level");
  const std::string preset = cli_preset.empty() ? (st.count("preset") ? st["preset"] : "benth2012") : cli_preset;
  if (auto section = tree.get_child_optional(preset)) apply(*section, "section [" + preset + "]");
}

Preset build_preset(const Settings& st, std::optional<double> b_frac_override = std::nullopt) {
  PresetOverrides ov;
  if (st.count("b")) ov.b = to_double(st, "b", 0);
  if (st.count("b_frac")) ov.b_frac = to_double(st, "b_frac", 0);
  if (b_frac_override) {
    ov.b.reset();
    ov.b_frac = b_frac_override;
  }
  if (st.count("pi_min")) ov.pi_min = to_double(st, "pi_min", 0);
  if (st.count("pi_max")) ov.pi_max = to_double(st, "pi_max", 0);
  if (st.count("compensated")) ov.compensated = to_bool("compensated", st.at("compensated"));
  const std::string name = st.count("preset") ? st.at("preset") : "benth2012";
  return make_preset(name, ov);
}

SimConfig sim_config(const Settings& st, std::size_t default_paths) {
  SimConfig cfg;
  cfg.n_paths = to_count(st, "paths", default_paths);
  cfg.n_steps = to_count(st, "steps", 24);
  const double seed = to_double(st, "seed", 1.0);
  if (!(seed >= 0.0) || seed != std::floor(seed)) throw ConfigError("seed must be a non-negative integer");
  cfg.seed = static_cast<std::uint64_t>(seed);
  return cfg;
}

double reversion_level(const Preset& p) { return p.coeffs.compensated_drift(0.0) / p.coeffs.lambda; }

std::vector<double> default_s_grid(const Settings& st, const Preset& p, std::size_t n) {
  if (auto g = grid_setting(st)) return expand(*g);
  if (st.count("s")) return {to_double(st, "s", 0)};
  const double top = reversion_level(p) > 0.0 ? 1.1 * reversion_level(p) : 10.0;
  return expand({0.0, top, n});
}

// Output goes to --out when given, otherwise to the command's stdout stream.
class Sink {
 public:
  Sink(const Settings& st, std::ostream& fallback) {
    auto it = st.find("out");
    if (it == st.end() || it->second == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(it->second);
    if (!*file_) throw ConfigError("cannot open output file '" + it->second + "'");
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::shared_ptr<const PolicyTable> maybe_table(const Settings& st, const Preset& p) {
  if (!flag(st, "table")) return nullptr;
  return std::make_shared<const PolicyTable>(p.coeffs, p.admissible());
}

double bound_or_nan(const std::function<ApproxBound()>& f) {
  try {
    return f().bound_value;
  } catch (const CaseError&) {
    return std::numeric_limits<double>::quiet_NaN();
  } catch (const ConfigError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void cmd_solve(const Settings& st, std::ostream& out) {
  const Preset p = build_preset(st);
  const AdmissibleSet adm = p.admissible();
  const double t = to_double(st, "t", 0.0);
  const auto s_grid = default_s_grid(st, p, 101);
  const double bm = bound_or_nan([&] { return merton_error_bound(p.coeffs, adm); });
  const double bj = bound_or_nan([&] { return jump_mean_error_bound(p.coeffs, adm); });
  Sink sink(st, out);
  CsvWriter w(sink.stream());
  w.comment("preset: " + p.name + ", b = " + format_double(p.b()) + ", t = " + format_double(t));
  w.header({"s", "pi_exact", "pi_merton", "pi_jump_mean", "bound_merton", "bound_jump_mean"});
  for (double s : s_grid) {
    w.field(s)
        .field(optimal_fraction(t, s, p.coeffs, adm).pi)
        .field(merton_fraction(t, s, p.coeffs, adm).pi)
        .field(jump_mean_fraction(t, s, p.coeffs, adm).pi)
        .field(bm)
        .field(bj);
    w.end_row();
  }
}

std::string fraction_tag(double frac) {
  const long pct = std::lround(frac * 100.0);
  return "b_" + std::to_string(pct) + "pct";
}

void cmd_figure(const Settings& st, std::ostream& out) {
  const std::filesystem::path dir = st.count("out") ? st.at("out") : "figure";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const double t = to_double(st, "t", 0.0);
  const std::size_t n = grid_setting(st) ? grid_setting(st)->n : 221;
  CsvWriter summary(out);
  summary.header({"fraction", "b", "max_gap_jump_mean", "max_gap_merton", "bound_jump_mean", "ordering_holds",
                  "csv", "svg"});
  for (double frac : fraction_list(st)) {
    const Preset p = build_preset(st, frac);
    const AdmissibleSet adm = p.admissible();
    const double level = reversion_level(p);
    if (!(level > 0.0)) throw ConfigError("figure needs b > 0 (fraction " + format_double(frac) + ")");
    const auto s_grid = expand({0.0, 1.1 * level, std::max<std::size_t>(n, 2)});
    std::vector<double> exact, merton, jmean;
    double gap2 = 0.0, gap1 = 0.0;
    bool ordered = true;
    for (double s : s_grid) {
      exact.push_back(optimal_fraction(t, s, p.coeffs, adm).pi);
      merton.push_back(merton_fraction(t, s, p.coeffs, adm).pi);
      jmean.push_back(jump_mean_fraction(t, s, p.coeffs, adm).pi);
      gap2 = std::max(gap2, std::abs(exact.back() - jmean.back()));
      gap1 = std::max(gap1, std::abs(exact.back() - merton.back()));
      ordered = ordered && merton.back() <= exact.back() + 1e-8 && exact.back() <= jmean.back() + 1e-8;
    }
    const std::string tag = fraction_tag(frac);
    const auto csv_path = dir / (tag + ".csv");
    const auto svg_path = dir / (tag + ".svg");
    {
      std::ofstream f(csv_path);
      if (!f) throw ConfigError("cannot write " + csv_path.string());
      CsvWriter w(f);
      w.comment("preset: " + p.name + ", b = " + format_double(frac) + " * mu_L = " + format_double(p.b()));
      w.header({"s", "pi_exact", "pi_merton", "pi_jump_mean"});
      for (std::size_t i = 0; i < s_grid.size(); ++i) {
        w.field(s_grid[i]).field(exact[i]).field(merton[i]).field(jmean[i]);
        w.end_row();
      }
    }
    {
      std::ofstream f(svg_path);
      if (!f) throw ConfigError("cannot write " + svg_path.string());
      char title[96];
      std::snprintf(title, sizeof title, "b = %g%% of mu_L", frac * 100.0);
      write_line_chart_svg(f, title, "price s", "fraction",
                           s_grid,
                           {{"exact", "#1f77b4", exact}, {"merton", "#ff7f0e", merton}, {"jump mean", "#d62728", jmean}});
    }
    const double bj = bound_or_nan([&] { return jump_mean_error_bound(p.coeffs, adm); });
    summary.field(frac).field(p.b()).field(gap2).field(gap1).field(bj).field(ordered ? "yes" : "no");
    summary.field(csv_path.string()).field(svg_path.string());
    summary.end_row();
  }
}

void cmd_simulate(const Settings& st, std::ostream& out, std::ostream& err) {
  const Preset p = build_preset(st);
  const double t = to_double(st, "t", 0.0);
  const double s = to_double(st, "s", 5.0);
  SimConfig cfg = sim_config(st, 1000);
  cfg.keep_jumps = false;
  const PathBundle paths = simulate_paths(p.coeffs, t, s, cfg);
  Sink sink(st, out);
  write_paths_csv(sink.stream(), paths);

  std::ostream& report = sink.to_file() ? out : err;
  CsvWriter w(report);
  w.header({"time", "analytic_mean", "empirical_mean", "mean_se", "analytic_variance", "empirical_variance",
            "min_price"});
  const std::size_t last = paths.n_times() - 1;
  for (std::size_t k : {last / 2, last}) {
    double sum = 0.0, sq = 0.0, lo = kInfinity;
    for (std::size_t i = 0; i < paths.n_paths; ++i) {
      const double v = paths.price(i, k);
      sum += v;
      lo = std::min(lo, v);
    }
    const double n = static_cast<double>(paths.n_paths);
    const double mean = sum / n;
    for (std::size_t i = 0; i < paths.n_paths; ++i) sq += (paths.price(i, k) - mean) * (paths.price(i, k) - mean);
    const double var = paths.n_paths > 1 ? sq / (n - 1.0) : 0.0;
    const double u = paths.time_grid[k];
    w.field(u)
        .field(analytic_mean(p.coeffs, t, s, u))
        .field(mean)
        .field(std::sqrt(var / n))
        .field(analytic_variance(p.coeffs, t, u))
        .field(var)
        .field(lo);
    w.end_row();
  }
}

void cmd_value(const Settings& st, std::ostream& out) {
  const Preset p = build_preset(st);
  const AdmissibleSet adm = p.admissible();
  const double t = to_double(st, "t", 0.0);
  const auto s_grid = default_s_grid(st, p, 11);
  const SimConfig cfg = sim_config(st, 2000);
  ValueOptions vo;
  vo.table = maybe_table(st, p);
  const auto points = value_surface({t}, s_grid, p.coeffs, adm, cfg, vo);
  Sink sink(st, out);
  write_value_csv(sink.stream(), points);
}

void cmd_compare(const Settings& st, std::ostream& out) {
  const Preset p = build_preset(st);
  const AdmissibleSet adm = p.admissible();
  const double t = to_double(st, "t", 0.0);
  const double s = to_double(st, "s", 5.0);
  const double x = to_double(st, "x0", 1.0);
  if (!(x > 0.0)) throw ConfigError("--x0 must be positive");
  SimConfig cfg = sim_config(st, 2000);
  cfg.keep_jumps = true;
  ValueOptions vo;
  vo.table = maybe_table(st, p);
  const PathBundle paths = simulate_paths(p.coeffs, t, s, cfg);
  const StrategySurface exact = vo.table ? exact_surface(vo.table) : exact_surface(p.coeffs, adm);
  const std::vector<StrategySurface> surfaces = {exact, merton_surface(p.coeffs, adm),
                                                 jump_mean_surface(p.coeffs, adm), zero_surface()};
  Sink sink(st, out);
  CsvWriter w(sink.stream());
  w.comment("preset: " + p.name + ", b = " + format_double(p.b()) + ", t = " + format_double(t) +
            ", s = " + format_double(s) + ", paths = " + std::to_string(cfg.n_paths) +
            ", seed = " + std::to_string(cfg.seed));
  w.header({"strategy", "mean_log_wealth", "std_err", "positivity_violations"});
  for (const auto& surf : surfaces) {
    const WealthRun run = wealth_simulate(surf, paths, x, p.coeffs);
    w.field(to_string(surf.label())).field(run.mean()).field(run.std_err());
    w.field(static_cast<long long>(run.positivity_violations));
    w.end_row();
  }
  const ValueEstimate g = estimate_value(paths, p.coeffs, adm, vo);
  w.field("log_x_plus_g").field(std::log(x) + g.g_hat).field(g.std_err).field(0LL);
  w.end_row();
}

constexpr const char* kFooter = R"(Drift convention:
  --compensated true   b is the drift of the compensated jump form; the simulator
                       subtracts psi * eta * mu_F from b. With this convention the
                       optimal fraction vanishes at s = b / lambda (preset default).
  --compensated false  b is the drift of the raw (uncompensated) jump process; the
                       optimizer then works with b + psi * eta * mu_F.

Config file (--config): INI text with key = value lines. Keys at the top apply to
every preset; a [preset-name] section applies only to that preset. Command-line
flags override the file. Keys: preset b b_frac pi_min pi_max compensated t s
s_grid x0 paths steps seed fractions out table.

Environment: LEVYOU_THREADS caps the number of worker threads.
Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.)";

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal log-utility trading fractions for a mean-reverting Levy-driven price", "levyou"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(kFooter);

  std::map<std::string, std::string> flags;
  std::string config_path;
  auto add = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(name, [&flags, key](const std::string& v) { flags[key] = v; }, help);
  };
  add("--preset", "preset", "calibration preset: benth2012 (default), gaussian, uniform-a");
  add("--b", "b", "constant drift b (overrides --b-frac)");
  add("--b-frac", "b_frac", "drift as a multiple of mu_L (benth2012 default 0.8, an arbitrary choice)");
  add("--pi-min", "pi_min", "lower end of the trading interval Pi");
  add("--pi-max", "pi_max", "upper end of the trading interval Pi");
  add("--compensated", "compensated", "true|false: drift convention, see below");
  add("--t", "t", "start time (hours for the bundled presets), default 0");
  add("--s", "s", "start price");
  add("--s-grid", "s_grid", "price grid min:max:n");
  add("--x0", "x0", "initial wealth (compare), default 1");
  add("--paths", "paths", "number of Monte Carlo paths");
  add("--steps", "steps", "time steps on [t, T], default 24");
  add("--seed", "seed", "random seed, default 1");
  add("--out", "out", "output file (figure: output directory); '-' for stdout");
  add("--fractions", "fractions", "figure: comma-separated multiples of mu_L, default 1.5,0.8,0.5,0.2");
  app.add_flag_function(
      "--table", [&flags](std::int64_t) { flags["table"] = "true"; },
      "value/compare: evaluate f* through a precomputed policy table");
  app.add_option("--config", config_path, "INI file with default settings");

  auto* solve = app.add_subcommand("solve", "exact and approximate fractions on a price grid");
  auto* figure = app.add_subcommand("figure", "CSV and SVG of the three fractions for several drifts");
  auto* simulate = app.add_subcommand("simulate", "simulate price paths and compare moments");
  auto* value = app.add_subcommand("value", "Monte Carlo value function g(t, s)");
  auto* compare = app.add_subcommand("compare", "expected log wealth per strategy on common paths");
  auto* describe_cmd = app.add_subcommand("describe-preset", "print preset parameters and derived quantities");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitConfig;
  }

  try {
    Settings st;
    if (!config_path.empty()) load_config(config_path, st, flags.count("preset") ? flags["preset"] : "");
    for (const auto& [k, v] : flags) st[k] = v;

    if (solve->parsed()) {
      cmd_solve(st, out);
    } else if (figure->parsed()) {
      cmd_figure(st, out);
    } else if (simulate->parsed()) {
      cmd_simulate(st, out, err);
    } else if (value->parsed()) {
      cmd_value(st, out);
    } else if (compare->parsed()) {
      cmd_compare(st, out);
    } else if (describe_cmd->parsed()) {
      out << describe(build_preset(st));
    }
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace levyou
