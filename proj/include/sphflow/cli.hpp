#pragma once

// Command-line front end: verify, flow, kr, convergence.
// Exit codes: 0 ok, 1 a check failed, 2 bad configuration, 3 flow blow-up.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "sphflow/checks.hpp"
#include "sphflow/io.hpp"

namespace sphflow {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitConfig = 2, kExitBlowUp = 3 };

class ConfigError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig
{
  std::string command;
  int L = 32;
  int oversample = 2;
  std::uint64_t seed = 7;
  std::optional<int> l_max_data;  ///< unset: min(6, L/4)
  double floor = 2.0;
  double amplitude = 1.0;
  std::string init = "round";  ///< round | kr | random | file:PATH
  double a0 = 1.0;
  double b0 = 0.5;
  std::optional<double> t_end;  ///< unset: 0.1 for flow, 0.05 for kr
  std::optional<double> dt;     ///< unset: 1 / (max v L (L + 1)) every step
  int stride = 10;
  std::vector<double> alphas{0.0, 1.0, 2.0};
  double tol = 1e-6;
  std::string report_path;
  std::string csv_path;
  std::vector<int> lmax_list{16, 24, 32, 48};
  bool inject_z_bug = false;

  int data_degree() const { return l_max_data ? *l_max_data : std::min(6, L / 4); }
  double end_time() const { return t_end ? *t_end : (command == "kr" ? 0.05 : 0.1); }
};

// ---------------------------------------------------------------------------
// value parsing shared by flags and the config file

namespace detail {

inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
  T out{};
  const auto s = trim(text);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || s.empty())
    throw ConfigError("invalid value for " + key + ": '" + text + "'");
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text)
{
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<T>(key, item));
  if (out.empty()) throw ConfigError("empty list for " + key);
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& text)
{
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + text + "'");
}

inline std::string canonical_key(std::string key)
{
  for (auto& c : key)
    if (c == '_') c = '-';
  return key;
}

}  // namespace detail

/// Set one configuration key (flag name without the leading dashes;
/// '-' and '_' are interchangeable). Unknown keys are rejected.
inline void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value)
{
  using namespace detail;
  const auto key = canonical_key(trim(raw_key));
  if (key == "lmax")
    cfg.L = parse_number<int>(key, value);
  else if (key == "oversample")
    cfg.oversample = parse_number<int>(key, value);
  else if (key == "seed")
    cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "l-max-data")
    cfg.l_max_data = parse_number<int>(key, value);
  else if (key == "floor")
    cfg.floor = parse_number<double>(key, value);
  else if (key == "amplitude")
    cfg.amplitude = parse_number<double>(key, value);
  else if (key == "init")
    cfg.init = trim(value);
  else if (key == "a0")
    cfg.a0 = parse_number<double>(key, value);
  else if (key == "b0")
    cfg.b0 = parse_number<double>(key, value);
  else if (key == "t-end")
    cfg.t_end = parse_number<double>(key, value);
  else if (key == "dt") {
    if (trim(value) == "auto")
      cfg.dt.reset();
    else
      cfg.dt = parse_number<double>(key, value);
  } else if (key == "stride")
    cfg.stride = parse_number<int>(key, value);
  else if (key == "alphas")
    cfg.alphas = parse_list<double>(key, value);
  else if (key == "tol")
    cfg.tol = parse_number<double>(key, value);
  else if (key == "report")
    cfg.report_path = trim(value);
  else if (key == "csv")
    cfg.csv_path = trim(value);
  else if (key == "lmax-list")
    cfg.lmax_list = parse_list<int>(key, value);
  else if (key == "inject-z-bug")
    cfg.inject_z_bug = parse_bool(key, value);
  else
    throw ConfigError("unknown configuration key '" + raw_key + "'");
}

/// Flat key = value file; '#' starts a comment.
inline void apply_config_file(RunConfig& cfg, const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

inline void validate(const RunConfig& cfg)
{
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(cfg.L >= 4, "lmax must be >= 4");
  require(cfg.oversample >= 2, "oversample must be >= 2");
  require(cfg.floor > 0.0, "floor must be positive");
  require(cfg.amplitude >= 0.0 && cfg.amplitude < cfg.floor, "amplitude must satisfy 0 <= amplitude < floor");
  const int d = cfg.data_degree();
  require(d >= 1 && d <= cfg.L / 4, "l-max-data must satisfy 1 <= l-max-data <= lmax/4");
  require(cfg.end_time() >= 0.0, "t-end must be >= 0");
  require(!cfg.dt || *cfg.dt > 0.0, "dt must be positive");
  require(cfg.stride >= 1, "stride must be >= 1");
  require(!cfg.alphas.empty(), "alphas must not be empty");
  require(cfg.tol > 0.0, "tol must be positive");
  require(cfg.init == "round" || cfg.init == "kr" || cfg.init == "random" || cfg.init.rfind("file:", 0) == 0,
          "init must be round, kr, random or file:PATH");
  if (cfg.init == "round" || cfg.command == "verify") require(cfg.a0 > 0.0, "a0 must be positive");
  if (cfg.init == "kr" || cfg.command == "kr")
    require(KRParams{cfg.a0, cfg.b0}.valid(), "King-Rosenau parameters need a0 > 0 and a0 + b0 > 0");
  if (cfg.command == "convergence") {
    require(cfg.lmax_list.size() >= 2, "lmax-list needs at least two entries");
    for (int L : cfg.lmax_list) require(L >= 4, "every lmax-list entry must be >= 4");
  }
}

// ---------------------------------------------------------------------------
// commands

namespace detail {

inline void print_reports(std::ostream& out, const std::vector<ResidualReport>& reports)
{
  for (const auto& r : reports)
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  L=" << r.L << "  rel=" << r.rel_residual
        << "  tol=" << r.tolerance << '\n';
}

inline bool all_passed(const std::vector<ResidualReport>& reports)
{
  for (const auto& r : reports)
    if (!r.passed) return false;
  return true;
}

inline void write_report(const RunConfig& cfg, const std::vector<ResidualReport>& reports,
                         const nlohmann::ordered_json& extra = {})
{
  if (cfg.report_path.empty()) return;
  auto doc = report_document(cfg.command, reports);
  for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
  if (extra.contains("failure")) doc["all_passed"] = false;
  write_atomic(cfg.report_path, doc.dump(2) + "\n");
}

inline void write_csv(const RunConfig& cfg, const CsvTable& table)
{
  if (!cfg.csv_path.empty()) write_atomic(cfg.csv_path, table.str());
}

/// v = 2 + x3/2 + 3 x1/10 - x2/5, pure l <= 1 content.
inline ScalarField degree_one_field(const GridPtr& grid)
{
  return ScalarField::sample_xyz(grid, [](double x, double y, double z) { return 2.0 + 0.5 * z + 0.3 * x - 0.2 * y; });
}

/// Parameter pairs used for King-Rosenau checks (one with b < 0; all with R > 0).
inline std::vector<KRParams> kr_test_params() { return {{1.0, 0.5}, {1.0, -0.5}, {2.0, 1.0}}; }

inline std::string kr_tag(const KRParams& p)
{
  std::ostringstream os;
  os << "a" << p.a << "_b" << p.b;
  return os.str();
}

/// Initial data for flow runs.
inline ScalarField initial_field(const RunConfig& cfg, const GridPtr& grid)
{
  if (cfg.init == "round") return ScalarField::constant(grid, cfg.a0);
  if (cfg.init == "kr") return kr_field({cfg.a0, cfg.b0}, grid);
  if (cfg.init == "random") return random_band_limited(cfg.seed, cfg.data_degree(), cfg.floor, cfg.amplitude, grid);
  const auto path = cfg.init.substr(5);
  ScalarField v(grid);
  try {
    v = sh_synthesize(read_coefficient_file(path, grid->L()), grid);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("coefficient file: ") + e.what());
  }
  if (!(v.min() > 0.0)) throw ConfigError("coefficient file " + path + " does not give a positive pressure");
  return v;
}

}  // namespace detail

/// The full report battery at the configured band limit.
inline std::vector<ResidualReport> verify_reports(const RunConfig& cfg)
{
  std::optional<ScopedZBugInjection> bug;
  if (cfg.inject_z_bug) bug.emplace();

  const auto grid = build_grid(cfg.L, cfg.oversample);
  const int d = cfg.data_degree();
  std::vector<ResidualReport> out;
  auto add = [&](const std::string& name, int lmd, double tol, const std::function<ResidualReport()>& fn) {
    out.push_back(guarded(name, grid, lmd, tol, fn));
  };
  const std::vector<std::uint64_t> seeds{cfg.seed, cfg.seed + 1, cfg.seed + 2};
  auto random_v = [&](std::uint64_t s, double amplitude) {
    return random_band_limited(s, d, cfg.floor, amplitude, grid);
  };

  // tensor stack
  for (auto s : seeds) {
    const auto name = "z_identity_seed_" + std::to_string(s);
    add(name, d, 1e-7, [&] { return z_identity_report(random_v(s, cfg.amplitude), name, d); });
  }
  const auto v0 = random_v(cfg.seed, cfg.amplitude);
  add("tfb_trace_free", d, 1e-9, [&] { return tfb_trace_report(v0, d); });
  add("commutator_defect", d, 1e-7, [&] { return commutator_report(v0, d); });
  for (auto& r : decompose4_reports(v0, d)) out.push_back(std::move(r));

  // Q
  for (const auto& p : detail::kr_test_params()) {
    const auto name = "q_vanishes_kr_" + detail::kr_tag(p);
    add(name, 2, 1e-9, [&] { return q_vanishing_report(kr_field(p, grid), name, 2); });
  }
  const auto constant = ScalarField::constant(grid, 2.0);
  const auto degree_one = detail::degree_one_field(grid);
  const auto kr = kr_field(detail::kr_test_params().front(), grid);
  add("q_equation_constant", 0, cfg.tol, [&] { return q_residual(constant, "q_equation_constant", 0, cfg.tol); });
  add("q_equation_degree_one", 1, cfg.tol, [&] { return q_residual(degree_one, "q_equation_degree_one", 1, cfg.tol); });
  add("q_equation_kr", 2, cfg.tol, [&] { return q_residual(kr, "q_equation_kr", 2, cfg.tol); });
  for (auto s : seeds) {
    const auto name = "q_equation_random_seed_" + std::to_string(s);
    add(name, d, cfg.tol, [&] { return q_residual(random_v(s, cfg.amplitude), name, d, cfg.tol); });
  }
  add("q_squared_terms_constant", 0, 1e-9, [&] { return q_squared_terms_report(constant, "q_squared_terms_constant", 0); });
  add("q_squared_terms_degree_one", 1, 1e-9,
      [&] { return q_squared_terms_report(degree_one, "q_squared_terms_degree_one", 1); });
  add("q_squared_terms_kr", 2, 1e-9, [&] { return q_squared_terms_report(kr, "q_squared_terms_kr", 2); });

  // Harnack quantity; random data at amplitude <= floor/4 keep R > 0
  const double remark_amp = std::min(cfg.amplitude, 0.25 * cfg.floor);
  for (auto s : seeds) {
    const auto tag = "_random_seed_" + std::to_string(s);
    const auto v = random_v(s, remark_amp);
    add("remark_identity" + tag, d, 1e-7, [&] { return remark_identity_residual(v, d, 1e-7, "remark_identity" + tag); });
    add("sentinel" + tag, d, 1e-8, [&] {
      auto r = sentinel_residual(v, d);
      r.name += tag;
      return r;
    });
    add("a_reduction" + tag, d, 1e-7, [&] {
      auto r = a_reduction_residual(v, d);
      r.name += tag;
      return r;
    });
  }
  for (const auto& p : detail::kr_test_params()) {
    const auto tag = "_kr_" + detail::kr_tag(p);
    const auto v = kr_field(p, grid);
    add("remark_identity" + tag, 2, 1e-8, [&] { return remark_identity_residual(v, 2, 1e-8, "remark_identity" + tag); });
    add("a_reduction" + tag, 2, 1e-7, [&] {
      auto r = a_reduction_residual(v, 2);
      r.name += tag;
      return r;
    });
    add("a_nonnegative" + tag, 2, 1e-9, [&] {
      const auto a = harnack_A(v);
      return nonnegativity_report(a, a.sup_norm(), "a_nonnegative" + tag, 2);
    });
    add("fourth_order_nonnegative" + tag, 2, 1e-9, [&] {
      const auto dq = fourth_order_quantity(v);
      return nonnegativity_report(dq, dq.sup_norm(), "fourth_order_nonnegative" + tag, 2);
    });
  }

  // J_alpha along the King-Rosenau flow and J_2 on the round flow
  const auto jgrid = build_grid(std::min(cfg.L, 16), cfg.oversample);
  try {
    const auto states = run_flow({0.0, kr_field({1.0, 0.5}, jgrid)}, 0.05, TimeStepPolicy{1e-4}, 1);
    for (auto& r : j_reports(j_monotonicity_report(states, cfg.alphas), jgrid, 2)) out.push_back(std::move(r));
  } catch (const std::exception& e) {
    out.push_back(detail::failed_report("j_formula_kr_flow", jgrid, 2, 1e-5, e.what()));
  }
  out.push_back(guarded("j2_round_closed_form", jgrid, 0, 1e-8, [&] {
    const double a0 = 1.0, t = 0.1;
    const auto states = run_flow({0.0, ScalarField::constant(jgrid, a0)}, t, {}, 1 << 30);
    const double exact = -16.0 * std::numbers::pi * std::log(round_pressure(a0, t));
    const double err = std::abs(j_alpha(states.back().v, 2.0) - exact);
    return make_report("j2_round_closed_form", jgrid, 0, err, err / std::abs(exact), 1e-8);
  }));
  return out;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out)
{
  const auto reports = verify_reports(cfg);
  detail::print_reports(out, reports);
  detail::write_report(cfg, reports);
  return detail::all_passed(reports) ? kExitOk : kExitFailed;
}

inline int cmd_flow(const RunConfig& cfg, std::ostream& out)
{
  const auto grid = build_grid(cfg.L, cfg.oversample);
  const auto v0 = detail::initial_field(cfg, grid);
  const double t_end = cfg.end_time();
  const auto states = run_flow({0.0, v0}, t_end, TimeStepPolicy{cfg.dt}, cfg.stride);

  CsvTable csv;
  csv.header = {"t", "v_min", "v_max", "R_min", "R_max", "Q_sup"};
  for (double a : cfg.alphas) csv.header.push_back("J_" + alpha_label(a));
  csv.header.push_back("q_rel_residual");
  for (const auto& s : states) {
    const auto r = scalar_curvature(s.v);
    std::vector<double> row{s.t, s.v.min(), s.v.max(), r.min(), r.max(), q_field(s.v).sup_norm()};
    for (double a : cfg.alphas) row.push_back(j_alpha(s.v, a));
    row.push_back(q_residual(s.v, "q", cfg.data_degree(), cfg.tol).rel_residual);
    csv.rows.push_back(std::move(row));
  }
  detail::write_csv(cfg, csv);

  std::vector<ResidualReport> reports;
  const auto& last = states.back();
  if (cfg.init == "round") {
    const double exact = round_pressure(cfg.a0, last.t);
    const double err = (last.v + (-exact)).sup_norm();
    reports.push_back(make_report("round_closed_form", grid, 0, err, err / exact, 1e-8));
  } else if (cfg.init == "kr") {
    const auto exact = kr_field(kr_evolve({cfg.a0, cfg.b0}, last.t), grid);
    const double err = (last.v - exact).sup_norm();
    reports.push_back(make_report("kr_pde_ode_distance", grid, 2, err, err, 1e-6));
  }
  out << "t_end=" << last.t << "  v_min=" << last.v.min() << "  v_max=" << format_double(last.v.max())
      << "  states=" << states.size() << '\n';
  detail::print_reports(out, reports);
  detail::write_report(cfg, reports);
  return detail::all_passed(reports) ? kExitOk : kExitFailed;
}

inline int cmd_kr(const RunConfig& cfg, std::ostream& out)
{
  const auto grid = build_grid(cfg.L, cfg.oversample);
  const KRParams p0{cfg.a0, cfg.b0};
  const auto states = run_flow({0.0, kr_field(p0, grid)}, cfg.end_time(), TimeStepPolicy{cfg.dt}, cfg.stride);

  CsvTable csv;
  csv.header = {"t", "a", "b", "pde_ode_sup_distance", "Q_sup", "Q_rel", "ab"};
  double worst_dist = 0.0, worst_q = 0.0, worst_ab = 0.0;
  const double ab0 = p0.a * p0.b;
  for (const auto& s : states) {
    const auto p = kr_evolve(p0, s.t);
    const double dist = (s.v - kr_field(p, grid)).sup_norm();
    const double q_sup = q_field(s.v).sup_norm();
    const double q_rel = q_sup / q_natural_scale(s.v);
    const double ab_err = ab0 != 0.0 ? std::abs(p.a * p.b - ab0) / std::abs(ab0) : std::abs(p.a * p.b);
    worst_dist = std::max(worst_dist, dist);
    worst_q = std::max(worst_q, q_rel);
    worst_ab = std::max(worst_ab, ab_err);
    csv.rows.push_back({s.t, p.a, p.b, dist, q_sup, q_rel, p.a * p.b});
  }
  detail::write_csv(cfg, csv);
  const std::vector<ResidualReport> reports{
      make_report("kr_pde_ode_distance", grid, 2, worst_dist, worst_dist, 1e-6),
      make_report("kr_q_vanishing", grid, 2, worst_q, worst_q, 1e-9),
      make_report("kr_ab_conservation", grid, 2, worst_ab, worst_ab, 1e-10)};
  detail::print_reports(out, reports);
  detail::write_report(cfg, reports);
  return detail::all_passed(reports) ? kExitOk : kExitFailed;
}

/// Frozen data for refinement sweeps: a Poisson-kernel sum, analytic but
/// not band-limited, so the residual keeps falling as L grows.
inline ScalarField convergence_data(const RunConfig& cfg, const GridPtr& grid)
{
  return random_analytic(cfg.seed, cfg.floor, cfg.amplitude, 0.5, 6, grid);
}

inline int cmd_convergence(const RunConfig& cfg, std::ostream& out)
{
  CsvTable csv;
  csv.header = {"L", "rel_residual"};
  std::vector<ResidualReport> reports;
  double previous = 1.0;
  for (int L : cfg.lmax_list) {
    const auto grid = build_grid(L, cfg.oversample);
    auto r = q_residual(convergence_data(cfg, grid), "q_convergence_L" + std::to_string(L), 0, previous);
    r.passed = std::isfinite(r.rel_residual) && r.rel_residual < previous;
    previous = r.rel_residual;
    csv.rows.push_back({static_cast<double>(L), r.rel_residual});
    reports.push_back(std::move(r));
  }
  detail::write_csv(cfg, csv);
  detail::print_reports(out, reports);
  detail::write_report(cfg, reports);
  return detail::all_passed(reports) ? kExitOk : kExitFailed;
}

inline int run_command(const RunConfig& cfg, std::ostream& out)
{
  if (cfg.command == "verify") return cmd_verify(cfg, out);
  if (cfg.command == "flow") return cmd_flow(cfg, out);
  if (cfg.command == "kr") return cmd_kr(cfg, out);
  if (cfg.command == "convergence") return cmd_convergence(cfg, out);
  throw ConfigError("unknown command " + cfg.command);
}

/// Parse argv, merge config file and flags (flags win), run, map errors to exit codes.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
  CLI::App app{"Pseudospectral Ricci-flow lab on the 2-sphere"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value file; flags override it");

  // every flag is collected as text and applied through apply_setting
  const std::vector<std::pair<std::string, std::string>> value_flags{
      {"lmax", "band limit L"},
      {"oversample", "grid oversampling factor"},
      {"seed", "random seed"},
      {"l-max-data", "degree of random data (default min(6, L/4))"},
      {"floor", "mean of random data"},
      {"amplitude", "sup of the random perturbation"},
      {"init", "round | kr | random | file:PATH"},
      {"a0", "round / King-Rosenau a"},
      {"b0", "King-Rosenau b"},
      {"t-end", "final time"},
      {"dt", "time step or 'auto'"},
      {"stride", "record every n-th state"},
      {"alphas", "comma-separated alpha values"},
      {"tol", "Q-equation tolerance"},
      {"report", "report JSON path"},
      {"csv", "CSV path"},
      {"lmax-list", "comma-separated band limits"}};
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  for (const auto& [name, help] : value_flags) options.emplace_back(name, app.add_option("--" + name, values[name], help));
  bool inject = false;
  auto* inject_opt = app.add_flag("--inject-z-bug", inject, "test only: corrupt z by a factor 4/3");

  const std::pair<const char*, const char*> commands[] = {
      {"verify", "run the residual battery at --lmax"},
      {"flow", "evolve --init data to --t-end, write the series CSV"},
      {"kr", "King-Rosenau run: PDE against the coefficient ODE"},
      {"convergence", "Q-equation residual over --lmax-list on frozen data"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    for (const auto& [name, opt] : options)
      if (opt->count() > 0) apply_setting(cfg, name, values[name]);
    if (inject_opt->count() > 0) cfg.inject_z_bug = inject;
    validate(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    return run_command(cfg, out);
  } catch (const PositivityError& e) {
    err << "blow-up: " << e.what() << '\n';
    if (!cfg.report_path.empty()) {
      nlohmann::ordered_json extra;
      extra["failure"] = {{"time", e.time()}, {"message", e.what()}};
      detail::write_report(cfg, {}, extra);
    }
    return kExitBlowUp;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "blow-up: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace sphflow
