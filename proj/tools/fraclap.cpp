// fraclap command line runner. Every command writes manifest.json and CSV
// profiles into --out. Exit codes: 2 config, 3 convergence, 4 verification.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/barriers.hpp"
#include "fraclap/boundary_analysis.hpp"
#include "fraclap/critical_exponents.hpp"
#include "fraclap/errors.hpp"
#include "fraclap/fractional_operator.hpp"
#include "fraclap/io.hpp"
#include "fraclap/kernel_integrals.hpp"
#include "fraclap/solvers.hpp"
#include "fraclap/sweep.hpp"

namespace fs = std::filesystem;
using namespace fraclap;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitVerification = 4;

struct Options {
  std::string out = ".";
  int threads = 0;
  double alpha = 0.5;
  double p = 2.5;
  // source f = kappa_f d^gamma, present when gamma is set
  std::optional<double> gamma;
  double kappa_f = 1.0;
  // exterior g = kappa_g dist^beta near Omega, present when beta is set
  std::optional<double> beta;
  double kappa_g = 1.0;
  double eta = 0.5;
  std::optional<double> tau;
  std::vector<double> taus;
  std::string tau_grid;
  std::string p_grid = "1.1:6:0.1";
  std::optional<double> beta_tilde;
  double tol = 1e-10;
  std::string method = "hybrid";
  int n = 2000;
  double grading = 3.0;
  double layer_depth = 0.0;
  double layer_ratio = 1.2;
  double sup_tol = 1e-9;
  int max_iters = 500;
  std::vector<int> levels = {8, 16, 32, 64, 128};
  bool terminal = true;
  double fit_lo = 0.0, fit_hi = 0.0;
  std::string kind = "existence";
  double t = 1.0;
  bool t_scan = false;
  double delta = 0.1;
  double collar_lo = 1e-4, collar_hi = 1e-2;
  int collar_count = 48;
  bool with_tau0 = true;
  int t_k_max = 6;
};

struct Run {
  std::string command;
  Json config = Json::object();
  Json results = Json::object();
  Json checks = Json::object();
  std::vector<std::string> artifacts;
  fs::path dir;

  bool passed() const {
    for (const auto& [k, v] : checks.items())
      if (!v.get<bool>()) return false;
    return true;
  }
  std::string path(const std::string& name) {
    artifacts.push_back(name);
    return (dir / name).string();
  }
};

std::ofstream open_csv(Run& run, const std::string& name) {
  std::ofstream os(run.path(name));
  if (!os) throw ConfigError("cannot write " + name);
  os << std::setprecision(17);
  return os;
}

void csv_profile(Run& run, const std::string& name, const GridFunction& u) {
  auto os = open_csv(run, name);
  write_csv(os, u);
}

void csv_margins(Run& run, const std::string& name, const VerifyReport& r) {
  auto os = open_csv(run, name);
  os << "d,value,residual,margin\n";
  for (const auto& p : r.points) os << p.d << ',' << p.value << ',' << p.residual << ',' << p.margin << '\n';
}

ProblemParams params_of(const Options& o) {
  ProblemParams pp;
  pp.alpha = o.alpha;
  pp.p = o.p;
  if (o.gamma) pp.source = SourceField::power(o.kappa_f, *o.gamma);
  if (o.beta) pp.exterior = ExteriorData::power(o.kappa_g, *o.beta, o.eta);
  pp.validate();
  return pp;
}

IterationConfig iteration_of(const Options& o) {
  IterationConfig c;
  c.sup_tol = o.sup_tol;
  c.max_iters = o.max_iters;
  c.exhaustion_levels = o.levels;
  c.terminal_level = o.terminal;
  c.validate();
  return c;
}

GridPtr grid_of(const Options& o) {
  if (o.n < 8) throw ConfigError("n must be >= 8");
  if (o.layer_depth > 0.0) return Grid1D::layered(o.n, o.grading, o.layer_depth, o.layer_ratio);
  return Grid1D::graded(o.n, o.grading);
}

AssemblyOptions assembly_of(const Options& o) {
  AssemblyOptions a;
  a.threads = o.threads;
  return a;
}

double within(double value, double target) { return std::abs(value - target) / std::abs(target); }

// ---- commands ----

void cmd_ctau(const Options& o, Run& run) {
  std::vector<double> taus = o.taus;
  if (!o.tau_grid.empty()) {
    const auto g = parse_range(o.tau_grid);
    taus.insert(taus.end(), g.begin(), g.end());
  }
  if (o.tau) taus.push_back(*o.tau);
  if (taus.empty()) throw ConfigError("ctau needs --tau or --tau-grid");
  auto os = open_csv(run, "ctau.csv");
  os << "tau,C,dC,d2C\n";
  Json rows = Json::array();
  for (double t : taus) {
    if (!(t > -1.0 && t < 2.0 * o.alpha)) throw ConfigError("tau outside (-1, 2 alpha)");
    const Jet j = eval_C_jet(t, o.alpha);
    os << t << ',' << j.v << ',' << j.d1 << ',' << j.d2 << '\n';
    rows.push_back({{"tau", t}, {"C", j.v}, {"dC", j.d1}, {"d2C", j.d2}});
  }
  run.results["values"] = rows;
  if (o.beta_tilde) {
    if (!(*o.beta_tilde > -1.0 && *o.beta_tilde <= 0.0)) throw ConfigError("beta-tilde outside (-1, 0]");
    run.results["C_tilde"] = {{"beta", *o.beta_tilde}, {"value", eval_C_tilde(*o.beta_tilde, o.alpha)}};
  }
}

void cmd_tau0(const Options& o, Run& run) {
  if (o.method != "hybrid" && o.method != "bisection") throw ConfigError("method must be hybrid or bisection");
  const auto kc = find_tau0(o.alpha, o.tol, {}, o.method == "hybrid" ? RootMethod::Hybrid : RootMethod::Bisection);
  run.results["constants"] = to_json(kc);
  run.results["distance_to_alpha_minus_one"] = std::abs(kc.tau0 - (o.alpha - 1.0));
  run.results["critical_powers"] = {{"p_lower", 1.0 + 2.0 * o.alpha}, {"p_star", number(kc.p_star)}};
}

void cmd_regime(const Options& o, Run& run) {
  ProblemParams pp = params_of(o);
  const auto kc = find_tau0(o.alpha);
  run.results["constants"] = to_json(kc);
  run.results["regime"] = to_json(classify_regime(pp, o.gamma, o.tau, kc));
  if (auto w = special_window(pp, kc)) {
    run.results["special_window"] = {number(w->first), number(w->second)};
  } else {
    run.results["special_window"] = nullptr;
  }
  if (o.tau) {
    const int z = family_zone(o.p, *o.tau, kc);
    run.results["family_zone"] = z;
    run.results["family_role"] = z == 0 ? "none" : family_zone_sign(z) > 0 ? "super" : "sub";
  }
}

void cmd_solve(const Options& o, Run& run) {
  ProblemParams pp = params_of(o);
  if (!o.gamma) pp.source = SourceField::power(o.kappa_f, 0.0);
  // outside these ranges the linear super-solution is infinite in the continuum
  if (o.gamma && !(*o.gamma > -1.0 - o.alpha)) throw ConfigError("solve needs gamma > -1 - alpha; use blowup");
  if (o.beta && !(*o.beta > o.alpha - 1.0)) throw ConfigError("solve needs beta > alpha - 1");
  const auto cfg = iteration_of(o);
  auto grid = grid_of(o);
  const auto op = assemble(grid, o.alpha, pp.exterior, assembly_of(o));
  // U solves L U = f+ with the exterior data, W solves L W = -f- with zero exterior
  const auto fp = GridFunction::sample(grid, [&](double, double d) { return std::max(pp.source(d), 0.0); });
  const auto fm = GridFunction::sample(grid, [&](double, double d) { return std::min(pp.source(d), 0.0); });
  OperatorMatrix op0 = op;
  op0.exterior = ExteriorData::zero();
  op0.exterior_load.setZero();
  const GridFunction super = solve_linear(op, 0.0, fp);
  GridFunction sub = solve_linear(op0, 0.0, fm);
  sub.exterior = pp.exterior;
  auto [u, trace] = solve_semilinear(pp, op, sub, super, cfg);
  csv_profile(run, "solution.csv", u);
  csv_profile(run, "sub.csv", sub);
  csv_profile(run, "super.csv", super);
  bool sandwich = true;
  for (int i = 0; i < u.size(); ++i)
    sandwich = sandwich && sub.values[i] <= u.values[i] + 1e-12 && u.values[i] <= super.values[i] + 1e-12;
  run.results["params"] = to_json(pp);
  run.results["grid"] = {{"n", grid->size()}, {"min_spacing", grid->min_spacing()}};
  run.results["trace"] = to_json(trace);
  run.results["max"] = u.values.maxCoeff();
  run.results["min"] = u.values.minCoeff();
  run.checks["converged"] = trace.converged;
  run.checks["monotone"] = trace.all_monotone();
  run.checks["residual_below_10_sup_tol"] = trace.final_residual < 10.0 * cfg.sup_tol;
  run.checks["sandwich"] = sandwich;
}

void cmd_blowup(const Options& o, Run& run) {
  const ProblemParams pp = params_of(o);
  const auto cfg = iteration_of(o);
  const auto kc = find_tau0(o.alpha);
  const auto regime = classify_regime(pp, std::nullopt, std::nullopt, kc);
  auto grid = grid_of(o);
  BlowupOptions bo;
  bo.assembly = assembly_of(o);
  const auto res = solve_blowup(pp, grid, kc, cfg, bo);

  csv_profile(run, "solution.csv", res.solution);
  csv_profile(run, "sub.csv", res.sub);
  csv_profile(run, "super.csv", res.super);
  for (std::size_t k = 0; k < res.levels.size(); ++k) {
    const auto& l = res.levels[k];
    csv_profile(run, l.n > 0 ? "level_" + std::to_string(l.n) + ".csv" : "level_terminal.csv", l.solution);
  }

  Window w = default_window(*grid);
  if (o.fit_lo > 0.0) w.first = o.fit_lo;
  if (o.fit_hi > 0.0) w.second = o.fit_hi;
  RateFit fit;
  try {
    fit = fit_exponent(res.solution, w);
  } catch (const DomainError& e) {
    throw VerificationError(std::string("blowup fit: ") + e.what());
  }
  run.results["params"] = to_json(pp);
  run.results["constants"] = to_json(kc);
  run.results["regime"] = to_json(regime);
  run.results["grid"] = {{"n", grid->size()},
                         {"grading", o.grading},
                         {"layer_depth", o.layer_depth},
                         {"layer_ratio", o.layer_ratio},
                         {"smallest_distance", grid->d(0)}};
  run.results["blowup"] = to_json(res);
  run.results["fit"] = to_json(fit);
  if (regime.predicted_exponent) {
    const double pe = *regime.predicted_exponent;
    run.results["predicted_exponent"] = pe;
    run.results["relative_error"] = within(fit.exponent, pe);
    run.results["band_at_predicted"] = to_json(check_band(res.solution, pe, w));
  }
  bool converged = true, residual_ok = true;
  for (const auto& l : res.levels) {
    converged = converged && l.trace.converged;
    residual_ok = residual_ok && l.trace.final_residual < 10.0 * cfg.sup_tol;
  }
  run.checks["converged"] = converged;
  run.checks["residual_below_10_sup_tol"] = residual_ok;
  run.checks["levels_monotone"] = res.levels_monotone;
  run.checks["sandwich"] = res.sandwich;
  if (pp.source.sign_nonneg() && pp.exterior.is_zero()) run.checks["positive"] = res.positive;
  // the two collars must agree within twice the 5% rate tolerance
  if (regime.predicted_exponent)
    run.checks["collars_agree"] =
        std::abs(fit.exponent_left - fit.exponent_right) <= 2.0 * 0.05 * std::abs(*regime.predicted_exponent);
}

void cmd_verify_barriers(const Options& o, Run& run) {
  const ProblemParams pp = params_of(o);
  const auto kc = find_tau0(o.alpha);
  run.results["params"] = to_json(pp);
  run.results["constants"] = to_json(kc);
  if (o.kind == "existence") {
    const auto regime = classify_regime(pp, std::nullopt, std::nullopt, kc);
    SearchOptions so;
    so.delta = o.delta;
    const auto pair = make_existence_pair(pp, kc, regime, so);
    run.results["regime"] = to_json(regime);
    run.results["pair"] = to_json(pair);
    csv_margins(run, "super_margins.csv", pair.super_report);
    csv_margins(run, "sub_margins.csv", pair.sub_report);
    run.checks["super_verified"] = pair.super_report.passed;
    run.checks["sub_verified"] = pair.sub_report.passed;
    run.checks["ordered"] = pair.ordered;
  } else if (o.kind == "special") {
    SpecialOptions so;
    so.delta = o.delta;
    const auto pair = make_special_pair(pp, kc, o.t, so);
    run.results["pair"] = to_json(pair);
    csv_margins(run, "super_margins.csv", pair.super_report);
    csv_margins(run, "sub_margins.csv", pair.sub_report);
    run.checks["super_verified"] = pair.super_report.passed;
    run.checks["sub_verified"] = pair.sub_report.passed;
  } else if (o.kind == "family") {
    if (!o.tau) throw ConfigError("family barriers need --tau");
    FamilyOptions fo;
    fo.delta = o.delta;
    FamilyMember m;
    if (o.t_scan) {
      BarrierSampler s(pp, verification_points(fo.delta, fo.deep_lo), fo.verify.quad);
      m = scan_nonexistence_family(s, kc, *o.tau, fo);
    } else {
      m = make_nonexistence_family(pp, kc, o.t, *o.tau, fo);
    }
    run.results["family"] = to_json(m);
    csv_margins(run, "family_margins.csv", m.report);
    run.checks["verified"] = m.verified;
  } else {
    throw ConfigError("kind must be existence, special or family");
  }
}

void cmd_verify_prop32(const Options& o, Run& run) {
  const auto kc = find_tau0(o.alpha);
  std::vector<double> taus = o.taus;
  if (o.tau) taus.push_back(*o.tau);
  if (taus.empty()) taus = {-0.8, -0.2};
  if (o.with_tau0) taus.push_back(kc.tau0);
  const auto collar = collar_points(o.collar_lo, o.collar_hi, o.collar_count);
  auto os = open_csv(run, "prop32.csv");
  os << "tau,d,value\n";
  Json reports = Json::array();
  bool all = true;
  for (double t : taus) {
    const auto r = verify_prop32(o.alpha, t, kc, collar);
    for (std::size_t i = 0; i < r.d.size(); ++i) os << t << ',' << r.d[i] << ',' << r.value[i] << '\n';
    reports.push_back(to_json(r));
    all = all && r.passed;
  }
  run.results["constants"] = to_json(kc);
  run.results["reports"] = reports;
  run.checks["all_cases_pass"] = all;
}

void cmd_sweep(const Options& o, Run& run) {
  if (o.tau_grid.empty()) throw ConfigError("sweep needs --tau-grid");
  SweepOptions so;
  so.alpha = o.alpha;
  so.p_grid = parse_range(o.p_grid);
  so.tau_grid = parse_range(o.tau_grid);
  so.family.delta = o.delta;
  so.family.t_k_min = -o.t_k_max;
  so.family.t_k_max = o.t_k_max;
  so.threads = o.threads;
  const auto res = zone_sweep(so);
  auto os = open_csv(run, "zone_map.csv");
  os << "p,tau,zone,regime,blowup_exponent,predicted_rate,measured_rate,op_sign,asymptotic_sign,super_ok,sub_ok,"
        "consistent\n";
  for (const auto& r : res.rows) {
    os << r.p << ',' << r.tau << ',' << r.zone << ',' << r.regime << ',';
    if (r.blowup_exponent) os << *r.blowup_exponent;
    os << ',' << r.predicted_rate << ',' << r.measured_rate << ',' << r.op_sign << ',' << r.asymptotic_sign << ','
       << r.super_ok << ',' << r.sub_ok << ',' << r.consistent << '\n';
  }
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < so.p_grid.size(); ++k) step = std::min(step, so.p_grid[k] - so.p_grid[k - 1]);
  const double pc = 1.0 + 2.0 * o.alpha, ps = res.kc.p_star;
  auto near = [&](const std::optional<double>& v, double target) {
    return v && std::abs(*v - target) <= step * (1.0 + 1e-9);
  };
  run.results["constants"] = to_json(res.kc);
  run.results["rows"] = res.rows.size();
  run.results["zones_verified"] = res.zones_verified;
  run.results["transitions"] = {{"p_lower", pc},
                                {"p_star", number(ps)},
                                {"grid_step", step},
                                {"measured_lower", res.p_interaction_measured ? Json(*res.p_interaction_measured) : Json()},
                                {"measured_star", res.p_star_measured ? Json(*res.p_star_measured) : Json()},
                                {"zones_lower", res.p_interaction_zones ? Json(*res.p_interaction_zones) : Json()},
                                {"zones_star", res.p_star_zones ? Json(*res.p_star_zones) : Json()}};
  run.checks["sign_consistent"] = res.all_consistent;
  run.checks["asymptotic_consistent"] = res.asymptotic_consistent;
  run.checks["lower_transition"] = near(res.p_interaction_measured, pc) && near(res.p_interaction_zones, pc);
  run.checks["star_transition"] = near(res.p_star_measured, ps) && near(res.p_star_zones, ps);
}

// ---- plumbing ----

// Flat key=value file. "command" picks the subcommand, every other key becomes --key value.
std::vector<std::string> config_args(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  std::string command;
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "command") {
      command = value;
    } else if (value == "true") {
      args.push_back("--" + key);
    } else if (value == "false") {
      args.push_back("--" + key + "=false");
    } else {
      args.push_back("--" + key);
      args.push_back(value);
    }
  }
  if (command.empty()) throw ConfigError(path + ": missing command=");
  args.insert(args.begin(), command);
  return args;
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Json echo(const CLI::App* sub) {
  Json j = Json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      // scalar options keep the last occurrence, as the parser does
      if (opt->get_items_expected_max() <= 1) {
        j[name] = r.back();
      } else {
        j[name] = r;
      }
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

int finish(Run& run, const std::string& started, double elapsed, const Json& error, int code) {
  Json m = Json::object();
  m["tool"] = "fraclap";
  m["version"] = version();
  m["command"] = run.command;
  m["config"] = run.config;
  m["results"] = run.results;
  m["checks"] = run.checks;
  m["passed"] = error.is_null() && run.passed();
  m["artifacts"] = run.artifacts;
  if (!error.is_null()) m["error"] = error;
  m["timestamp"] = {{"started", started}, {"elapsed_seconds", elapsed}};
  try {
    if (!run.dir.empty()) write_json((run.dir / "manifest.json").string(), m);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    if (code == 0) code = kExitConfig;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  // --config FILE expands in place; flags after it override the file
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] != "--config") continue;
    if (i + 1 >= args.size()) {
      std::cerr << "--config needs a file\n";
      return kExitConfig;
    }
    std::vector<std::string> expanded;
    try {
      expanded = config_args(args[i + 1]);
    } catch (const ConfigError& e) {
      std::cerr << Json({{"error", {{"type", "config"}, {"message", e.what()}, {"exit_code", kExitConfig}}}}).dump()
                << '\n';
      return kExitConfig;
    }
    std::vector<std::string> rest(args.begin(), args.begin() + i);
    rest.insert(rest.end(), expanded.begin(), expanded.end());
    rest.insert(rest.end(), args.begin() + i + 2, args.end());
    args = rest;
    break;
  }

  Options o;
  CLI::App app{"fraclap: fractional blow-up solver and barrier checks"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(version()));

  auto common = [&](CLI::App* s) {
    s->add_option("--out", o.out, "output directory");
    s->add_option("--alpha", o.alpha, "fractional order in (0,1)");
    s->add_option("--threads", o.threads, "worker threads (0: FRACLAP_THREADS or hardware)");
  };
  auto problem = [&](CLI::App* s) {
    s->add_option("--p", o.p, "power p > 1");
    s->add_option("--gamma", o.gamma, "source exponent: f = kappa_f d^gamma");
    s->add_option("--kappa-f", o.kappa_f, "source amplitude");
    s->add_option("--beta", o.beta, "exterior exponent: g = kappa_g dist^beta near the domain");
    s->add_option("--kappa-g", o.kappa_g, "exterior amplitude");
    s->add_option("--eta", o.eta, "exterior collar width");
  };
  auto iteration = [&](CLI::App* s) {
    s->add_option("--n", o.n, "interior nodes");
    s->add_option("--grading", o.grading, "grading exponent");
    s->add_option("--sup-tol", o.sup_tol, "stopping tolerance");
    s->add_option("--max-iters", o.max_iters, "iteration budget per level");
  };

  auto* ctau = app.add_subcommand("ctau", "C(tau) and its derivatives");
  common(ctau);
  ctau->add_option("--tau", o.tau, "single tau");
  ctau->add_option("--tau-grid", o.tau_grid, "lo:hi:step");
  ctau->add_option("--beta-tilde", o.beta_tilde, "also evaluate Ctilde at this beta");

  auto* tau0 = app.add_subcommand("tau0", "root tau0 of C and the critical power");
  common(tau0);
  tau0->add_option("--tol", o.tol, "root tolerance");
  tau0->add_option("--method", o.method, "hybrid or bisection");

  auto* regime = app.add_subcommand("regime", "classify (alpha, p, gamma, tau)");
  common(regime);
  problem(regime);
  regime->add_option("--tau", o.tau, "barrier exponent for the family zones");

  auto* solve = app.add_subcommand("solve", "bounded semilinear problem by monotone iteration");
  common(solve);
  problem(solve);
  iteration(solve);
  solve->get_option("--n")->default_val(400);

  auto* blowup = app.add_subcommand("blowup", "large solution by domain exhaustion");
  common(blowup);
  problem(blowup);
  iteration(blowup);
  blowup->add_option("--layer-depth", o.layer_depth, "geometric boundary layer down to this distance (0: off)");
  blowup->add_option("--layer-ratio", o.layer_ratio, "ratio of the geometric layer");
  blowup->add_option("--levels", o.levels, "exhaustion levels n (free nodes have d > 1/n)")->delimiter(',');
  blowup->add_option("--terminal", o.terminal, "add the terminal level");
  blowup->add_option("--fit-lo", o.fit_lo, "fit window start (0: default)");
  blowup->add_option("--fit-hi", o.fit_hi, "fit window end (0: default)");

  auto* vb = app.add_subcommand("verify-barriers", "build and check super/sub-solutions");
  common(vb);
  problem(vb);
  vb->add_option("--kind", o.kind, "existence, special or family");
  vb->add_option("--t", o.t, "leading coefficient t");
  vb->add_option("--t-scan", o.t_scan, "scan t over powers of two (family)");
  vb->add_option("--tau", o.tau, "family exponent");
  vb->add_option("--delta", o.delta, "collar width of V_tau");

  auto* vp = app.add_subcommand("verify-prop32", "sign and rate of the operator on V_tau");
  common(vp);
  vp->add_option("--tau", o.taus, "tau values")->delimiter(',');
  vp->add_option("--with-tau0", o.with_tau0, "also check tau = tau0");
  vp->add_option("--collar-lo", o.collar_lo, "collar start");
  vp->add_option("--collar-hi", o.collar_hi, "collar end");
  vp->add_option("--collar-count", o.collar_count, "collar samples");

  auto* sweep = app.add_subcommand("sweep", "zone map in the (p, tau) plane");
  common(sweep);
  sweep->add_option("--p-grid", o.p_grid, "lo:hi:step");
  sweep->add_option("--tau-grid", o.tau_grid, "lo:hi:step");
  sweep->add_option("--t-k-max", o.t_k_max, "t scanned over 2^k, |k| <= this");
  sweep->add_option("--delta", o.delta, "collar width of V_tau");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << Json({{"error", {{"type", "config"}, {"message", e.what()}, {"exit_code", kExitConfig}}}}).dump()
              << '\n';
    return kExitConfig;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Run run;
  run.command = sub->get_name();
  run.config = echo(sub);
  const std::string started = now_iso();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

  int code = 0;
  Json error;
  auto fail = [&](const char* type, const std::exception& e, int c) {
    error = {{"type", type}, {"message", e.what()}, {"exit_code", c}};
    std::cerr << Json({{"error", error}}).dump() << '\n';
    code = c;
  };
  try {
    fs::create_directories(o.out);
    run.dir = o.out;
    if (o.threads < 0) throw ConfigError("threads must be >= 0");
    if (run.command == "ctau") cmd_ctau(o, run);
    if (run.command == "tau0") cmd_tau0(o, run);
    if (run.command == "regime") cmd_regime(o, run);
    if (run.command == "solve") cmd_solve(o, run);
    if (run.command == "blowup") cmd_blowup(o, run);
    if (run.command == "verify-barriers") cmd_verify_barriers(o, run);
    if (run.command == "verify-prop32") cmd_verify_prop32(o, run);
    if (run.command == "sweep") cmd_sweep(o, run);
    if (!run.passed()) code = kExitVerification;
  } catch (const ConfigError& e) {
    fail("config", e, kExitConfig);
  } catch (const DomainError& e) {
    fail("config", e, kExitConfig);
  } catch (const AmbiguousRegime& e) {
    fail("config", e, kExitConfig);
  } catch (const fs::filesystem_error& e) {
    fail("config", e, kExitConfig);
  } catch (const ConvergenceError& e) {
    fail("convergence", e, kExitConvergence);
  } catch (const VerificationError& e) {
    fail("verification", e, kExitVerification);
  } catch (const std::exception& e) {
    fail("internal", e, 1);
  }
  return finish(run, started, elapsed(), error, code);
}
