// psq: command-line driver.
//
// Precedence: built-in defaults < --config file < command-line flags.
// Each run writes its CSV output(s) and manifest.json into --out.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "psq/asymptotics.hpp"
#include "psq/config.hpp"
#include "psq/experiments.hpp"
#include "psq/mobile.hpp"
#include "psq/simulator.hpp"
#include "psq/stationary.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Flags {
  std::string config_path;
  std::string out = ".";
  std::optional<double> A;
  std::optional<double> rho;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string grid;
  std::string rho_tot_list;
  std::string A_list;
  std::vector<std::string> probes;
  std::optional<double> t_end;
  std::optional<double> burn_in;
  std::optional<int> replications;
  std::optional<std::uint64_t> events;
  double x = 1.0;
  double y = 1.0;
  int points_per_unit = 10;
  double x_max = 4.0;
  double y_max = 4.0;
  bool compare = false;
};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("bad number: " + item);
    out.push_back(v);
  }
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    s += buf;
  }
  return s;
}

// Merges file values and flags into a single Config.
psq::Config effective_config(const Flags& f) {
  psq::Config cfg = f.config_path.empty() ? psq::Config{} : psq::Config::load(f.config_path);
  auto put = [&cfg](const char* key, const auto& v) {
    if (v) {
      std::ostringstream os;
      os.precision(17);
      os << *v;
      cfg.set(key, os.str());
    }
  };
  put("A", f.A);
  put("rho", f.rho);
  put("tol", f.tol);
  put("seed", f.seed);
  put("t_end", f.t_end);
  put("burn_in", f.burn_in);
  put("replications", f.replications);
  if (!f.grid.empty()) {
    const auto g = parse_list(f.grid);
    if (g.size() != 2) throw std::invalid_argument("--grid expects n_max,m_max");
    cfg.set("n_max", std::to_string(static_cast<long long>(g[0])));
    cfg.set("m_max", std::to_string(static_cast<long long>(g[1])));
  }
  if (!f.rho_tot_list.empty()) cfg.set("rho_tot_list", f.rho_tot_list);
  if (!f.A_list.empty()) cfg.set("A_list", f.A_list);
  return cfg;
}

psq::ModelParams model_params(const psq::Config& cfg) {
  psq::ModelParams defaults{0.5, 20.0, 1.0, 1.0, 1.0};
  return psq::params_from_config(cfg, defaults);
}

std::optional<psq::TruncatedGrid> grid_override(const psq::Config& cfg) {
  const auto n = cfg.get_int("n_max");
  const auto m = cfg.get_int("m_max");
  if (!n && !m) return std::nullopt;
  if (!n || !m) throw std::invalid_argument("n_max and m_max must be given together");
  return psq::TruncatedGrid{static_cast<int>(*n), static_cast<int>(*m)};
}

psq::SimConfig sim_config(const psq::Config& cfg) {
  psq::SimConfig sc;
  if (auto v = cfg.get_int("seed")) sc.seed = static_cast<std::uint64_t>(*v);
  if (auto v = cfg.get_double("t_end")) sc.t_end = *v;
  if (auto v = cfg.get_double("burn_in")) sc.burn_in = *v;
  if (auto v = cfg.get_int("replications")) sc.replications = static_cast<int>(*v);
  sc.validate();
  return sc;
}

json config_json(const psq::Config& cfg) {
  json j = json::object();
  for (const auto& [k, v] : cfg.values()) j[k] = v;
  return j;
}

fs::path open_out(const Flags& f, const std::string& name, std::ofstream& stream) {
  fs::create_directories(f.out);
  const fs::path path = fs::path(f.out) / name;
  stream.open(path);
  if (!stream) throw std::runtime_error("cannot write " + path.string());
  return path;
}

int cmd_solve(const Flags& f) {
  const psq::Config cfg = effective_config(f);
  const psq::ModelParams p = model_params(cfg);
  psq::SolverOptions opts;
  opts.tol = cfg.get_double("tol").value_or(1e-10);
  const psq::TruncatedGrid grid = grid_override(cfg).value_or(psq::auto_grid(p));
  const psq::StationaryDistribution dist = psq::solve_stationary(p, grid, opts);

  std::ofstream csv;
  open_out(f, "stationary.csv", csv);
  psq::write_csv(csv, dist.pmf);
  std::ofstream summary;
  open_out(f, "summary.json", summary);
  summary << psq::summary_json(dist) << '\n';

  psq::write_manifest(f.out,
                      {{"command", "solve"},
                       {"config", config_json(cfg)},
                       {"params", psq::to_json(p)},
                       {"grid", {{"n_max", grid.n_max}, {"m_max", grid.m_max}}},
                       {"tol", opts.tol},
                       {"residual", dist.residual},
                       {"iterations", dist.iterations}},
                      {"stationary.csv", "summary.json"});
  const psq::Moments mom = psq::moments(dist);
  std::cout << "residual " << dist.residual << " iterations " << dist.iterations << " boundary_mass "
            << dist.boundary_mass << "\nE(N) " << mom.mean_n << " E(M) " << mom.mean_m << '\n';
  return 0;
}

int cmd_simulate(const Flags& f) {
  const psq::Config cfg = effective_config(f);
  const psq::ModelParams p = model_params(cfg);
  const psq::SimConfig sc = sim_config(cfg);
  const psq::EmpiricalDistribution emp = psq::estimate_stationary(p, sc);

  std::ofstream csv;
  open_out(f, "empirical.csv", csv);
  psq::write_csv(csv, emp.pmf);
  json manifest = {{"command", "simulate"},
                   {"config", config_json(cfg)},
                   {"params", psq::to_json(p)},
                   {"seed", sc.seed},
                   {"t_end", sc.t_end},
                   {"burn_in", sc.burn_in},
                   {"replications", sc.replications},
                   {"events", emp.events},
                   {"mean_N", emp.mean_n()},
                   {"mean_M", emp.mean_m()}};
  std::vector<std::string> outputs{"empirical.csv"};
  if (f.compare) {
    psq::SolverOptions opts;
    opts.tol = cfg.get_double("tol").value_or(1e-10);
    const auto dist = psq::solve_stationary(p, grid_override(cfg).value_or(psq::auto_grid(p)), opts);
    const double tv = psq::total_variation(emp.pmf, dist.pmf);
    manifest["total_variation_vs_exact"] = tv;
    std::cout << "total variation vs exact " << tv << '\n';
  }
  psq::write_manifest(f.out, manifest, outputs);
  std::cout << "events " << emp.events << " E(N) " << emp.mean_n() << " E(M) " << emp.mean_m() << '\n';
  return 0;
}

int cmd_asymptotics(const Flags& f) {
  const psq::Config cfg = effective_config(f);
  const psq::ModelParams p = model_params(cfg);
  const psq::DerivedConstants d = psq::derive_constants(p);
  if (!d.stable()) throw std::invalid_argument("asymptotics: rho must be < 1");
  const double H = psq::decay_H(f.x, f.y, d.rho);
  const double g = psq::prefactor_g(f.x, f.y, p);
  const double sharp = psq::sharp_density(f.x, f.y, d.A, p);
  const auto gauss = psq::gaussian_limit(p);

  std::ofstream csv;
  open_out(f, "asymptotics.csv", csv);
  csv.precision(17);
  csv << "x,y,A,H,g,sharp_density,marginal_N,marginal_M\n"
      << f.x << ',' << f.y << ',' << d.A << ',' << H << ',' << g << ',' << sharp << ','
      << psq::marginal_asymptotics(psq::Marginal::N, f.x, d.A, p) << ','
      << psq::marginal_asymptotics(psq::Marginal::M, f.y, d.A, p) << '\n';
  psq::write_manifest(f.out,
                      {{"command", "asymptotics"},
                       {"config", config_json(cfg)},
                       {"params", psq::to_json(p)},
                       {"x", f.x},
                       {"y", f.y},
                       {"gaussian_limit",
                        {{"var_xi", gauss.var_xi},
                         {"var_eta", gauss.var_eta},
                         {"cov", gauss.cov},
                         {"center_x", gauss.center_x},
                         {"center_y", gauss.center_y}}}},
                      {"asymptotics.csv"});
  std::cout << "H " << H << " g " << g << " sharp_density " << sharp << '\n';
  return 0;
}

std::vector<std::pair<double, double>> parse_probes(const std::vector<std::string>& items) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : items) {
    const auto v = parse_list(s);
    if (v.size() != 2) throw std::invalid_argument("--probe expects x,y");
    out.emplace_back(v[0], v[1]);
  }
  return out;
}

int cmd_convergence(const Flags& f) {
  const psq::Config cfg = effective_config(f);
  psq::ConvergenceSpec spec;
  spec.base = model_params(cfg);
  spec.A_values = parse_list(cfg.get_string("A_list").value_or("40,80,160"));
  spec.tol = cfg.get_double("tol").value_or(1e-10);
  spec.grid = grid_override(cfg);
  spec.probes = parse_probes(f.probes);
  if (spec.probes.empty()) spec.probes.emplace_back(psq::derive_constants(spec.base).x_star, 1.0);
  const psq::ConvergenceReport report = psq::run_convergence(spec);

  std::ofstream csv;
  open_out(f, "convergence.csv", csv);
  psq::write_convergence_csv(csv, report);
  json skipped = json::array();
  for (const auto& [x, y] : report.skipped) skipped.push_back({x, y});
  json probes = json::array();
  for (const auto& [x, y] : spec.probes) probes.push_back({x, y});
  psq::write_manifest(f.out,
                      {{"command", "convergence"},
                       {"config", config_json(cfg)},
                       {"params", psq::to_json(spec.base)},
                       {"A_list", spec.A_values},
                       {"probes", probes},
                       {"skipped_probes", skipped},
                       {"tol", spec.tol}},
                      {"convergence.csv"});
  for (const auto& r : report.rows) {
    std::cout << "A " << r.A << " (" << r.x << ',' << r.y << ") ratio " << r.ratio << " decay " << r.decay_estimate
              << " H " << r.H << '\n';
  }
  return 0;
}

int cmd_mobile_sweep(const Flags& f) {
  const psq::Config cfg = effective_config(f);
  const psq::ModelParams p = model_params(cfg);
  psq::MobileInputs base{p.alpha, 0.0, p.mu, p.nu, p.theta};
  const auto list = parse_list(cfg.get_string("rho_tot_list").value_or("0.9,0.95,0.99"));
  psq::FixedPointOptions opts;
  if (auto t = cfg.get_double("tol")) opts.tol = *t;
  const psq::GrowthReport report = psq::mean_growth_check(base, list, opts);

  std::ofstream csv;
  open_out(f, "mobile_sweep.csv", csv);
  psq::write_mobile_csv(csv, report);
  psq::write_manifest(f.out,
                      {{"command", "mobile-sweep"},
                       {"config", config_json(cfg)},
                       {"alpha", base.alpha},
                       {"mu", base.mu},
                       {"nu", base.nu},
                       {"theta", base.theta},
                       {"rho_tot_list", join(list)},
                       {"fixed_point_tol", opts.tol},
                       {"damping", opts.damping},
                       {"solver_tol", opts.solver_tol},
                       {"report", psq::to_json(report)}},
                      {"mobile_sweep.csv"});
  for (const auto& r : report.rows) {
    std::cout << "rho_tot " << r.rho_tot << " beta_net " << r.beta_net << " ratio_N " << r.ratio_n << " ratio_M "
              << r.ratio_m << '\n';
  }
  return 0;
}

int cmd_dominance(const Flags& f) {
  const psq::Config cfg = effective_config(f);
  const psq::ModelParams p = model_params(cfg);
  psq::SimConfig sc = sim_config(cfg);
  sc.max_events = f.events.value_or(1000000);
  if (!cfg.contains("t_end")) sc.t_end = 1e300;
  const psq::DominanceReport rep = psq::coupled_dominance_run(p, sc);

  std::ofstream csv;
  open_out(f, "dominance.csv", csv);
  csv.precision(17);
  csv << "m,tail_M,tail_M_prime,tail_poisson\n";
  for (Eigen::Index m = 0; m < rep.m_tail.size(); ++m) {
    csv << m << ',' << rep.m_tail(m) << ',' << rep.m_prime_tail(m) << ',' << rep.poisson_tail(m) << '\n';
  }
  json manifest = {{"command", "dominance"},
                   {"config", config_json(cfg)},
                   {"params", psq::to_json(p)},
                   {"seed", sc.seed},
                   {"max_events", sc.max_events},
                   {"events", rep.events},
                   {"violations", rep.violations},
                   {"max_tail_excess", rep.max_tail_excess()}};
  if (rep.first_violation_time) manifest["first_violation_time"] = *rep.first_violation_time;
  psq::write_manifest(f.out, manifest, {"dominance.csv"});
  std::cout << "events " << rep.events << " violations " << rep.violations << '\n';
  return rep.ok() ? 0 : 1;
}

int cmd_figure_data(const Flags& f) {
  const psq::Config cfg = effective_config(f);
  psq::FigureSpec spec;
  spec.params = model_params(cfg);
  spec.points_per_unit = f.points_per_unit;
  spec.x_max = f.x_max;
  spec.y_max = f.y_max;
  const auto rows = psq::run_figure_data(spec);

  std::ofstream csv;
  open_out(f, "figure.csv", csv);
  psq::write_figure_csv(csv, rows);
  psq::write_manifest(f.out,
                      {{"command", "figure-data"},
                       {"config", config_json(cfg)},
                       {"params", psq::to_json(spec.params)},
                       {"points_per_unit", spec.points_per_unit},
                       {"x_max", spec.x_max},
                       {"y_max", spec.y_max}},
                      {"figure.csv"});
  std::cout << rows.size() << " grid points\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-class PS queue with impatience: exact, asymptotic and simulated analysis"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "key=value or JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--A", f.A, "scale A (beta = A theta)");
    sub->add_option("--rho", f.rho, "patient load (alpha = rho mu)");
    sub->add_option("--tol", f.tol, "tolerance");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--grid", f.grid, "truncation n_max,m_max");
  };

  auto* solve = app.add_subcommand("solve", "exact stationary distribution");
  common(solve);

  auto* simulate = app.add_subcommand("simulate", "empirical stationary distribution");
  common(simulate);
  simulate->add_option("--t-end", f.t_end, "simulated time per replication");
  simulate->add_option("--burn-in", f.burn_in, "discarded initial time");
  simulate->add_option("--replications", f.replications, "independent replications");
  simulate->add_flag("--compare", f.compare, "also report total variation against the exact solve");

  auto* asym = app.add_subcommand("asymptotics", "H, g and sharp density at a point");
  common(asym);
  asym->add_option("--x", f.x, "scaled patient coordinate");
  asym->add_option("--y", f.y, "scaled impatient coordinate");

  auto* conv = app.add_subcommand("convergence", "exact vs sharp asymptotics over A");
  common(conv);
  conv->add_option("--A-list", f.A_list, "comma-separated A values");
  conv->add_option("--probe", f.probes, "probe x,y (repeatable; default the fluid point)");

  auto* mobile = app.add_subcommand("mobile-sweep", "closed-loop fixed points over rho_tot");
  common(mobile);
  mobile->add_option("--rho-tot-list", f.rho_tot_list, "comma-separated rho_tot values");

  auto* dom = app.add_subcommand("dominance", "coupled M <= M' check");
  common(dom);
  dom->add_option("--events", f.events, "number of events (default 1e6)");
  dom->add_option("--t-end", f.t_end, "time horizon");

  auto* fig = app.add_subcommand("figure-data", "grid of (x, y, H, g)");
  common(fig);
  fig->add_option("--points-per-unit", f.points_per_unit, "grid points per unit length");
  fig->add_option("--x-max", f.x_max, "largest x");
  fig->add_option("--y-max", f.y_max, "largest y");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(f);
    if (*simulate) return cmd_simulate(f);
    if (*asym) return cmd_asymptotics(f);
    if (*conv) return cmd_convergence(f);
    if (*mobile) return cmd_mobile_sweep(f);
    if (*dom) return cmd_dominance(f);
    if (*fig) return cmd_figure_data(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
