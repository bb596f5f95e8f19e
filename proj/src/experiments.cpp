#include "psq/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <stdexcept>

#include "psq/asymptotics.hpp"

namespace psq {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ConvergenceReport run_convergence(const ConvergenceSpec& spec) {
  spec.base.validate();
  const double rho = spec.base.alpha / spec.base.mu;
  if (!(rho < 1.0)) throw std::invalid_argument("run_convergence: rho must be < 1");

  ConvergenceReport report;
  std::vector<std::pair<double, double>> probes;
  for (const auto& pr : spec.probes) {
    if (pr.first > 0.0 && pr.second > 0.0) {
      probes.push_back(pr);
    } else {
      report.skipped.push_back(pr);
    }
  }

  std::vector<std::future<StationaryDistribution>> jobs;
  for (double A : spec.A_values) {
    if (!(A > 0.0)) throw std::invalid_argument("run_convergence: A values must be > 0");
    const ModelParams p = spec.base.with_scale(A);
    const TruncatedGrid grid = spec.grid ? *spec.grid : auto_grid(p);
    SolverOptions opts;
    opts.tol = spec.tol;
    jobs.push_back(std::async(std::launch::async, [p, grid, opts] { return solve_stationary(p, grid, opts); }));
  }

  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const double A = spec.A_values[k];
    const ModelParams p = spec.base.with_scale(A);
    const StationaryDistribution dist = jobs[k].get();
    for (const auto& [x, y] : probes) {
      ConvergenceRow row;
      row.A = A;
      row.x = x;
      row.y = y;
      row.n = static_cast<std::int64_t>(std::floor(A * x));
      row.m = static_cast<std::int64_t>(std::floor(A * y));
      row.exact = dist.at(row.n, row.m);
      row.sharp = sharp_density(x, y, A, p);
      row.ratio = row.exact / row.sharp;
      row.decay_estimate = row.exact > 0.0 ? -std::log(row.exact) / A : std::numeric_limits<double>::infinity();
      row.H = decay_H(x, y, rho);
      row.grid_n_max = dist.grid.n_max;
      row.grid_m_max = dist.grid.m_max;
      row.residual = dist.residual;
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  out << "A,x,y,n,m,exact,sharp,ratio,decay_estimate,H,n_max,m_max,residual\n";
  for (const auto& r : report.rows) {
    out << num(r.A) << ',' << num(r.x) << ',' << num(r.y) << ',' << r.n << ',' << r.m << ',' << num(r.exact) << ','
        << num(r.sharp) << ',' << num(r.ratio) << ',' << num(r.decay_estimate) << ',' << num(r.H) << ','
        << r.grid_n_max << ',' << r.grid_m_max << ',' << num(r.residual) << '\n';
  }
}

std::vector<FigureRow> run_figure_data(const FigureSpec& spec) {
  spec.params.validate();
  const double rho = spec.params.alpha / spec.params.mu;
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("run_figure_data: need 0 < rho < 1");
  if (spec.points_per_unit < 1) throw std::invalid_argument("run_figure_data: points_per_unit must be >= 1");
  if (!(spec.x_max >= 0.0) || !(spec.y_max >= 0.0)) throw std::invalid_argument("run_figure_data: negative extent");

  const int nx = static_cast<int>(std::floor(spec.x_max * spec.points_per_unit + 1e-9));
  const int ny = static_cast<int>(std::floor(spec.y_max * spec.points_per_unit + 1e-9));
  std::vector<FigureRow> rows;
  rows.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int i = 0; i <= nx; ++i) {
    const double x = static_cast<double>(i) / spec.points_per_unit;
    for (int j = 0; j <= ny; ++j) {
      const double y = static_cast<double>(j) / spec.points_per_unit;
      FigureRow row{x, y, decay_H(x, y, rho), std::numeric_limits<double>::quiet_NaN()};
      if (i > 0 && j > 0) row.g = prefactor_g(x, y, spec.params);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_figure_csv(std::ostream& out, const std::vector<FigureRow>& rows) {
  out << "x,y,H,g\n";
  for (const auto& r : rows) out << num(r.x) << ',' << num(r.y) << ',' << num(r.H) << ',' << num(r.g) << '\n';
}

void write_mobile_csv(std::ostream& out, const GrowthReport& report) {
  out << "rho_tot,beta_net,mean_N,mean_M,gamma,Gamma,A_mob,beta_ex,ratio_N,ratio_M,gamma_asym,Gamma_asym,"
         "p_empty,one_minus_rho_tot,fixed_point_residual,fixed_point_iterations\n";
  for (const auto& r : report.rows) {
    out << num(r.rho_tot) << ',' << num(r.beta_net) << ',' << num(r.mean_n) << ',' << num(r.mean_m) << ','
        << num(r.exact.gamma) << ',' << num(r.exact.Gamma) << ',' << num(r.a_mob) << ',' << num(r.beta_ex) << ','
        << num(r.ratio_n) << ',' << num(r.ratio_m) << ',' << num(r.asymptotic.gamma) << ','
        << num(r.asymptotic.Gamma) << ',' << num(r.p_empty) << ',' << num(1.0 - r.rho_tot) << ','
        << num(r.fixed_point_residual) << ',' << r.fixed_point_iterations << '\n';
  }
}

nlohmann::json to_json(const ModelParams& p) {
  return {{"alpha", p.alpha}, {"beta", p.beta}, {"mu", p.mu}, {"nu", p.nu}, {"theta", p.theta}};
}

nlohmann::json to_json(const GrowthReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"rho_tot", r.rho_tot},
                    {"beta_net", r.beta_net},
                    {"A_mob", r.a_mob},
                    {"ratio_N", r.ratio_n},
                    {"ratio_M", r.ratio_m},
                    {"p_empty", r.p_empty},
                    {"fixed_point_iterations", r.fixed_point_iterations}});
  }
  return {{"rows", rows},
          {"ratio_N_toward_one", report.ratio_n_toward_one},
          {"ratio_M_toward_one", report.ratio_m_toward_one},
          {"beta_net_increasing", report.beta_net_increasing}};
}

std::filesystem::path write_manifest(const std::filesystem::path& dir, nlohmann::json manifest,
                                     const std::vector<std::string>& outputs) {
  std::filesystem::create_directories(dir);
  manifest["version"] = kVersion;
  manifest["outputs"] = outputs;
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << '\n';
  return path;
}

}  // namespace psq
