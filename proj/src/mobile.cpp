#include "psq/mobile.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "psq/asymptotics.hpp"

namespace psq {

void MobileInputs::validate() const {
  ModelParams probe{alpha, beta_ex, mu, nu, theta};
  probe.validate();
  if (!(nu > 0.0)) throw std::invalid_argument("mobile loop: nu must be > 0");
}

MobileScenario solve_fixed_point(const MobileInputs& inputs, const FixedPointOptions& options) {
  inputs.validate();
  if (!(inputs.rho_tot() < 1.0)) throw std::invalid_argument("solve_fixed_point: rho_tot >= 1, no fixed point exists");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw std::invalid_argument("solve_fixed_point: damping must lie in (0, 1]");
  }
  if (!(options.initial_beta_net >= 0.0)) throw std::invalid_argument("solve_fixed_point: initial beta_net must be >= 0");

  MobileScenario out;
  out.inputs = inputs;
  out.rho_tot = inputs.rho_tot();

  double beta_net = options.initial_beta_net;
  Eigen::ArrayXXd warm;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const ModelParams params = inputs.with_feedback(beta_net);
    SolverOptions solver;
    solver.tol = options.solver_tol;
    solver.initial = warm.size() > 0 ? &warm : nullptr;
    StationaryDistribution dist = solve_stationary(params, auto_grid(params), solver);
    const Moments mom = moments(dist);
    const double outflow = inputs.theta * mom.mean_m;
    const double residual = std::abs(outflow - beta_net);
    out.residual_history.push_back(residual);
    if (residual <= options.tol * std::max(1.0, beta_net)) {
      out.beta_net = beta_net;
      out.solved_params = params;
      out.distribution = std::move(dist);
      out.moments = mom;
      out.residual = residual;
      out.iterations = iter;
      return out;
    }
    beta_net = (1.0 - options.damping) * beta_net + options.damping * outflow;
    warm = std::move(dist.pmf);
  }
  throw FixedPointError("solve_fixed_point: no convergence within iteration budget", std::move(out.residual_history));
}

double a_mob(double rho_tot, double rho) {
  if (!(rho_tot < 1.0) || !(rho < 1.0)) throw std::invalid_argument("a_mob: need rho_tot < 1 and rho < 1");
  return -std::log1p(-rho_tot) / (1.0 - std::log1p(-rho));
}

Throughputs throughputs(const MobileScenario& scenario) {
  const double mean_n = scenario.moments.mean_n;
  const double mean_m = scenario.moments.mean_m;
  if (!(mean_n > 0.0) || !(mean_m > 0.0)) throw std::domain_error("throughputs: zero mean occupancy");
  const MobileInputs& in = scenario.inputs;
  const double rho = in.rho();
  Throughputs t;
  t.gamma = rho / mean_n;
  t.Gamma = (scenario.rho_tot - rho + scenario.beta_net / in.nu) / mean_m - in.theta / in.nu;
  return t;
}

Throughputs throughput_asymptotics(double rho, double rho_tot) {
  if (!(rho_tot < 1.0) || !(rho < 1.0)) throw std::invalid_argument("throughput_asymptotics: need rho, rho_tot < 1");
  const double h00 = 1.0 - std::log1p(-rho);
  const double log_idle = std::log1p(-rho_tot);
  return {-h00 * (1.0 - rho) / log_idle, -h00 * (rho_tot - rho) / log_idle};
}

namespace {

bool strictly_toward_one(const std::vector<GrowthRow>& rows, double GrowthRow::*field) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(std::abs(rows[i].*field - 1.0) < std::abs(rows[i - 1].*field - 1.0))) return false;
  }
  return !rows.empty();
}

}  // namespace

GrowthReport mean_growth_check(const MobileInputs& base, std::vector<double> rho_tot_values,
                               const FixedPointOptions& options) {
  base.validate();
  std::sort(rho_tot_values.begin(), rho_tot_values.end());
  const double rho = base.rho();
  for (double rt : rho_tot_values) {
    if (!(rt < 1.0)) throw std::invalid_argument("mean_growth_check: rho_tot must be < 1");
    if (!(rt >= rho)) throw std::invalid_argument("mean_growth_check: rho_tot must be >= alpha/mu");
  }

  std::vector<std::future<MobileScenario>> jobs;
  for (double rt : rho_tot_values) {
    MobileInputs in = base;
    in.beta_ex = base.nu * (rt - rho);
    jobs.push_back(std::async(std::launch::async, [in, options] { return solve_fixed_point(in, options); }));
  }

  GrowthReport report;
  const double x_star = rho / (1.0 - rho);
  for (auto& job : jobs) {
    const MobileScenario sc = job.get();
    GrowthRow row;
    row.rho_tot = sc.rho_tot;
    row.beta_ex = sc.inputs.beta_ex;
    row.beta_net = sc.beta_net;
    row.a_mob = a_mob(sc.rho_tot, rho);
    row.mean_n = sc.moments.mean_n;
    row.mean_m = sc.moments.mean_m;
    row.ratio_n = x_star > 0.0 ? row.mean_n / (row.a_mob * x_star) : std::nan("");
    row.ratio_m = row.mean_m / row.a_mob;
    row.exact = throughputs(sc);
    row.asymptotic = throughput_asymptotics(rho, sc.rho_tot);
    row.p_empty = sc.p_empty();
    row.fixed_point_residual = sc.residual;
    row.fixed_point_iterations = sc.iterations;
    report.rows.push_back(row);
  }
  report.ratio_n_toward_one = strictly_toward_one(report.rows, &GrowthRow::ratio_n);
  report.ratio_m_toward_one = strictly_toward_one(report.rows, &GrowthRow::ratio_m);
  report.beta_net_increasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (!(report.rows[i].beta_net > report.rows[i - 1].beta_net)) report.beta_net_increasing = false;
  }
  return report;
}

}  // namespace psq
