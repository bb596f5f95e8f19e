// Closed-loop PS queue for mobile cells.
//
// Impatient (moving) customers arrive at beta = beta_ex + beta_net, where the
// network feedback beta_net balances the outgoing mobility flow:
// theta E(M) = beta_net. A solution exists iff rho_tot = alpha/mu + beta_ex/nu < 1.
#ifndef PSQ_MOBILE_HPP
#define PSQ_MOBILE_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "psq/model.hpp"
#include "psq/stationary.hpp"

namespace psq {

struct MobileInputs {
  double alpha = 0.0;
  double beta_ex = 0.0;
  double mu = 1.0;
  double nu = 1.0;
  double theta = 1.0;

  double rho() const { return alpha / mu; }
  double rho_tot() const { return alpha / mu + beta_ex / nu; }
  ModelParams with_feedback(double beta_net) const { return {alpha, beta_ex + beta_net, mu, nu, theta}; }
  // Requires mu, nu, theta > 0 and alpha, beta_ex >= 0.
  void validate() const;
};

struct FixedPointOptions {
  // Stop when |theta E(M) - beta_net| <= tol * max(1, beta_net).
  double tol = 1e-9;
  double damping = 0.5;  // lambda in (0, 1]
  int max_iterations = 20000;
  double initial_beta_net = 0.0;
  double solver_tol = 1e-11;
};

class FixedPointError : public std::runtime_error {
 public:
  FixedPointError(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), residual_history_(std::move(residual_history)) {}
  const std::vector<double>& residual_history() const { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

struct MobileScenario {
  MobileInputs inputs;
  double rho_tot = 0.0;
  double beta_net = 0.0;
  ModelParams solved_params;
  StationaryDistribution distribution;
  Moments moments;
  double residual = 0.0;  // |theta E(M) - beta_net| at beta_net
  int iterations = 0;
  std::vector<double> residual_history;

  double p_empty() const { return distribution.at(0, 0); }
};

// Damped successive substitution beta_net <- (1-lambda) beta_net + lambda theta E(M),
// re-solving the stationary law (auto-sized grid, warm-started) per iterate.
// Throws std::invalid_argument when rho_tot >= 1 and FixedPointError on
// non-convergence.
MobileScenario solve_fixed_point(const MobileInputs& inputs, const FixedPointOptions& options = {});

// A_mob = -log(1 - rho_tot) / H(0,0), H(0,0) = 1 - log(1 - rho).
double a_mob(double rho_tot, double rho);

struct Throughputs {
  double gamma = 0.0;  // patient class
  double Gamma = 0.0;  // moving class
};

// gamma = rho / E(N); Gamma = (rho_tot - rho + beta_net/nu) / E(M) - theta/nu.
// Throws std::domain_error when a mean occupancy is zero.
Throughputs throughputs(const MobileScenario& scenario);

// Heavy-traffic equivalents of gamma and Gamma as rho_tot -> 1.
Throughputs throughput_asymptotics(double rho, double rho_tot);

struct GrowthRow {
  double rho_tot = 0.0;
  double beta_ex = 0.0;
  double beta_net = 0.0;
  double a_mob = 0.0;
  double mean_n = 0.0;
  double mean_m = 0.0;
  double ratio_n = 0.0;  // E(N_mob) / (A_mob x*)
  double ratio_m = 0.0;  // E(M_mob) / A_mob
  Throughputs exact;
  Throughputs asymptotic;
  double p_empty = 0.0;
  double fixed_point_residual = 0.0;
  int fixed_point_iterations = 0;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;  // ascending rho_tot
  bool ratio_n_toward_one = false;  // |ratio_n - 1| strictly decreasing
  bool ratio_m_toward_one = false;
  bool beta_net_increasing = false;
};

// Solves the loop at each rho_tot (beta_ex = nu (rho_tot - rho)), points in
// parallel. `base` supplies alpha, mu, nu, theta; its beta_ex is ignored.
GrowthReport mean_growth_check(const MobileInputs& base, std::vector<double> rho_tot_values,
                               const FixedPointOptions& options = {});

}  // namespace psq

#endif  // PSQ_MOBILE_HPP
