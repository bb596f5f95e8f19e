#include "psq/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "json.hpp"

namespace psq {

namespace {

// Row-major work lattice: lines over m are contiguous.
using Lattice = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const Eigen::ArrayXd& logs) {
  const double top = logs.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((logs - top).exp().sum());
}

Eigen::ArrayXd normalized_from_logs(const Eigen::ArrayXd& logs) {
  return (logs - log_sum_exp(logs)).exp();
}

Eigen::ArrayXd poisson_log_pmf(double A, int m_max) {
  Eigen::ArrayXd logs(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    if (A == 0.0) {
      logs(m) = m == 0 ? 0.0 : kNegInf;
    } else {
      logs(m) = m * std::log(A) - A - std::lgamma(m + 1.0);
    }
  }
  return logs;
}

// Rates of the reflecting truncated generator, cached per lattice point.
struct RateTable {
  Lattice patient;    // (n,m) -> (n-1,m)
  Lattice impatient;  // (n,m) -> (n,m-1)
  Lattice outflow;

  RateTable(const ModelParams& p, int n_max, int m_max)
      : patient(n_max + 1, m_max + 1), impatient(n_max + 1, m_max + 1), outflow(n_max + 1, m_max + 1) {
    for (int n = 0; n <= n_max; ++n) {
      for (int m = 0; m <= m_max; ++m) {
        patient(n, m) = patient_departure_rate(p, n, m);
        impatient(n, m) = impatient_departure_rate(p, n, m);
        outflow(n, m) = (n < n_max ? p.alpha : 0.0) + (m < m_max ? p.beta : 0.0) + patient(n, m) +
                        impatient(n, m);
      }
    }
  }
};

double residual_of(const ModelParams& p, const RateTable& rates, const Lattice& pi) {
  const int n_max = static_cast<int>(pi.rows()) - 1;
  const int m_max = static_cast<int>(pi.cols()) - 1;
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    for (int m = 0; m <= m_max; ++m) {
      double in = 0.0;
      if (n > 0) in += p.alpha * pi(n - 1, m);
      if (m > 0) in += p.beta * pi(n, m - 1);
      if (n < n_max) in += rates.patient(n + 1, m) * pi(n + 1, m);
      if (m < m_max) in += rates.impatient(n, m + 1) * pi(n, m + 1);
      total += std::abs(in - rates.outflow(n, m) * pi(n, m));
    }
  }
  return total;
}

// Solves the tridiagonal balance system of row n given its neighbours.
void solve_row(const ModelParams& p, const RateTable& rates, Lattice& pi, int n, std::vector<double>& cprime,
               std::vector<double>& dprime) {
  const int n_max = static_cast<int>(pi.rows()) - 1;
  const int m_max = static_cast<int>(pi.cols()) - 1;
  for (int m = 0; m <= m_max; ++m) {
    double rhs = 0.0;
    if (n > 0) rhs += p.alpha * pi(n - 1, m);
    if (n < n_max) rhs += rates.patient(n + 1, m) * pi(n + 1, m);
    const double sub = m > 0 ? -p.beta : 0.0;
    const double sup = m < m_max ? -rates.impatient(n, m + 1) : 0.0;
    const double diag = rates.outflow(n, m);
    if (m == 0) {
      cprime[0] = sup / diag;
      dprime[0] = rhs / diag;
    } else {
      const double denom = diag - sub * cprime[m - 1];
      cprime[m] = sup / denom;
      dprime[m] = (rhs - sub * dprime[m - 1]) / denom;
    }
  }
  pi(n, m_max) = dprime[m_max];
  for (int m = m_max - 1; m >= 0; --m) pi(n, m) = dprime[m] - cprime[m] * pi(n, m + 1);
}

// Replaces the N-marginal with the exact marginal of the aggregated
// birth-death chain (birth alpha, death = conditional mean patient service).
void aggregate(const ModelParams& p, const RateTable& rates, Lattice& pi) {
  const int n_max = static_cast<int>(pi.rows()) - 1;
  const double uniform = 1.0 / static_cast<double>(pi.cols());
  Eigen::ArrayXd row_mass = pi.rowwise().sum();
  Eigen::ArrayXd log_q(n_max + 1);
  log_q(0) = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    double death = 0.0;
    if (row_mass(n) > 0.0) {
      death = (rates.patient.row(n) * pi.row(n)).sum() / row_mass(n);
    } else {
      death = rates.patient.row(n).sum() * uniform;
    }
    log_q(n) = log_q(n - 1) + std::log(p.alpha) - std::log(death);
  }
  const Eigen::ArrayXd q = normalized_from_logs(log_q);
  for (int n = 0; n <= n_max; ++n) {
    if (row_mass(n) > 0.0) {
      pi.row(n) *= q(n) / row_mass(n);
    } else {
      pi.row(n).setConstant(q(n) * uniform);
    }
  }
}

Lattice initial_guess(const DerivedConstants& d, const TruncatedGrid& grid) {
  const auto permanent = static_cast<std::int64_t>(std::llround(d.A));
  const Eigen::ArrayXd log_n = d.rho > 0.0 ? permanent_ps_log_pmf(permanent, d.rho, grid.n_max)
                                           : poisson_log_pmf(0.0, grid.n_max);
  const Eigen::ArrayXd log_m = poisson_log_pmf(d.A, grid.m_max);
  const Eigen::ArrayXd qn = normalized_from_logs(log_n);
  const Eigen::ArrayXd qm = normalized_from_logs(log_m);
  return qn.matrix() * qm.matrix().transpose();
}

StationaryDistribution finish(const TruncatedGrid& grid, const Lattice& pi, double residual, int iterations) {
  StationaryDistribution dist;
  dist.grid = grid;
  dist.pmf = pi;
  dist.residual = residual;
  dist.iterations = iterations;
  dist.boundary_mass = dist.pmf.row(grid.n_max).sum() + dist.pmf.col(grid.m_max).sum() -
                       dist.pmf(grid.n_max, grid.m_max);
  return dist;
}

}  // namespace

TruncatedGrid auto_grid(const ModelParams& params) {
  const DerivedConstants d = derive_constants(params);
  if (!d.stable()) throw std::invalid_argument("auto_grid: unstable parameters (rho >= 1)");
  const double spread_n = std::sqrt(d.A * d.rho) / (1.0 - d.rho);
  TruncatedGrid grid;
  grid.m_max = static_cast<int>(std::ceil(d.A + 12.0 * std::sqrt(d.A) + 30.0));
  grid.n_max = static_cast<int>(std::ceil(d.A * d.x_star + 12.0 * spread_n + 30.0));
  return grid;
}

double StationaryDistribution::at(std::int64_t n, std::int64_t m) const {
  if (n < 0 || m < 0 || n > grid.n_max || m > grid.m_max) return 0.0;
  return pmf(n, m);
}

double balance_residual(const ModelParams& params, const Eigen::ArrayXXd& pmf) {
  const int n_max = static_cast<int>(pmf.rows()) - 1;
  const int m_max = static_cast<int>(pmf.cols()) - 1;
  const RateTable rates(params, n_max, m_max);
  const Lattice pi = pmf;
  return residual_of(params, rates, pi);
}

StationaryDistribution solve_stationary(const ModelParams& params, const TruncatedGrid& grid,
                                        const SolverOptions& options) {
  const DerivedConstants d = derive_constants(params);
  if (!d.stable()) throw std::invalid_argument("solve_stationary: unstable parameters (rho >= 1)");
  if (grid.n_max < 1 || grid.m_max < 1) throw std::invalid_argument("solve_stationary: grid bounds must be >= 1");
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve_stationary: tol must be > 0");

  const RateTable rates(params, grid.n_max, grid.m_max);

  if (params.alpha == 0.0) {
    // N only decreases: all mass ends on the row n = 0, where M is a
    // birth-death chain with birth beta and death nu + theta m.
    Lattice pi = Lattice::Zero(grid.rows(), grid.cols());
    Eigen::ArrayXd logs(grid.cols());
    logs(0) = 0.0;
    for (int m = 1; m <= grid.m_max; ++m) {
      logs(m) = params.beta > 0.0 ? logs(m - 1) + std::log(params.beta) - std::log(rates.impatient(0, m)) : kNegInf;
    }
    pi.row(0) = normalized_from_logs(logs).transpose();
    const double residual = residual_of(params, rates, pi);
    if (residual > options.tol) throw SolverError("solve_stationary: residual above tolerance", residual, 0);
    return finish(grid, pi, residual, 0);
  }

  Lattice pi = initial_guess(d, grid);
  if (options.initial != nullptr && options.initial->size() > 0) {
    const Eigen::ArrayXXd& init = *options.initial;
    const Eigen::Index rows = std::min<Eigen::Index>(init.rows(), pi.rows());
    const Eigen::Index cols = std::min<Eigen::Index>(init.cols(), pi.cols());
    pi.topLeftCorner(rows, cols) = init.topLeftCorner(rows, cols);
    pi /= pi.sum();
  }

  std::vector<double> cprime(grid.cols());
  std::vector<double> dprime(grid.cols());
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    aggregate(params, rates, pi);
    for (int n = 0; n <= grid.n_max; ++n) solve_row(params, rates, pi, n, cprime, dprime);
    for (int n = grid.n_max; n >= 0; --n) solve_row(params, rates, pi, n, cprime, dprime);
    pi = pi.max(0.0);
    pi /= pi.sum();
    residual = residual_of(params, rates, pi);
    if (residual <= options.tol) return finish(grid, pi, residual, iter);
  }
  throw SolverError("solve_stationary: no convergence within iteration budget", residual, options.max_iterations);
}

StationaryDistribution solve_stationary(const ModelParams& params, double tol) {
  SolverOptions options;
  options.tol = tol;
  return solve_stationary(params, auto_grid(params), options);
}

Marginals marginals(const StationaryDistribution& dist) {
  return {dist.pmf.rowwise().sum(), dist.pmf.colwise().sum().transpose()};
}

Moments moments(const StationaryDistribution& dist) {
  const Marginals marg = marginals(dist);
  const Eigen::ArrayXd ns = Eigen::ArrayXd::LinSpaced(marg.n.size(), 0.0, static_cast<double>(marg.n.size() - 1));
  const Eigen::ArrayXd ms = Eigen::ArrayXd::LinSpaced(marg.m.size(), 0.0, static_cast<double>(marg.m.size() - 1));
  Moments out;
  out.mean_n = (ns * marg.n).sum();
  out.mean_m = (ms * marg.m).sum();
  out.var_n = ((ns - out.mean_n).square() * marg.n).sum();
  out.var_m = ((ms - out.mean_m).square() * marg.m).sum();
  const Eigen::VectorXd dn = (ns - out.mean_n).matrix();
  const Eigen::VectorXd dm = (ms - out.mean_m).matrix();
  out.cov_nm = dn.dot(dist.pmf.matrix() * dm);
  return out;
}

ConditionalDistribution conditional(const StationaryDistribution& dist, std::int64_t n) {
  if (n < 0 || n > dist.grid.n_max) throw std::domain_error("conditional: n outside the grid");
  const double mass = dist.pmf.row(n).sum();
  if (!(mass > 0.0)) throw std::domain_error("conditional: zero marginal mass at n = " + std::to_string(n));
  ConditionalDistribution out;
  out.n = n;
  out.pmf = dist.pmf.row(n).transpose() / mass;
  out.source = ConditionalDistribution::Source::exact;
  return out;
}

ConditionalDistribution quasi_stationary(const ModelParams& params, std::int64_t n, int m_max) {
  params.validate();
  if (n < 0) throw std::invalid_argument("quasi_stationary: n must be >= 0");
  if (m_max < 1) throw std::invalid_argument("quasi_stationary: m_max must be >= 1");
  Eigen::ArrayXd logs(m_max + 1);
  logs(0) = 0.0;
  for (int k = 1; k <= m_max; ++k) {
    if (params.beta == 0.0) {
      logs(k) = kNegInf;
      continue;
    }
    const double death = static_cast<double>(k) * (params.nu / static_cast<double>(n + k) + params.theta);
    logs(k) = logs(k - 1) + std::log(params.beta) - std::log(death);
  }
  ConditionalDistribution out;
  out.n = n;
  out.pmf = normalized_from_logs(logs);
  out.source = ConditionalDistribution::Source::quasi_stationary;
  if (out.pmf(m_max) > 1e-12) {
    throw std::invalid_argument("quasi_stationary: m_max too small for a 1e-12 normalization tail");
  }
  return out;
}

std::complex<double> generating_function(const StationaryDistribution& dist, std::complex<double> u,
                                         std::complex<double> v) {
  const int n_max = dist.grid.n_max;
  const int m_max = dist.grid.m_max;
  std::complex<double> total = 0.0;
  for (int n = n_max; n >= 0; --n) {
    std::complex<double> row = 0.0;
    for (int m = m_max; m >= 0; --m) row = row * v + dist.pmf(n, m);
    total = total * u + row;
  }
  return total;
}

Eigen::ArrayXd permanent_ps_log_pmf(std::int64_t m, double rho, int n_max) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("permanent_ps: rho must lie in (0, 1)");
  if (m < 0 || n_max < 0) throw std::invalid_argument("permanent_ps: m and n_max must be >= 0");
  Eigen::ArrayXd logs(n_max + 1);
  const double md = static_cast<double>(m);
  const double log_rho = std::log(rho);
  logs(0) = (md + 1.0) * std::log1p(-rho);
  for (int k = 1; k <= n_max; ++k) logs(k) = logs(k - 1) + log_rho + std::log1p(md / k);
  return logs;
}

Eigen::ArrayXd permanent_ps_distribution(std::int64_t m, double rho, int n_max) {
  return permanent_ps_log_pmf(m, rho, n_max).exp();
}

int permanent_ps_n_max(std::int64_t m, double rho, double tail) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("permanent_ps: rho must lie in (0, 1)");
  const double md = static_cast<double>(m);
  const double log_tail = std::log(tail);
  double log_term = (md + 1.0) * std::log1p(-rho);
  for (int n = 0;; ++n) {
    // Successive ratios rho (1 + m/(k+1)) decrease in k, so a geometric
    // series with the next ratio bounds the tail.
    const double q = rho * (1.0 + md / (n + 1.0));
    if (q < 1.0) {
      const double log_bound = log_term + std::log(q) - std::log1p(-q);
      if (log_bound < log_tail) return n;
    }
    log_term += std::log(q);
  }
}

double total_variation(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b) {
  const Eigen::Index rows = std::max(a.rows(), b.rows());
  const Eigen::Index cols = std::max(a.cols(), b.cols());
  Eigen::ArrayXXd diff = Eigen::ArrayXXd::Zero(rows, cols);
  diff.topLeftCorner(a.rows(), a.cols()) += a;
  diff.topLeftCorner(b.rows(), b.cols()) -= b;
  return 0.5 * diff.abs().sum();
}

double total_variation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  Eigen::ArrayXd diff = Eigen::ArrayXd::Zero(std::max(a.size(), b.size()));
  diff.head(a.size()) += a;
  diff.head(b.size()) -= b;
  return 0.5 * diff.abs().sum();
}

void write_csv(std::ostream& out, const Eigen::ArrayXXd& pmf) {
  out << "n,m,probability\n";
  char buf[64];
  for (Eigen::Index n = 0; n < pmf.rows(); ++n) {
    for (Eigen::Index m = 0; m < pmf.cols(); ++m) {
      std::snprintf(buf, sizeof buf, "%.17g", pmf(n, m));
      out << n << ',' << m << ',' << buf << '\n';
    }
  }
}

std::string summary_json(const StationaryDistribution& dist, int indent) {
  const Moments mom = moments(dist);
  nlohmann::json j;
  j["grid"] = {{"n_max", dist.grid.n_max}, {"m_max", dist.grid.m_max}};
  j["residual"] = dist.residual;
  j["iterations"] = dist.iterations;
  j["boundary_mass"] = dist.boundary_mass;
  j["total_mass"] = dist.pmf.sum();
  j["moments"] = {{"mean_N", mom.mean_n}, {"mean_M", mom.mean_m}, {"var_N", mom.var_n},
                  {"var_M", mom.var_m},   {"cov_NM", mom.cov_nm}};
  return j.dump(indent);
}

}  // namespace psq
