// Exact stationary analysis on a truncated lattice.
//
// The infinite Kolmogorov system is truncated to {0..n_max} x {0..m_max}
// with reflecting boundaries: arrivals that would leave the grid are
// dropped from both the outflow and the inflow, so the truncated chain keeps
// a proper stationary distribution. `boundary_mass` reports how much
// probability sits on the last row/column, which is the under-truncation
// diagnostic.
#ifndef PSQ_STATIONARY_HPP
#define PSQ_STATIONARY_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "psq/model.hpp"

namespace psq {

struct TruncatedGrid {
  int n_max = 1;
  int m_max = 1;

  int rows() const { return n_max + 1; }
  int cols() const { return m_max + 1; }
  std::int64_t size() const { return static_cast<std::int64_t>(rows()) * cols(); }
};

// m_max = ceil(A + 12 sqrt(A) + 30), n_max = ceil(A x* + 12 sqrt(A rho/(1-rho)^2) + 30).
TruncatedGrid auto_grid(const ModelParams& params);

struct SolverOptions {
  double tol = 1e-10;  // bound on || pi Q ||_1
  int max_iterations = 20000;
  // Optional starting point; the overlap with the target grid is copied.
  const Eigen::ArrayXXd* initial = nullptr;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double last_residual, int iterations)
      : std::runtime_error(what), last_residual_(last_residual), iterations_(iterations) {}
  double last_residual() const { return last_residual_; }
  int iterations() const { return iterations_; }

 private:
  double last_residual_;
  int iterations_;
};

struct Moments {
  double mean_n = 0.0;
  double mean_m = 0.0;
  double var_n = 0.0;
  double var_m = 0.0;
  double cov_nm = 0.0;
};

struct StationaryDistribution {
  TruncatedGrid grid;
  Eigen::ArrayXXd pmf;  // pmf(n, m)
  double residual = 0.0;
  int iterations = 0;
  double boundary_mass = 0.0;

  double operator()(int n, int m) const { return pmf(n, m); }
  // Zero outside the grid.
  double at(std::int64_t n, std::int64_t m) const;
};

// || pi Q ||_1 for the reflecting truncated generator of `params`.
double balance_residual(const ModelParams& params, const Eigen::ArrayXXd& pmf);

// Throws std::invalid_argument when rho >= 1 or the grid is degenerate, and
// SolverError when the residual does not reach `options.tol`.
StationaryDistribution solve_stationary(const ModelParams& params, const TruncatedGrid& grid,
                                        const SolverOptions& options = {});
StationaryDistribution solve_stationary(const ModelParams& params, double tol = 1e-10);

struct Marginals {
  Eigen::ArrayXd n;
  Eigen::ArrayXd m;
};

Marginals marginals(const StationaryDistribution& dist);
Moments moments(const StationaryDistribution& dist);

struct ConditionalDistribution {
  enum class Source { exact, quasi_stationary };

  std::int64_t n = 0;
  Eigen::ArrayXd pmf;
  Source source = Source::exact;
};

// P(M = . | N = n). Throws std::domain_error when P(N = n) is zero.
ConditionalDistribution conditional(const StationaryDistribution& dist, std::int64_t n);

// Law of M with N frozen at n: birth beta, death m (nu/(n+m) + theta).
// Throws std::invalid_argument when the mass at m_max exceeds 1e-12.
ConditionalDistribution quasi_stationary(const ModelParams& params, std::int64_t n, int m_max);

// E(u^N v^M) over the truncated pmf.
std::complex<double> generating_function(const StationaryDistribution& dist, std::complex<double> u,
                                         std::complex<double> v);

// Single-server PS queue with m permanent customers, arrival alpha and
// service mu (rho = alpha/mu): log E_m(n) for n = 0..n_max. The values are
// the exact infinite-system probabilities, so 1 - sum(exp) is the tail
// beyond n_max. Throws std::invalid_argument unless 0 < rho < 1.
Eigen::ArrayXd permanent_ps_log_pmf(std::int64_t m, double rho, int n_max);
Eigen::ArrayXd permanent_ps_distribution(std::int64_t m, double rho, int n_max);

// Smallest n_max whose tail beyond it is below `tail`.
int permanent_ps_n_max(std::int64_t m, double rho, double tail = 1e-12);

// Total variation distance; the shorter operand is zero-padded.
double total_variation(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b);
double total_variation(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b);

void write_csv(std::ostream& out, const Eigen::ArrayXXd& pmf);
std::string summary_json(const StationaryDistribution& dist, int indent = 2);

}  // namespace psq

#endif  // PSQ_STATIONARY_HPP
