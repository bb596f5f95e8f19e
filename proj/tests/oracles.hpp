// Independent reference computations for the tests. Nothing here calls the
// library's rate or solver code.
#ifndef PSQ_TESTS_ORACLES_HPP
#define PSQ_TESTS_ORACLES_HPP

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

struct Rates {
  double alpha, beta, mu, nu, theta;
};

// Dense generator of the chain on {0..n_max} x {0..m_max}; arrivals leaving
// the box are suppressed. State index n * (m_max + 1) + m.
inline Eigen::MatrixXd dense_generator(const Rates& r, int n_max, int m_max) {
  const int cols = m_max + 1;
  const int size = (n_max + 1) * cols;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(size, size);
  auto idx = [cols](int n, int m) { return n * cols + m; };
  for (int n = 0; n <= n_max; ++n) {
    for (int m = 0; m <= m_max; ++m) {
      const int i = idx(n, m);
      const double total = n + m;
      if (n < n_max) Q(i, idx(n + 1, m)) += r.alpha;
      if (m < m_max) Q(i, idx(n, m + 1)) += r.beta;
      if (n > 0) Q(i, idx(n - 1, m)) += r.mu * n / total;
      if (m > 0) Q(i, idx(n, m - 1)) += r.nu * m / total + r.theta * m;
    }
  }
  for (int i = 0; i < size; ++i) Q(i, i) = -Q.row(i).sum();
  return Q;
}

// Solves pi Q = 0, sum pi = 1 by LU with one balance equation replaced by
// the normalization. Returned as pmf(n, m).
inline Eigen::ArrayXXd dense_stationary(const Rates& r, int n_max, int m_max) {
  const Eigen::MatrixXd Q = dense_generator(r, n_max, m_max);
  Eigen::MatrixXd M = Q.transpose();
  M.row(M.rows() - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(M.rows());
  rhs(rhs.size() - 1) = 1.0;
  const Eigen::VectorXd pi = M.fullPivLu().solve(rhs);
  Eigen::ArrayXXd pmf(n_max + 1, m_max + 1);
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m <= m_max; ++m) pmf(n, m) = pi(n * (m_max + 1) + m);
  return pmf;
}

inline double poisson_pmf(double lambda, int k) {
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

inline double poisson_tail(double lambda, int k) {  // P(X >= k)
  double below = 0.0;
  for (int j = 0; j < k; ++j) below += poisson_pmf(lambda, j);
  return 1.0 - below;
}

}  // namespace oracle

#endif  // PSQ_TESTS_ORACLES_HPP
