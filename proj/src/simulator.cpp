#include "psq/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace psq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

State fluid_point(const ModelParams& params) {
  const DerivedConstants d = derive_constants(params);
  if (!d.stable()) throw std::invalid_argument("simulation: unstable parameters (rho >= 1)");
  return {std::llround(d.A * d.x_star), std::llround(d.A)};
}

void accumulate_window(Occupancy& occ, State s, double from, double to, double burn_in) {
  const double start = std::max(from, burn_in);
  if (to > start) occ.add(s, to - start);
}

void add_to_histogram(Eigen::ArrayXd& hist, std::int64_t k, double dt) {
  if (k >= hist.size()) {
    const Eigen::Index old = hist.size();
    hist.conservativeResize(std::max<Eigen::Index>(2 * old, k + 1));
    hist.tail(hist.size() - old).setZero();
  }
  hist(k) += dt;
}

Eigen::ArrayXd tail_of(const Eigen::ArrayXd& hist, Eigen::Index size) {
  Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(size);
  padded.head(std::min(size, hist.size())) = hist.head(std::min(size, hist.size()));
  const double total = hist.sum();
  Eigen::ArrayXd tail(size);
  double acc = 0.0;
  for (Eigen::Index k = size - 1; k >= 0; --k) {
    acc += padded(k);
    tail(k) = total > 0.0 ? acc / total : 0.0;
  }
  return tail;
}

Eigen::ArrayXd poisson_tail(double A, Eigen::Index size) {
  Eigen::ArrayXd tail(size);
  const Eigen::Index upper = std::max<Eigen::Index>(size, static_cast<Eigen::Index>(A + 40.0 * std::sqrt(A) + 60.0));
  double acc = 0.0;
  for (Eigen::Index k = upper; k >= 0; --k) {
    const double pk = A == 0.0 ? (k == 0 ? 1.0 : 0.0)
                               : std::exp(static_cast<double>(k) * std::log(A) - A - std::lgamma(k + 1.0));
    acc += pk;
    if (k < size) tail(k) = acc;
  }
  return tail;
}

}  // namespace

void SimConfig::validate() const {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("SimConfig: t_end must be finite and > 0");
  if (!(burn_in >= 0.0 && burn_in < t_end)) throw std::invalid_argument("SimConfig: need 0 <= burn_in < t_end");
  if (replications < 1) throw std::invalid_argument("SimConfig: replications must be >= 1");
}

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t replication) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(replication + 0x632be59bd9b4e019ULL));
}

void Occupancy::add(State s, double dt) {
  if (s.n >= weights_.rows() || s.m >= weights_.cols()) {
    const Eigen::Index rows = s.n >= weights_.rows() ? std::max<Eigen::Index>(2 * weights_.rows(), s.n + 1) : weights_.rows();
    const Eigen::Index cols = s.m >= weights_.cols() ? std::max<Eigen::Index>(2 * weights_.cols(), s.m + 1) : weights_.cols();
    weights_.conservativeResizeLike(Eigen::ArrayXXd::Zero(rows, cols));
  }
  weights_(s.n, s.m) += dt;
  total_time_ += dt;
}

void Occupancy::merge(const Occupancy& other) {
  const Eigen::Index rows = std::max(weights_.rows(), other.weights_.rows());
  const Eigen::Index cols = std::max(weights_.cols(), other.weights_.cols());
  weights_.conservativeResizeLike(Eigen::ArrayXXd::Zero(rows, cols));
  weights_.topLeftCorner(other.weights_.rows(), other.weights_.cols()) += other.weights_;
  total_time_ += other.total_time_;
}

Eigen::ArrayXXd Occupancy::pmf() const {
  const double total = weights_.sum();
  if (!(total > 0.0)) return weights_;
  return weights_ / total;
}

double Occupancy::mean_n() const {
  const Eigen::ArrayXd row = weights_.rowwise().sum();
  return (Eigen::ArrayXd::LinSpaced(row.size(), 0.0, static_cast<double>(row.size() - 1)) * row).sum() / row.sum();
}

double Occupancy::mean_m() const {
  const Eigen::ArrayXd col = weights_.colwise().sum().transpose();
  return (Eigen::ArrayXd::LinSpaced(col.size(), 0.0, static_cast<double>(col.size() - 1)) * col).sum() / col.sum();
}

PathResult simulate_path(const ModelParams& params, const SimConfig& config, State initial, std::uint64_t replication,
                         std::size_t trace_limit) {
  params.validate();
  config.validate();
  if (initial.n < 0 || initial.m < 0) throw std::invalid_argument("simulate_path: negative initial state");
  std::mt19937_64 rng(replication_seed(config.seed, replication));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  PathResult result;
  State s = initial;
  double t = 0.0;
  while (config.max_events == 0 || result.events < config.max_events) {
    const Transitions moves = transition_rates(s, params);
    const double total = moves.total_rate();
    if (total == 0.0) {  // absorbing
      accumulate_window(result.occupancy, s, t, config.t_end, config.burn_in);
      t = config.t_end;
      break;
    }
    const double dt = std::exponential_distribution<double>(total)(rng);
    if (t + dt >= config.t_end) {
      accumulate_window(result.occupancy, s, t, config.t_end, config.burn_in);
      t = config.t_end;
      break;
    }
    accumulate_window(result.occupancy, s, t, t + dt, config.burn_in);
    t += dt;
    double pick = uniform(rng) * total;
    std::size_t chosen = moves.size() - 1;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      if (pick < moves[i].rate) {
        chosen = i;
        break;
      }
      pick -= moves[i].rate;
    }
    s = moves[chosen].target;
    ++result.events;
    if (result.trace.size() < trace_limit) result.trace.push_back({t, s});
  }
  result.final_state = s;
  result.end_time = t;
  return result;
}

double EmpiricalDistribution::mean_n() const {
  const Eigen::ArrayXd row = pmf.rowwise().sum();
  return (Eigen::ArrayXd::LinSpaced(row.size(), 0.0, static_cast<double>(row.size() - 1)) * row).sum();
}

double EmpiricalDistribution::mean_m() const {
  const Eigen::ArrayXd col = pmf.colwise().sum().transpose();
  return (Eigen::ArrayXd::LinSpaced(col.size(), 0.0, static_cast<double>(col.size() - 1)) * col).sum();
}

namespace {

double stderr_of(const std::vector<double>& values) {
  const auto k = static_cast<double>(values.size());
  if (values.size() < 2) return std::nan("");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= k;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (k - 1.0) / k);
}

}  // namespace

double EmpiricalDistribution::stderr_mean_n() const { return stderr_of(replication_mean_n); }
double EmpiricalDistribution::stderr_mean_m() const { return stderr_of(replication_mean_m); }

EmpiricalDistribution estimate_stationary(const ModelParams& params, const SimConfig& config) {
  config.validate();
  const State start = fluid_point(params);
  std::vector<PathResult> runs(config.replications);

  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(config.replications)));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int r = static_cast<int>(w); r < config.replications; r += static_cast<int>(workers)) {
        runs[r] = simulate_path(params, config, start, static_cast<std::uint64_t>(r));
      }
    });
  }
  for (auto& t : pool) t.join();

  Occupancy pooled;
  EmpiricalDistribution out;
  for (const auto& run : runs) {  // replication order
    pooled.merge(run.occupancy);
    out.events += run.events;
    out.replication_mean_n.push_back(run.occupancy.mean_n());
    out.replication_mean_m.push_back(run.occupancy.mean_m());
  }
  out.pmf = pooled.pmf();
  out.total_time = pooled.total_time();
  return out;
}

double DominanceReport::max_tail_excess() const {
  const Eigen::Index k = std::min(m_tail.size(), poisson_tail.size());
  if (k == 0) return 0.0;
  return (m_tail.head(k) - poisson_tail.head(k)).maxCoeff();
}

DominanceReport coupled_dominance_run(const ModelParams& params, const SimConfig& config, State initial) {
  params.validate();
  config.validate();
  if (initial.n < 0 || initial.m < 0) throw std::invalid_argument("coupled_dominance_run: negative initial state");
  std::mt19937_64 rng(replication_seed(config.seed, 0));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  DominanceReport report;
  std::int64_t n = initial.n;
  std::int64_t m = initial.m;
  std::int64_t m_prime = initial.m;  // M'(0) = M(0)
  Eigen::ArrayXd hist_m = Eigen::ArrayXd::Zero(16);
  Eigen::ArrayXd hist_mp = Eigen::ArrayXd::Zero(16);
  double t = 0.0;

  while (config.max_events == 0 || report.events < config.max_events) {
    // Customers of M' that already finished service in M keep their own
    // impatience clocks ("ghosts"); everyone else shares clocks with M.
    const std::int64_t ghosts = m_prime - m;
    const std::array<double, 6> rates{
        params.alpha,                                    // patient arrival
        params.beta,                                     // shared impatient arrival
        patient_departure_rate(params, n, m),            // patient service
        m > 0 ? params.nu * m / static_cast<double>(n + m) : 0.0,  // impatient service: M only
        params.theta * static_cast<double>(m),           // shared impatience
        params.theta * static_cast<double>(std::max<std::int64_t>(ghosts, 0)),  // ghost impatience: M' only
    };
    double total = 0.0;
    for (double r : rates) total += r;
    const double dt = total > 0.0 ? std::exponential_distribution<double>(total)(rng) : config.t_end;
    const double hold_end = std::min(t + dt, config.t_end);
    const double start = std::max(t, config.burn_in);
    if (hold_end > start) {
      add_to_histogram(hist_m, m, hold_end - start);
      add_to_histogram(hist_mp, m_prime, hold_end - start);
    }
    if (t + dt >= config.t_end) break;
    t += dt;

    double pick = uniform(rng) * total;
    std::size_t chosen = rates.size();
    for (std::size_t i = 0; i < rates.size(); ++i) {
      if (rates[i] <= 0.0) continue;
      chosen = i;  // last positive rate absorbs rounding at the top end
      if (pick < rates[i]) break;
      pick -= rates[i];
    }
    switch (chosen) {
      case 0: ++n; break;
      case 1: ++m; ++m_prime; break;
      case 2: --n; break;
      case 3: --m; break;
      case 4: --m; --m_prime; break;
      case 5: --m_prime; break;
    }
    ++report.events;
    if (m != m_prime) report.identical_paths = false;
    if (m > m_prime) {
      ++report.violations;
      if (!report.first_violation_time) {
        report.first_violation_time = t;
        report.first_violation_state = State{n, m};
        report.first_violation_m_prime = m_prime;
      }
    }
  }

  const Eigen::Index size = std::max(hist_m.size(), hist_mp.size());
  report.m_tail = tail_of(hist_m, size);
  report.m_prime_tail = tail_of(hist_mp, size);
  report.poisson_tail = poisson_tail(params.beta / params.theta, size);
  return report;
}

DominanceReport coupled_dominance_run(const ModelParams& params, const SimConfig& config) {
  return coupled_dominance_run(params, config, fluid_point(params));
}

}  // namespace psq
