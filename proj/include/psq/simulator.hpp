// Exact-jump simulation of the (N, M) process.
//
// Each replication draws from its own std::mt19937_64 stream whose seed is
// a SplitMix64 hash of (master seed, replication index), so replication r
// is reproducible on its own regardless of how replications are scheduled.
#ifndef PSQ_SIMULATOR_HPP
#define PSQ_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "psq/model.hpp"

namespace psq {

struct SimConfig {
  std::uint64_t seed = 1;
  double t_end = 1e4;
  double burn_in = 0.0;
  int replications = 1;
  std::uint64_t max_events = 0;  // 0: bounded by t_end only

  void validate() const;
};

std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t replication);

// Time-weighted occupancy over a lattice that grows on demand.
class Occupancy {
 public:
  void add(State s, double dt);
  void merge(const Occupancy& other);

  double total_time() const { return total_time_; }
  const Eigen::ArrayXXd& weights() const { return weights_; }
  Eigen::ArrayXXd pmf() const;
  double mean_n() const;
  double mean_m() const;

 private:
  Eigen::ArrayXXd weights_;
  double total_time_ = 0.0;
};

struct TraceEvent {
  double time = 0.0;
  State state;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct PathResult {
  Occupancy occupancy;  // over [burn_in, end_time]
  std::uint64_t events = 0;
  State final_state;
  double end_time = 0.0;
  std::vector<TraceEvent> trace;  // first `trace_limit` jumps
};

PathResult simulate_path(const ModelParams& params, const SimConfig& config, State initial,
                         std::uint64_t replication = 0, std::size_t trace_limit = 0);

struct EmpiricalDistribution {
  Eigen::ArrayXXd pmf;
  double total_time = 0.0;
  std::uint64_t events = 0;
  std::vector<double> replication_mean_n;
  std::vector<double> replication_mean_m;

  double mean_n() const;
  double mean_m() const;
  // Standard error of the pooled mean from the replication spread (NaN for a
  // single replication).
  double stderr_mean_n() const;
  double stderr_mean_m() const;
};

// Pools replications started at the fluid point (round(A x*), round(A)).
// Throws std::invalid_argument when rho >= 1.
EmpiricalDistribution estimate_stationary(const ModelParams& params, const SimConfig& config);

struct DominanceReport {
  std::uint64_t events = 0;
  std::uint64_t violations = 0;
  std::optional<double> first_violation_time;
  std::optional<State> first_violation_state;
  std::int64_t first_violation_m_prime = 0;
  // Time-weighted P(M >= m), P(M' >= m) and the Poisson(A) tail, m = 0..size-1.
  Eigen::ArrayXd m_tail;
  Eigen::ArrayXd m_prime_tail;
  Eigen::ArrayXd poisson_tail;
  bool identical_paths = true;  // M == M' at every epoch

  bool ok() const { return violations == 0; }
  // max_m (P(M >= m) - P(Poisson(A) >= m)).
  double max_tail_excess() const;
};

// Runs (N, M) jointly with the M/M/inf queue M' (arrivals beta, per-customer
// rate theta): both share the arrival stream, every customer present in both
// shares one impatience clock, and M' ignores service completions. Checks
// M(t) <= M'(t) after every event. Uses replication 0 of `config.seed`.
DominanceReport coupled_dominance_run(const ModelParams& params, const SimConfig& config, State initial);
DominanceReport coupled_dominance_run(const ModelParams& params, const SimConfig& config);

}  // namespace psq

#endif  // PSQ_SIMULATOR_HPP
