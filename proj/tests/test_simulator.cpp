#include <catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "psq/simulator.hpp"

using Catch::Approx;
using psq::ModelParams;
using psq::SimConfig;
using psq::State;

TEST_CASE("system with no arrivals drains and stays empty") {
  SimConfig cfg;
  cfg.t_end = 100.0;
  const auto path = psq::simulate_path(ModelParams{0.0, 0.0, 1.0, 1.0, 1.0}, cfg, State{5, 5});
  CHECK(path.final_state == State{0, 0});
  CHECK(path.events == 10);
  CHECK(path.end_time == Approx(100.0));
  CHECK(path.occupancy.total_time() == Approx(100.0));
  CHECK(path.occupancy.pmf()(0, 0) > 0.5);
}

TEST_CASE("M/M/inf mean with alpha = 0, nu = 0") {
  SimConfig cfg;
  cfg.seed = 11;
  cfg.t_end = 4000.0;
  cfg.burn_in = 50.0;
  cfg.replications = 4;
  const auto emp = psq::estimate_stationary(ModelParams{0.0, 10.0, 1.0, 0.0, 1.0}, cfg);
  CHECK(std::abs(emp.mean_m() - 10.0) < 5 * emp.stderr_mean_m() + 0.05);
  CHECK(emp.mean_n() == 0.0);
  CHECK(emp.pmf.sum() == Approx(1.0));
  CHECK(emp.total_time == Approx(4 * (4000.0 - 50.0)));
  Eigen::ArrayXd poisson(emp.pmf.cols());
  for (Eigen::Index k = 0; k < poisson.size(); ++k) poisson(k) = oracle::poisson_pmf(10.0, static_cast<int>(k));
  const Eigen::ArrayXd m_marg = emp.pmf.colwise().sum().transpose();
  double tv = 0.0;
  for (Eigen::Index k = 0; k < poisson.size(); ++k) tv += std::abs(m_marg(k) - poisson(k));
  CHECK(tv / 2 < 0.03);
}

TEST_CASE("replications are reproducible and independent of each other") {
  const ModelParams p{0.5, 5.0, 1.0, 1.0, 1.0};
  SimConfig cfg;
  cfg.seed = 42;
  cfg.t_end = 50.0;
  const auto a = psq::simulate_path(p, cfg, State{1, 5}, 3, 200);
  const auto b = psq::simulate_path(p, cfg, State{1, 5}, 3, 200);
  const auto c = psq::simulate_path(p, cfg, State{1, 5}, 4, 200);
  CHECK(a.trace == b.trace);
  CHECK(a.events == b.events);
  CHECK_FALSE(a.trace == c.trace);
  CHECK(a.trace.size() == std::min<std::size_t>(200, a.events));
  CHECK(psq::replication_seed(42, 3) != psq::replication_seed(42, 4));
  CHECK(psq::replication_seed(42, 3) != psq::replication_seed(43, 3));
}

TEST_CASE("pooled estimate equals merging the individual replications") {
  const ModelParams p{0.5, 3.0, 1.0, 1.0, 1.0};
  SimConfig cfg;
  cfg.seed = 9;
  cfg.t_end = 200.0;
  cfg.replications = 3;
  const auto pooled = psq::estimate_stationary(p, cfg);
  psq::Occupancy merged;
  std::uint64_t events = 0;
  for (int r = 0; r < 3; ++r) {
    const auto path = psq::simulate_path(p, cfg, State{3, 3}, r);
    merged.merge(path.occupancy);
    events += path.events;
  }
  CHECK(pooled.events == events);
  const Eigen::ArrayXXd a = pooled.pmf, b = merged.pmf();
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  CHECK((a - b).abs().maxCoeff() < 1e-15);
  CHECK(pooled.replication_mean_n.size() == 3);
}

TEST_CASE("occupancy grows on demand") {
  psq::Occupancy occ;
  occ.add(State{0, 0}, 1.0);
  occ.add(State{7, 2}, 3.0);
  occ.add(State{1, 11}, 4.0);
  CHECK(occ.total_time() == Approx(8.0));
  CHECK(occ.weights().rows() >= 8);
  CHECK(occ.weights().cols() >= 12);
  CHECK(occ.pmf()(7, 2) == Approx(3.0 / 8.0));
  CHECK(occ.mean_n() == Approx((7 * 3.0 + 4.0) / 8.0));
  CHECK(occ.mean_m() == Approx((2 * 3.0 + 11 * 4.0) / 8.0));
}

TEST_CASE("invalid configurations") {
  SimConfig cfg;
  cfg.burn_in = cfg.t_end;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  SimConfig ok;
  CHECK_THROWS_AS(psq::estimate_stationary(ModelParams{1.0, 1.0, 1.0, 1.0, 1.0}, ok), std::invalid_argument);
  CHECK_THROWS_AS(psq::simulate_path(ModelParams{}, ok, State{-1, 0}), std::invalid_argument);
}

TEST_CASE("coupled run: M never exceeds the M/M/inf copy") {
  const ModelParams p = ModelParams{0.5, 0.0, 1.0, 1.0, 1.0}.with_scale(15.0);
  SimConfig cfg;
  cfg.seed = 5;
  cfg.t_end = 1e300;
  cfg.max_events = 200000;
  const auto rep = psq::coupled_dominance_run(p, cfg);
  CHECK(rep.ok());
  CHECK(rep.events == 200000);
  CHECK_FALSE(rep.identical_paths);
  CHECK((rep.m_tail <= rep.m_prime_tail + 1e-12).all());
  // M' is exactly M/M/inf, so its tail matches Poisson(A) up to noise.
  CHECK((rep.m_prime_tail - rep.poisson_tail).abs().maxCoeff() < 0.05);
  CHECK(rep.max_tail_excess() < 0.02);
}

TEST_CASE("coupled run with nu = 0 keeps the two copies identical") {
  const ModelParams p{0.5, 8.0, 1.0, 0.0, 1.0};
  SimConfig cfg;
  cfg.seed = 6;
  cfg.t_end = 1e300;
  cfg.max_events = 50000;
  const auto rep = psq::coupled_dominance_run(p, cfg, State{0, 0});
  CHECK(rep.ok());
  CHECK(rep.identical_paths);
}
