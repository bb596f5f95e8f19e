#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "psq/model.hpp"

using Catch::Approx;
using psq::ModelParams;
using psq::State;

TEST_CASE("derived constants") {
  const ModelParams p{1.0, 40.0, 2.0, 1.5, 2.0};
  const auto d = psq::derive_constants(p);
  CHECK(d.A == Approx(20.0));
  CHECK(d.rho == Approx(0.5));
  CHECK(d.x_star == Approx(1.0));
  CHECK(d.y_star == 1.0);
  CHECK(d.c == Approx(0.75));
  CHECK(d.stable());

  const auto u = psq::derive_constants(ModelParams{2.0, 1.0, 2.0, 1.0, 1.0});
  CHECK_FALSE(u.stable());
  CHECK(std::isinf(u.x_star));
}

TEST_CASE("with_scale sets beta = A theta") {
  const ModelParams p = ModelParams{0.5, 0.0, 1.0, 1.0, 3.0}.with_scale(7.0);
  CHECK(p.beta == Approx(21.0));
  CHECK(psq::derive_constants(p).A == Approx(7.0));
}

TEST_CASE("validation rejects bad rates") {
  CHECK_NOTHROW(ModelParams{0.0, 0.0, 1.0, 0.0, 1.0}.validate());
  CHECK_THROWS_AS((ModelParams{-1.0, 1.0, 1.0, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{1.0, 1.0, 0.0, 1.0, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{1.0, 1.0, 1.0, 1.0, 0.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{std::numeric_limits<double>::quiet_NaN(), 1.0, 1.0, 1.0, 1.0}.validate()),
                  std::invalid_argument);
}

TEST_CASE("transition rates from (n, m)") {
  const ModelParams p{0.7, 3.0, 2.0, 1.5, 0.25};
  const auto t = psq::transition_rates(State{2, 3}, p);
  double up_n = 0, up_m = 0, down_n = 0, down_m = 0;
  for (const auto& tr : t) {
    if (tr.target == State{3, 3}) up_n = tr.rate;
    if (tr.target == State{2, 4}) up_m = tr.rate;
    if (tr.target == State{1, 3}) down_n = tr.rate;
    if (tr.target == State{2, 2}) down_m = tr.rate;
  }
  CHECK(t.size() == 4);
  CHECK(up_n == Approx(0.7));
  CHECK(up_m == Approx(3.0));
  CHECK(down_n == Approx(2.0 * 2 / 5));
  CHECK(down_m == Approx(1.5 * 3 / 5 + 0.25 * 3));
  CHECK(t.total_rate() == Approx(0.7 + 3.0 + 0.8 + 0.9 + 0.75));
}

TEST_CASE("origin has no departures") {
  const ModelParams p{0.7, 3.0, 2.0, 1.5, 0.25};
  CHECK(psq::patient_departure_rate(p, 0, 0) == 0.0);
  CHECK(psq::impatient_departure_rate(p, 0, 0) == 0.0);
  const auto t = psq::transition_rates(State{0, 0}, p);
  CHECK(t.size() == 2);
  CHECK(t.total_rate() == Approx(3.7));
}

TEST_CASE("zero rates are omitted") {
  const ModelParams p{0.0, 0.0, 1.0, 0.0, 1.0};
  const auto t = psq::transition_rates(State{0, 4}, p);
  REQUIRE(t.size() == 1);
  CHECK(t[0].target == State{0, 3});
  CHECK(t[0].rate == Approx(4.0));
}

TEST_CASE("negative states are rejected") {
  CHECK_THROWS_AS(psq::transition_rates(State{-1, 0}, ModelParams{}), std::invalid_argument);
}
