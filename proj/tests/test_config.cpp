#include <catch_amalgamated.hpp>

#include "psq/config.hpp"

using Catch::Approx;

TEST_CASE("key-value syntax with comments") {
  const auto cfg = psq::Config::parse(
      "# comment\n"
      "alpha = 0.25\n"
      "beta: 10   # trailing\n"
      "\n"
      "seed = 18446744073709551\n");
  CHECK(cfg.get_double("alpha").value() == Approx(0.25));
  CHECK(cfg.get_double("beta").value() == Approx(10.0));
  CHECK(cfg.get_int("seed").value() == 18446744073709551LL);
  CHECK_FALSE(cfg.contains("mu"));
  CHECK_FALSE(cfg.get_double("mu").has_value());
}

TEST_CASE("JSON syntax") {
  const auto cfg = psq::Config::parse(R"({"alpha": 0.5, "nu": 2, "tag": "run1"})");
  CHECK(cfg.get_double("alpha").value() == Approx(0.5));
  CHECK(cfg.get_int("nu").value() == 2);
  CHECK(cfg.get_string("tag").value() == "run1");
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS(psq::Config::parse("alpha 0.5\n"));
  CHECK_THROWS(psq::Config::parse(R"({"alpha": [1, 2]})"));
  CHECK_THROWS(psq::Config::parse("alpha = abc\n").get_double("alpha"));
  CHECK_THROWS(psq::Config::load("/nonexistent/file.cfg"));
}

TEST_CASE("params_from_config applies A and rho") {
  const auto cfg = psq::Config::parse("mu = 2\ntheta = 0.5\nrho = 0.4\nA = 30\n");
  const auto p = psq::params_from_config(cfg);
  CHECK(p.mu == Approx(2.0));
  CHECK(p.alpha == Approx(0.8));
  CHECK(p.beta == Approx(15.0));
  CHECK(p.nu == Approx(1.0));
}

TEST_CASE("params_from_config keeps defaults and validates") {
  psq::ModelParams defaults{0.1, 2.0, 1.0, 1.0, 1.0};
  const auto p = psq::params_from_config(psq::Config::parse("nu = 3\n"), defaults);
  CHECK(p.alpha == Approx(0.1));
  CHECK(p.beta == Approx(2.0));
  CHECK(p.nu == Approx(3.0));
  CHECK_THROWS_AS(psq::params_from_config(psq::Config::parse("mu = -1\n")), std::invalid_argument);
}
