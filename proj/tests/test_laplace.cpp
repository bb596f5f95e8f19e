#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "psq/laplace.hpp"

using Catch::Approx;

TEST_CASE("golden section finds an interior minimum") {
  const double r = psq::golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3) + 2.0; }, {-1.0, 2.0});
  CHECK(r == Approx(0.3).margin(1e-7));
}

TEST_CASE("Gaussian integrand is reproduced exactly") {
  const double c = 0.7;
  for (double A : {1.0, 10.0, 1000.0}) {
    const auto res = psq::laplace_expand_detailed([c](double r) { return 0.5 * (r - c) * (r - c); },
                                                  [](double) { return 1.0; }, {-20.0, 20.0}, A);
    CHECK(res.minimizer == Approx(c).margin(1e-7));
    CHECK(res.curvature == Approx(1.0).epsilon(1e-6));
    CHECK(res.value.real() == Approx(std::sqrt(2 * std::numbers::pi / A)).epsilon(1e-6));
    CHECK(std::abs(res.value.imag()) < 1e-15);
  }
}

TEST_CASE("oscillating Gaussian") {
  // int exp(-A r^2/2 + i A zeta r) dr = sqrt(2 pi/A) exp(-A zeta^2/2)
  const double A = 30.0, zeta = 0.2;
  const auto v = psq::laplace_expand([](double r) { return 0.5 * r * r; }, [](double) { return 1.0; }, {-5.0, 5.0},
                                     A, zeta);
  CHECK(v.real() == Approx(std::sqrt(2 * std::numbers::pi / A) * std::exp(-A * zeta * zeta / 2)).epsilon(1e-6));
  CHECK(std::abs(v.imag()) < 1e-8);
}

TEST_CASE("Stirling: Gamma(A+1) = A^{A+1} e^{-A} int exp(-A (r - log r - 1)) dr") {
  for (double A : {5.0, 10.0, 100.0, 1000.0}) {
    const auto v = psq::laplace_expand([](double r) { return r - std::log(r) - 1.0; }, [](double) { return 1.0; },
                                       {1e-3, 30.0}, A);
    const double log_approx = std::log(v.real()) + (A + 1) * std::log(A) - A;
    const double rel = std::expm1(std::lgamma(A + 1) - log_approx);
    CHECK(rel > 0.0);
    CHECK(rel < 1.0 / (10 * A));
    CHECK(rel == Approx(1.0 / (12 * A)).epsilon(0.05));
  }
}

TEST_CASE("boundary minimum and non-positive curvature are rejected") {
  CHECK_THROWS_AS(psq::laplace_expand([](double r) { return r; }, [](double) { return 1.0; }, {0.0, 1.0}, 10.0),
                  psq::LaplaceError);
  CHECK_THROWS_AS(psq::laplace_expand([](double) { return 1.0; }, [](double) { return 1.0; },
                                      {0.0, 1.0}, 10.0),
                  psq::LaplaceError);
}
