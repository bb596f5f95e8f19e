#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "psq/experiments.hpp"

using Catch::Approx;
using psq::ModelParams;

namespace {

const psq::FigureRow* find(const std::vector<psq::FigureRow>& rows, double x, double y) {
  for (const auto& r : rows)
    if (r.x == x && r.y == y) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("figure data contains the anchors and is deterministic") {
  psq::FigureSpec spec;
  spec.params = ModelParams{0.5, 0.0, 1.0, 1.0, 1.0};
  spec.points_per_unit = 10;
  const auto rows = psq::run_figure_data(spec);
  CHECK(rows.size() == 41 * 41);
  const auto* origin = find(rows, 0.0, 0.0);
  const auto* xa = find(rows, 3.0, 0.0);
  const auto* ya = find(rows, 0.0, 3.0);
  const auto* fluid = find(rows, 1.0, 1.0);
  REQUIRE(origin);
  REQUIRE(xa);
  REQUIRE(ya);
  REQUIRE(fluid);
  CHECK(origin->H == Approx(1.69).margin(0.01));
  CHECK(xa->H == Approx(1.52).margin(0.01));
  CHECK(ya->H == Approx(1.99).margin(0.01));
  CHECK(fluid->H == Approx(0.0).margin(1e-15));
  CHECK(std::isnan(origin->g));
  CHECK(fluid->g == Approx(std::sqrt(0.5)));
  for (const auto& r : rows) CHECK(r.H >= fluid->H);

  std::ostringstream a, b;
  psq::write_figure_csv(a, rows);
  psq::write_figure_csv(b, psq::run_figure_data(spec));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("x,y,H,g\n", 0) == 0);
}

TEST_CASE("convergence report skips axis probes") {
  psq::ConvergenceSpec spec;
  spec.base = ModelParams{0.5, 0.0, 1.0, 1.0, 1.0};
  spec.A_values = {10.0, 20.0};
  spec.probes = {{1.0, 1.0}, {0.0, 0.0}, {1.5, 0.5}};
  const auto rep = psq::run_convergence(spec);
  REQUIRE(rep.rows.size() == 4);
  REQUIRE(rep.skipped.size() == 1);
  CHECK(rep.rows[0].A == 10.0);
  CHECK(rep.rows[2].A == 20.0);
  CHECK(rep.rows[1].n == 15);
  CHECK(rep.rows[1].m == 5);
  for (const auto& r : rep.rows) {
    CHECK(r.ratio == Approx(r.exact / r.sharp));
    CHECK(r.decay_estimate == Approx(-std::log(r.exact) / r.A));
  }
  // Ratio at the fluid point moves toward one.
  CHECK(std::abs(rep.rows[2].ratio - 1) < std::abs(rep.rows[0].ratio - 1));

  std::ostringstream os;
  psq::write_convergence_csv(os, rep);
  CHECK(os.str().rfind("A,x,y,n,m,exact,sharp,ratio,decay_estimate,H", 0) == 0);

  spec.base.alpha = 1.0;
  CHECK_THROWS_AS(psq::run_convergence(spec), std::invalid_argument);
}

TEST_CASE("mobile csv starts with the documented columns") {
  const auto rep = psq::mean_growth_check(psq::MobileInputs{0.4, 0.0, 1.0, 1.0, 1.0}, {0.6});
  std::ostringstream os;
  psq::write_mobile_csv(os, rep);
  CHECK(os.str().rfind("rho_tot,beta_net,mean_N,mean_M,gamma,Gamma,A_mob", 0) == 0);
  const auto j = psq::to_json(rep);
  CHECK(j["rows"].size() == 1);
}

TEST_CASE("manifest records version and outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "psq_manifest_test";
  std::filesystem::remove_all(dir);
  const auto path = psq::write_manifest(dir, {{"command", "solve"}, {"params", psq::to_json(ModelParams{})}},
                                        {"stationary.csv"});
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  CHECK(j["version"] == psq::kVersion);
  CHECK(j["outputs"][0] == "stationary.csv");
  CHECK(j["params"]["mu"] == 1.0);
  std::filesystem::remove_all(dir);
}
