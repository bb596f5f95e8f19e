// Reproducible experiment drivers: each returns rows in a fixed order and
// has a matching CSV writer. The CLI adds a JSON manifest per run.
#ifndef PSQ_EXPERIMENTS_HPP
#define PSQ_EXPERIMENTS_HPP

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "psq/mobile.hpp"
#include "psq/model.hpp"
#include "psq/stationary.hpp"

namespace psq {

inline constexpr const char* kVersion = "0.1.0";

struct ConvergenceSpec {
  ModelParams base;  // beta is replaced by A theta per A value
  std::vector<double> A_values;
  std::vector<std::pair<double, double>> probes;  // (x, y)
  double tol = 1e-10;
  std::optional<TruncatedGrid> grid;  // auto_grid when unset
};

struct ConvergenceRow {
  double A = 0.0;
  double x = 0.0;
  double y = 0.0;
  std::int64_t n = 0;  // floor(A x)
  std::int64_t m = 0;
  double exact = 0.0;
  double sharp = 0.0;
  double ratio = 0.0;
  double decay_estimate = 0.0;  // -(1/A) log exact
  double H = 0.0;
  int grid_n_max = 0;
  int grid_m_max = 0;
  double residual = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // A-major, probes in input order
  std::vector<std::pair<double, double>> skipped;  // probes on an axis
};

// Probes with x <= 0 or y <= 0 are skipped (g is singular there).
// Throws std::invalid_argument when alpha/mu >= 1.
ConvergenceReport run_convergence(const ConvergenceSpec& spec);
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

struct FigureSpec {
  ModelParams params;  // only the loads and rate ratios matter
  int points_per_unit = 10;
  double x_max = 4.0;
  double y_max = 4.0;
};

struct FigureRow {
  double x = 0.0;
  double y = 0.0;
  double H = 0.0;
  double g = 0.0;  // NaN on the axes
};

// Grid x = i/points_per_unit, y = j/points_per_unit, i-major.
std::vector<FigureRow> run_figure_data(const FigureSpec& spec);
void write_figure_csv(std::ostream& out, const std::vector<FigureRow>& rows);

// rho_tot,beta_net,mean_N,mean_M,gamma,Gamma,A_mob followed by diagnostics.
void write_mobile_csv(std::ostream& out, const GrowthReport& report);

nlohmann::json to_json(const ModelParams& p);
nlohmann::json to_json(const GrowthReport& report);

// Writes `manifest` as manifest.json under `dir`, adding version and the
// listed outputs. Returns the path written.
std::filesystem::path write_manifest(const std::filesystem::path& dir, nlohmann::json manifest,
                                     const std::vector<std::string>& outputs);

}  // namespace psq

#endif  // PSQ_EXPERIMENTS_HPP
