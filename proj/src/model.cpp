#include "psq/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace psq {

namespace {

void require_rate(double value, const char* name, bool strictly_positive) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string(name) + " must be finite");
  }
  if (strictly_positive ? !(value > 0.0) : value < 0.0) {
    throw std::invalid_argument(std::string(name) +
                                (strictly_positive ? " must be > 0" : " must be >= 0"));
  }
}

}  // namespace

void ModelParams::validate() const {
  require_rate(alpha, "alpha", false);
  require_rate(beta, "beta", false);
  require_rate(mu, "mu", true);
  require_rate(nu, "nu", false);
  require_rate(theta, "theta", true);
}

ModelParams ModelParams::with_scale(double A) const {
  ModelParams p = *this;
  p.beta = A * theta;
  return p;
}

DerivedConstants derive_constants(const ModelParams& params) {
  params.validate();
  DerivedConstants d;
  d.A = params.beta / params.theta;
  d.rho = params.alpha / params.mu;
  d.x_star = d.rho < 1.0 ? d.rho / (1.0 - d.rho) : std::numeric_limits<double>::infinity();
  d.y_star = 1.0;
  d.c = params.nu / params.theta;
  return d;
}

double Transitions::total_rate() const {
  double total = 0.0;
  for (const auto& t : *this) total += t.rate;
  return total;
}

Transitions transition_rates(State s, const ModelParams& params) {
  if (s.n < 0 || s.m < 0) throw std::invalid_argument("state coordinates must be non-negative");
  Transitions out;
  out.push({s.n + 1, s.m}, params.alpha);
  out.push({s.n, s.m + 1}, params.beta);
  out.push({s.n - 1, s.m}, patient_departure_rate(params, s.n, s.m));
  out.push({s.n, s.m - 1}, impatient_departure_rate(params, s.n, s.m));
  return out;
}

}  // namespace psq
