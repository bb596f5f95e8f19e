#include "psq/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace psq {

namespace {

double fd_step(double r) { return std::max(1e-5, 1e-5 * std::abs(r)); }

double second_derivative(const RealFunction& h, double r) {
  const double step = fd_step(r);
  return (h(r + step) - 2.0 * h(r) + h(r - step)) / (step * step);
}

double first_derivative(const RealFunction& h, double r) {
  const double step = fd_step(r);
  return (h(r + step) - h(r - step)) / (2.0 * step);
}

}  // namespace

double golden_section_minimize(const RealFunction& h, Interval interval, double x_tol) {
  if (!(interval.lower < interval.upper)) throw LaplaceError("golden_section_minimize: empty interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = interval.lower;
  double b = interval.upper;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double hc = h(c);
  double hd = h(d);
  for (int iter = 0; iter < 500 && (b - a) > x_tol * (1.0 + std::abs(a) + std::abs(b)); ++iter) {
    if (hc < hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - inv_phi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + inv_phi * (b - a);
      hd = h(d);
    }
  }
  return 0.5 * (a + b);
}

LaplaceResult laplace_expand_detailed(const RealFunction& h, const RealFunction& g, Interval interval, double A,
                                      double zeta) {
  if (!(A > 0.0)) throw LaplaceError("laplace_expand: A must be > 0");
  double r = golden_section_minimize(h, interval);

  // Newton refinement; only steps that stay inside the bracket and do not
  // increase h are kept.
  for (int iter = 0; iter < 4; ++iter) {
    const double curvature = second_derivative(h, r);
    if (!(curvature > 0.0)) break;
    const double next = r - first_derivative(h, r) / curvature;
    if (!(next > interval.lower && next < interval.upper) || h(next) > h(r)) break;
    if (next == r) break;
    r = next;
  }

  const double width = interval.upper - interval.lower;
  const double margin = 1e-6 * width;
  if (r - interval.lower <= margin || interval.upper - r <= margin) {
    throw LaplaceError("laplace_expand: no interior minimum in [" + std::to_string(interval.lower) + ", " +
                       std::to_string(interval.upper) + "]");
  }
  const double curvature = second_derivative(h, r);
  if (!(curvature > 0.0)) throw LaplaceError("laplace_expand: non-positive curvature at the minimizer");

  const double log_modulus = -A * h(r) - A * zeta * zeta / (2.0 * curvature) +
                             0.5 * std::log(2.0 * std::numbers::pi / (A * curvature));
  const std::complex<double> value = std::polar(std::exp(log_modulus), A * zeta * r) * g(r);
  return {value, r, curvature};
}

}  // namespace psq
