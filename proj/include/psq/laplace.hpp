// Laplace method for integrals with a large parameter.
//
//   int_a^b exp(-A h(r) + i A zeta r) g(r) dr
//     ~ exp(-A h(r*) + i A zeta r*) exp(-A zeta^2 / (2 h''(r*)))
//       sqrt(2 pi / (A h''(r*))) g(r*)
//
// r* is located by golden-section search on [a, b] followed by a few
// safeguarded Newton steps on finite-difference derivatives; h''(r*) is a
// central difference with step max(1e-5, 1e-5 |r*|).
#ifndef PSQ_LAPLACE_HPP
#define PSQ_LAPLACE_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace psq {

class LaplaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lower;
  double upper;
};

struct LaplaceResult {
  std::complex<double> value;
  double minimizer = 0.0;
  double curvature = 0.0;
};

using RealFunction = std::function<double(double)>;

// Throws LaplaceError when the minimum sits on the interval boundary or the
// curvature there is not positive.
LaplaceResult laplace_expand_detailed(const RealFunction& h, const RealFunction& g, Interval interval, double A,
                                      double zeta = 0.0);

inline std::complex<double> laplace_expand(const RealFunction& h, const RealFunction& g, Interval interval,
                                           double A, double zeta = 0.0) {
  return laplace_expand_detailed(h, g, interval, A, zeta).value;
}

// Golden-section search for the minimizer of a unimodal h on [a, b].
double golden_section_minimize(const RealFunction& h, Interval interval, double x_tol = 1e-12);

}  // namespace psq

#endif  // PSQ_LAPLACE_HPP
