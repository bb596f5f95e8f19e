// Closed-form heavy-traffic asymptotics for the two-class PS queue.
//
// Scale A = beta/theta; scaled coordinates x = n/A, y = m/A. Every density
// is assembled in log-space; the `log_*` variants are exposed for callers
// working far in the tails.
#ifndef PSQ_ASYMPTOTICS_HPP
#define PSQ_ASYMPTOTICS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "psq/model.hpp"

namespace psq {

namespace detail {

template <typename Scalar>
void require_load(Scalar rho) {
  if (!(rho > Scalar(0) && rho < Scalar(1))) throw std::invalid_argument("rho must lie in (0, 1)");
}

template <typename Scalar>
void require_positive(Scalar x, Scalar y) {
  if (!(x > Scalar(0) && y > Scalar(0))) {
    throw std::invalid_argument("point must lie in the open quadrant x > 0, y > 0");
  }
}

template <typename Scalar>
Scalar load_of(const ModelParams& p) {
  const Scalar rho = Scalar(p.alpha) / Scalar(p.mu);
  require_load(rho);
  return rho;
}

}  // namespace detail

// Phi(x) = x log(x/rho) - (x+1) log(x+1) - log(1-rho), written as
// x log(x / (rho (x+1))) - log((1-rho)(x+1)) so that Phi(x*) = 0 cancels
// cleanly.
template <typename Scalar>
Scalar phi(Scalar x, Scalar rho) {
  detail::require_load(rho);
  if (x < Scalar(0)) throw std::invalid_argument("phi: x must be >= 0");
  using std::log;
  using std::log1p;
  if (x == Scalar(0)) return -log1p(-rho);
  return x * log(x / (rho * (x + Scalar(1)))) - log1p(-rho) - log1p(x);
}

// Psi(y) = y log y - y + 1.
template <typename Scalar>
Scalar psi(Scalar y) {
  if (y < Scalar(0)) throw std::invalid_argument("psi: y must be >= 0");
  using std::log;
  if (y == Scalar(0)) return Scalar(1);
  return y * log(y) - y + Scalar(1);
}

template <typename Scalar>
Scalar decay_H(Scalar x, Scalar y, Scalar rho) {
  return phi(x, rho) + psi(y);
}

template <typename Scalar>
Scalar log_prefactor_g(Scalar x, Scalar y, const ModelParams& p) {
  detail::require_positive(x, y);
  using std::log;
  const Scalar rho = detail::load_of<Scalar>(p);
  const Scalar x_star = rho / (Scalar(1) - rho);
  const Scalar c = Scalar(p.nu) / Scalar(p.theta);
  const Scalar drift = Scalar(p.mu) / Scalar(p.theta) * (Scalar(1) - rho) * (x - x_star) / (x + Scalar(1));
  const Scalar log_ratio = log((x + Scalar(1)) / (x + y));
  return log(Scalar(1) - rho) + Scalar(0.5) * log((x + Scalar(1)) / (x * y)) + (c + drift) * log_ratio;
}

// g(x,y) = (1-rho) sqrt((x+1)/(xy)) ((x+1)/(x+y))^{nu/theta}
//          * exp[(mu/theta)(1-rho) (x-x*)/(x+1) log((x+1)/(x+y))].
template <typename Scalar>
Scalar prefactor_g(Scalar x, Scalar y, const ModelParams& p) {
  using std::exp;
  return exp(log_prefactor_g(x, y, p));
}

template <typename Scalar>
Scalar log_sharp_density(Scalar x, Scalar y, Scalar A, const ModelParams& p) {
  using std::log;
  const Scalar rho = detail::load_of<Scalar>(p);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  return log_prefactor_g(x, y, p) - log(two_pi * A) - A * decay_H(x, y, rho);
}

// Pi_A(Ax, Ay) ~ g(x,y) / (2 pi A) exp(-A H(x,y)).
template <typename Scalar>
Scalar sharp_density(Scalar x, Scalar y, Scalar A, const ModelParams& p) {
  using std::exp;
  return exp(log_sharp_density(x, y, A, p));
}

enum class Marginal { N, M };

template <typename Scalar>
Scalar log_marginal_asymptotics(Marginal kind, Scalar coordinate, Scalar A, const ModelParams& p) {
  if (!(coordinate > Scalar(0))) throw std::invalid_argument("marginal_asymptotics: coordinate must be > 0");
  using std::log;
  const Scalar rho = detail::load_of<Scalar>(p);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  if (kind == Marginal::N) {
    const Scalar x = coordinate;
    return log(Scalar(1) - rho) - Scalar(0.5) * log(two_pi * A) + Scalar(0.5) * log((x + Scalar(1)) / x) -
           A * phi(x, rho);
  }
  const Scalar y = coordinate;
  const Scalar c = Scalar(p.nu) / Scalar(p.theta);
  const Scalar x_star = rho / (Scalar(1) - rho);
  return -A * psi(y) - Scalar(0.5) * log(two_pi * A * y) - c * log(Scalar(1) - rho) - c * log(x_star + y);
}

// P(N = Ax) ~ (1-rho)/sqrt(2 pi A) sqrt((x+1)/x) e^{-A Phi(x)};
// P(M = Ay) ~ e^{-A Psi(y)} / (sqrt(2 pi A y) (1-rho)^c (x*+y)^c).
template <typename Scalar>
Scalar marginal_asymptotics(Marginal kind, Scalar coordinate, Scalar A, const ModelParams& p) {
  using std::exp;
  return exp(log_marginal_asymptotics(kind, coordinate, A, p));
}

// Decay rate of the PS queue with Ay permanent customers:
// K(x,y) = x log(x/rho) + y log y - (x+y) log(x+y) - y log(1-rho),
// evaluated as x log(x/(rho(x+y))) + y log(y/((1-rho)(x+y))).
template <typename Scalar>
Scalar decay_K(Scalar x, Scalar y, Scalar rho) {
  detail::require_load(rho);
  if (x < Scalar(0) || !(y > Scalar(0))) throw std::invalid_argument("decay_K: need x >= 0 and y > 0");
  using std::log;
  using std::log1p;
  if (x == Scalar(0)) return -y * log1p(-rho);
  // With y = 1 this is the exact expression used by phi().
  return x * log(x / (rho * (x + y))) + y * (log(y) - log1p(-rho) - log(x + y));
}

template <typename Scalar>
Scalar log_sharp_permanent(Scalar x, Scalar y, Scalar A, Scalar rho) {
  detail::require_load(rho);
  detail::require_positive(x, y);
  using std::log;
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  return log(Scalar(1) - rho) - Scalar(0.5) * log(two_pi * A) + Scalar(0.5) * log((x + y) / (x * y)) -
         A * decay_K(x, y, rho);
}

// E_{Ay}(Ax) ~ (1-rho)/sqrt(2 pi A) sqrt((x+y)/(xy)) exp(-A K(x,y)).
template <typename Scalar>
Scalar sharp_permanent(Scalar x, Scalar y, Scalar A, Scalar rho) {
  using std::exp;
  return exp(log_sharp_permanent(x, y, A, rho));
}

template <typename Scalar>
struct GaussianLimit {
  Scalar var_xi;
  Scalar var_eta;
  Scalar cov;
  Scalar center_x;
  Scalar center_y;
};

// Limit law of sqrt(A) (N/A - x*, M/A - 1).
template <typename Scalar = double>
GaussianLimit<Scalar> gaussian_limit(const ModelParams& p) {
  const Scalar rho = Scalar(p.alpha) / Scalar(p.mu);
  if (!(rho >= Scalar(0) && rho < Scalar(1))) throw std::invalid_argument("gaussian_limit: need rho < 1");
  const Scalar one_minus = Scalar(1) - rho;
  return {rho / (one_minus * one_minus), Scalar(1), Scalar(0), rho / one_minus, Scalar(1)};
}

// F_A(u,v) ~ ((1-rho)/(1-rho r))^A e^{A(s-1)}
//            * exp[i A (rho r zeta/(1-rho r) + s eta)]
//            * exp[-A/2 (rho r zeta^2/(1-rho r)^2 + s eta^2)] * G0(u,v),
// with u = r e^{i zeta}, v = s e^{i eta} and
// G0 = (1-rho)/(1-rho r) [s + rho r (1-s)]^{(alpha/theta)(1-r) - c}.
// Valid for 0 < r < 1/rho, s > 0 and both arguments off the non-positive
// real axis; anything else throws std::domain_error.
template <typename Scalar>
std::complex<Scalar> gen_fun_asymptotic(std::complex<Scalar> u, std::complex<Scalar> v, Scalar A,
                                        const ModelParams& p) {
  using std::abs;
  using std::arg;
  using std::log;
  const Scalar rho = detail::load_of<Scalar>(p);
  const Scalar r = abs(u);
  const Scalar s = abs(v);
  const Scalar zeta = arg(u);
  const Scalar eta = arg(v);
  const Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(r > Scalar(0)) || !(r * rho < Scalar(1))) throw std::domain_error("gen_fun_asymptotic: need 0 < |u| < 1/rho");
  if (!(s > Scalar(0))) throw std::domain_error("gen_fun_asymptotic: v must be non-zero");
  if (zeta == pi || zeta == -pi || eta == pi || eta == -pi) {
    throw std::domain_error("gen_fun_asymptotic: argument on the negative real cut");
  }
  const Scalar base = s + rho * r * (Scalar(1) - s);
  if (!(base > Scalar(0))) throw std::domain_error("gen_fun_asymptotic: G0 base is non-positive");

  const Scalar one_minus_rr = Scalar(1) - rho * r;
  const Scalar c = Scalar(p.nu) / Scalar(p.theta);
  const Scalar exponent = Scalar(p.alpha) / Scalar(p.theta) * (Scalar(1) - r) - c;
  const Scalar log_ratio = log((Scalar(1) - rho) / one_minus_rr);
  const Scalar log_g0 = log_ratio + exponent * log(base);
  const Scalar gauss =
      -A / Scalar(2) * (rho * r * zeta * zeta / (one_minus_rr * one_minus_rr) + s * eta * eta);
  const Scalar log_modulus = A * log_ratio + A * (s - Scalar(1)) + gauss + log_g0;
  const Scalar phase = A * (rho * r * zeta / one_minus_rr + s * eta);
  return std::polar(std::exp(log_modulus), phase);
}

}  // namespace psq

#endif  // PSQ_ASYMPTOTICS_HPP
