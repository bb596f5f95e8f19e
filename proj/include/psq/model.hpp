// Two-class Processor-Sharing queue with one impatient class.
//
// State (n, m): n patient customers, m impatient customers. Patient arrivals
// at rate alpha, impatient arrivals at rate beta, PS service with unit
// capacity (patient rate mu, impatient rate nu) and impatience at rate theta
// per impatient customer.
#ifndef PSQ_MODEL_HPP
#define PSQ_MODEL_HPP

#include <array>
#include <cstddef>
#include <cstdint>

namespace psq {

struct ModelParams {
  double alpha = 0.0;  // patient arrival rate
  double beta = 0.0;   // impatient arrival rate
  double mu = 1.0;     // patient service rate
  double nu = 1.0;     // impatient service rate
  double theta = 1.0;  // impatience rate

  // Throws std::invalid_argument unless mu, theta > 0 and alpha, beta, nu >= 0
  // (all finite).
  void validate() const;

  // Copy with beta = A * theta.
  ModelParams with_scale(double A) const;
};

struct DerivedConstants {
  double A = 0.0;       // beta / theta
  double rho = 0.0;     // alpha / mu
  double x_star = 0.0;  // rho / (1 - rho); +inf when rho >= 1
  double y_star = 1.0;
  double c = 0.0;       // nu / theta

  bool stable() const { return rho < 1.0; }
};

DerivedConstants derive_constants(const ModelParams& params);

struct State {
  std::int64_t n = 0;
  std::int64_t m = 0;

  friend bool operator==(const State&, const State&) = default;
};

// Departure rates. The origin is handled explicitly (0/0 = 0).
inline double patient_departure_rate(const ModelParams& p, std::int64_t n, std::int64_t m) {
  if (n == 0) return 0.0;
  return p.mu * static_cast<double>(n) / static_cast<double>(n + m);
}

inline double impatient_departure_rate(const ModelParams& p, std::int64_t n, std::int64_t m) {
  if (m == 0) return 0.0;
  const double md = static_cast<double>(m);
  return p.nu * md / static_cast<double>(n + m) + p.theta * md;
}

struct Transition {
  State target;
  double rate = 0.0;
};

// At most four outgoing transitions; zero-rate ones are omitted.
class Transitions {
 public:
  void push(State target, double rate) {
    if (rate > 0.0) items_[size_++] = {target, rate};
  }
  std::size_t size() const { return size_; }
  const Transition* begin() const { return items_.data(); }
  const Transition* end() const { return items_.data() + size_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }
  double total_rate() const;

 private:
  std::array<Transition, 4> items_{};
  std::size_t size_ = 0;
};

// Throws std::invalid_argument for negative coordinates.
Transitions transition_rates(State s, const ModelParams& params);

}  // namespace psq

#endif  // PSQ_MODEL_HPP
