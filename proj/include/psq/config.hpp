// Flat configuration files.
//
// Two accepted syntaxes, detected from the first non-blank character:
//
//   # key = value lines ('#' starts a comment, ':' also accepted)
//   alpha = 1.0
//   beta  = 50
//
//   { "alpha": 1.0, "beta": 50 }     (JSON object of scalars)
//
// Documented keys: alpha, beta, mu, nu, theta, beta_ex, A, rho, tol, seed,
// t_end, burn_in, replications, n_max, m_max. Values are kept as strings so
// that integer keys like seed round-trip exactly.
#ifndef PSQ_CONFIG_HPP
#define PSQ_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "psq/model.hpp"

namespace psq {

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<std::string> get_string(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Missing keys keep the values in `defaults`. `A` (when present) overrides
// beta with A * theta; `rho` overrides alpha with rho * mu.
ModelParams params_from_config(const Config& config, ModelParams defaults = {});

}  // namespace psq

#endif  // PSQ_CONFIG_HPP
