#include "psq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace psq {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config config;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    const auto json = nlohmann::json::parse(body);
    if (!json.is_object()) throw std::invalid_argument("config JSON must be an object");
    for (const auto& [key, value] : json.items()) {
      if (value.is_string()) {
        config.values_[key] = value.get<std::string>();
      } else if (value.is_number() || value.is_boolean()) {
        config.values_[key] = value.dump();
      } else {
        throw std::invalid_argument("config key '" + key + "' must be a scalar");
      }
    }
    return config;
  }

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find('=');
    if (sep == std::string::npos) sep = line.find(':');
    if (sep == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, sep));
    const std::string value = trim(line.substr(sep + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    config.values_[key] = value;
  }
  return config;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::optional<double> Config::get_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "' is not a number: " + it->second);
  }
}

std::optional<std::int64_t> Config::get_int(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  std::int64_t v = 0;
  const auto& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("config key '" + key + "' is not an integer: " + s);
  }
  return v;
}

std::optional<std::string> Config::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

ModelParams params_from_config(const Config& config, ModelParams defaults) {
  ModelParams p = defaults;
  if (auto v = config.get_double("alpha")) p.alpha = *v;
  if (auto v = config.get_double("beta")) p.beta = *v;
  if (auto v = config.get_double("mu")) p.mu = *v;
  if (auto v = config.get_double("nu")) p.nu = *v;
  if (auto v = config.get_double("theta")) p.theta = *v;
  if (auto v = config.get_double("rho")) p.alpha = *v * p.mu;
  if (auto v = config.get_double("A")) p.beta = *v * p.theta;
  p.validate();
  return p;
}

}  // namespace psq
