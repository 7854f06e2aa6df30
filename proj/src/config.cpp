#include "polyctrl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace polyctrl {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig::RunConfig() {
  defaults_ = {
      {"problem", "vanderpol"},
      {"problem.na", "20"},
      {"problem.d", "2"},
      {"problem.n_colloc", "18"},
      {"problem.beta", ""},   // empty: use the problem's own default
      {"problem.T", ""},
      {"integrator", ""},     // empty: per-problem default
      {"dt", ""},
      {"N", "100"},
      {"skip", "0"},
      {"nd", "40"},
      {"ol.tol", "1e-5"},
      {"ol.max_iters", "2000"},
      {"ol.memory", "10"},
      {"ol.armijo_c", "1e-4"},
      {"ol.eta_shrink", "0.5"},
      {"ol.eta_min", "1e-12"},
      {"ol.bb_min", "1e-8"},
      {"ol.bb_max", "1e8"},
      {"basis.kind", "legendre"},
      {"basis.index", "hc"},
      {"basis.s", "4"},
      {"basis.cap", "10000000"},
      {"weights.alpha", "1"},
      {"fit.variant", "apl1"},
      {"fit.lambda", "0.01"},
      {"fit.rho", "1.0"},
      {"fit.tol", "1e-5"},
      {"fit.max_iter", "10000"},
      {"cg.tol", "1e-8"},
      {"cg.max_iter", "5000"},
      {"exec", "omp"},
      {"threads", "0"},
  };
}

RunConfig RunConfig::from_file(const std::string& path) {
  RunConfig cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key = value");
    }
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::check_known(const std::string& key) const {
  if (defaults_.find(key) == defaults_.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  check_known(key);
  values_[key] = value;
}

void RunConfig::apply_overrides(const std::vector<std::string>& pairs) {
  for (const auto& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + pair + "' is not key=value");
    }
    set(trim(pair.substr(0, eq)), trim(pair.substr(eq + 1)));
  }
}

std::string RunConfig::get_str(const std::string& key) const {
  check_known(key);
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  return defaults_.at(key);
}

bool RunConfig::has_explicit(const std::string& key) const {
  return values_.find(key) != values_.end();
}

int RunConfig::get_int(const std::string& key) const {
  const std::string v = get_str(key);
  try {
    std::size_t pos = 0;
    int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
  }
}

long RunConfig::get_long(const std::string& key) const {
  const std::string v = get_str(key);
  try {
    std::size_t pos = 0;
    long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
  }
}

double RunConfig::get_double(const std::string& key) const {
  const std::string v = get_str(key);
  try {
    std::size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

double RunConfig::get_alpha(const std::string& key) const {
  const std::string v = get_str(key);
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  return get_double(key);
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [key, def] : defaults_) {
    auto it = values_.find(key);
    out << key << " = " << (it != values_.end() ? it->second : def) << "\n";
  }
  return out.str();
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string RunConfig::hash() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

}  // namespace polyctrl
