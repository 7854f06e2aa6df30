#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polyctrl/types.hpp"

namespace polyctrl {

// Flat key/value run configuration. Every key has a default; file values are
// overridden by --set pairs in order. The canonical serialization (sorted
// key=value lines) and its hash are echoed into every output header so runs
// can be traced back to their exact settings.
class RunConfig {
public:
  RunConfig();  // defaults only

  static RunConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  void apply_overrides(const std::vector<std::string>& key_value_pairs);

  std::string get_str(const std::string& key) const;
  int get_int(const std::string& key) const;
  long get_long(const std::string& key) const;
  double get_double(const std::string& key) const;
  // Accepts "-inf" for the weight exponent.
  double get_alpha(const std::string& key) const;

  bool has_explicit(const std::string& key) const;  // set by file or override

  std::string canonical() const;
  std::string hash() const;  // FNV-1a of canonical(), hex

private:
  void check_known(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> defaults_;
};

std::uint64_t fnv1a(const std::string& data);

}  // namespace polyctrl
