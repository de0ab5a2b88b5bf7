#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace binpick {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat TOML-subset document: [section] headers, key = value pairs with
/// strings, booleans, numbers, and homogeneous arrays. Keys are exposed in
/// dotted form ("section.key").
class TomlDoc {
 public:
  using Value = std::variant<bool, int64_t, double, std::string, std::vector<double>,
                             std::vector<std::string>>;

  static TomlDoc parse(const std::string& text);
  static TomlDoc parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  bool get_bool(const std::string& key, bool fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

}  // namespace binpick
