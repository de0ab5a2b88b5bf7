#include "binpick/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace binpick {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(uint8_t(s[a]))) ++a;
  while (b > a && std::isspace(uint8_t(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// strips an unquoted trailing comment
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

TomlDoc::Value parse_scalar(const std::string& raw, size_t lineno) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("empty value at line " + std::to_string(lineno));
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"')
      throw ConfigError("unterminated string at line " + std::to_string(lineno));
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  try {
    size_t used = 0;
    if (v.find_first_of(".eE") == std::string::npos ||
        (v.size() > 1 && (v[0] == '0' && (v[1] == 'x' || v[1] == 'b')))) {
      const int64_t i = std::stoll(v, &used, 0);
      if (used == v.size()) return i;
    }
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse value '" + v + "' at line " + std::to_string(lineno));
}

TomlDoc::Value parse_array(const std::string& raw, size_t lineno) {
  const std::string inner = trim(raw.substr(1, raw.size() - 2));
  std::vector<double> nums;
  std::vector<std::string> strs;
  bool is_str = false;
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto val = parse_scalar(item, lineno);
    if (std::holds_alternative<std::string>(val)) {
      is_str = true;
      strs.push_back(std::get<std::string>(val));
    } else if (std::holds_alternative<double>(val)) {
      nums.push_back(std::get<double>(val));
    } else if (std::holds_alternative<int64_t>(val)) {
      nums.push_back(double(std::get<int64_t>(val)));
    } else {
      throw ConfigError("unsupported array element at line " + std::to_string(lineno));
    }
  }
  if (is_str) return strs;
  return nums;
}

}  // namespace

TomlDoc TomlDoc::parse(const std::string& text) {
  TomlDoc doc;
  std::istringstream in(text);
  std::string line, section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("bad section header at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
    const std::string full = section.empty() ? key : section + "." + key;
    if (!raw.empty() && raw.front() == '[') {
      if (raw.back() != ']') throw ConfigError("unterminated array at line " + std::to_string(lineno));
      doc.values_[full] = parse_array(raw, lineno);
    } else {
      doc.values_[full] = parse_scalar(raw, lineno);
    }
  }
  return doc;
}

TomlDoc TomlDoc::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool TomlDoc::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const bool* b = std::get_if<bool>(&it->second)) return *b;
  throw ConfigError("config key '" + key + "' is not a boolean");
}

int64_t TomlDoc::get_int(const std::string& key, int64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const int64_t* i = std::get_if<int64_t>(&it->second)) return *i;
  if (const double* d = std::get_if<double>(&it->second)) return int64_t(*d);
  throw ConfigError("config key '" + key + "' is not an integer");
}

double TomlDoc::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  if (const int64_t* i = std::get_if<int64_t>(&it->second)) return double(*i);
  throw ConfigError("config key '" + key + "' is not a number");
}

std::string TomlDoc::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("config key '" + key + "' is not a string");
}

std::vector<double> TomlDoc::get_doubles(const std::string& key,
                                         std::vector<double> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  throw ConfigError("config key '" + key + "' is not a number array");
}

}  // namespace binpick
