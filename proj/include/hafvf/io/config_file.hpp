#pragma once

// Flat key=value configuration with dotted keys, e.g. `w.prior.alpha=9`.
// Lines starting with '#' are comments; later assignments win; command-line
// overrides reuse the same `key=value` syntax.

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "hafvf/errors.hpp"

namespace hafvf {

class ConfigMap {
 public:
  ConfigMap() = default;

  static ConfigMap from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
  }

  static ConfigMap from_string(const std::string& text, const std::string& origin = "<string>") {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#') continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw config_error(origin + ":" + std::to_string(lineno) +
                           ": expected key=value, got '" + trimmed + "'");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      if (key.empty()) {
        throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
      }
      cfg.values_[key] = trim(trimmed.substr(eq + 1));
    }
    return cfg;
  }

  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw config_error("override must be key=value, got '" + assignment + "'");
    }
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto v = get(key);
    return v ? *v : fallback;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    return parse_double(*v, key);
  }

  int get_int(const std::string& key, int fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) {
      throw config_error("config key '" + key + "': expected an integer, got '" + *v + "'");
    }
    return out;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "1" || *v == "true" || *v == "yes") return true;
    if (*v == "0" || *v == "false" || *v == "no") return false;
    throw config_error("config key '" + key + "': expected a boolean, got '" + *v + "'");
  }

  // Comma-separated list of reals.
  std::vector<double> get_double_list(const std::string& key) const {
    const auto v = get(key);
    if (!v) return {};
    std::vector<double> out;
    std::string item;
    std::istringstream ss(*v);
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), key));
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static double parse_double(const std::string& text, const std::string& key) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw config_error("config key '" + key + "': expected a real number, got '" + text + "'");
    }
    return out;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace hafvf
