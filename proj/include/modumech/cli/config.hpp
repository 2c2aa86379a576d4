#pragma once

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "modumech/common.hpp"

namespace modumech::cli {

// Sectioned key-value config text:
//   [experiment-name]
//   key = value
// Full-line comments start with '#' or ';'. Parsing is strict: malformed
// lines and duplicate keys are errors, unknown keys are rejected later
// against the experiment schema.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;
};

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace detail

inline ConfigFile parse_config_text(const std::string& text) {
  ConfigFile cf;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw config_error("config line " + std::to_string(lineno) + ": unterminated section");
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw config_error("config line " + std::to_string(lineno) + ": empty section name");
      cf.sections[section];  // sections may legitimately be empty
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    if (key.empty())
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    auto& sec = cf.sections[section];
    if (sec.count(key))
      throw config_error("config line " + std::to_string(lineno) + ": duplicate key '" +
                         section + "." + key + "'");
    sec[key] = value;
  }
  return cf;
}

inline ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// Typed access to a resolved parameter map, reporting full field paths.
struct ParamReader {
  std::string section;
  const std::map<std::string, std::string>* params;

  const std::string& raw(const std::string& key) const {
    auto it = params->find(key);
    if (it == params->end())
      throw config_error("missing required key '" + section + "." + key + "'");
    return it->second;
  }

  double get_double(const std::string& key) const {
    const std::string& s = raw(key);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw config_error("'" + section + "." + key + "': not a number: '" + s + "'");
    return v;
  }

  long long get_int(const std::string& key) const {
    const std::string& s = raw(key);
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
      throw config_error("'" + section + "." + key + "': not an integer: '" + s + "'");
    return v;
  }

  bool get_bool(const std::string& key) const {
    const std::string& s = raw(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw config_error("'" + section + "." + key + "': not a boolean: '" + s + "'");
  }

  std::string get_string(const std::string& key) const { return raw(key); }

  std::vector<double> get_double_list(const std::string& key) const {
    const std::string& s = raw(key);
    std::vector<double> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
      const std::string t = detail::trim(item);
      if (t.empty()) continue;
      char* end = nullptr;
      const double v = std::strtod(t.c_str(), &end);
      if (end == t.c_str() || *end != '\0')
        throw config_error("'" + section + "." + key + "': bad list entry '" + t + "'");
      out.push_back(v);
    }
    return out;
  }

  double positive(const std::string& key) const {
    const double v = get_double(key);
    if (!(v > 0))
      throw config_error("'" + section + "." + key + "': must be positive, got " + raw(key));
    return v;
  }

  double nonnegative(const std::string& key) const {
    const double v = get_double(key);
    if (v < 0)
      throw config_error("'" + section + "." + key + "': must be >= 0, got " + raw(key));
    return v;
  }

  long long positive_int(const std::string& key) const {
    const long long v = get_int(key);
    if (v <= 0)
      throw config_error("'" + section + "." + key + "': must be a positive integer");
    return v;
  }
};

}  // namespace modumech::cli
