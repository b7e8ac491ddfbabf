#ifndef STARK_CONFIG_HPP
#define STARK_CONFIG_HPP

// Flat key-value configuration files.
//
//   # comment (also allowed after a value)
//   key = value
//   key = [1, 2, 3]      list; the brackets are optional
//
// Keys are lowercase identifiers, each may appear once. Values are kept as
// text until a typed accessor reads them, so unknown or malformed entries are
// reported with their line number.

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stark {

inline constexpr const char* kVersion = "0.1.0";

/// Invalid configuration or arguments (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File-system failure (CLI exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical check did not meet its threshold (CLI exit code 4).
struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool valid_key(const std::string& k) {
  if (k.empty() || !(std::islower(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) ||
           c == '_';
  });
}

} // namespace detail

inline double parse_double(const std::string& field, const std::string& text) {
  const std::string s = detail::trim(text);
  if (s.empty()) throw ConfigError(field + ": empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(field + ": '" + s + "' is not a finite number");
  return v;
}

inline int parse_int(const std::string& field, const std::string& text) {
  const std::string s = detail::trim(text);
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || v < -2147483647L ||
      v > 2147483647L)
    throw ConfigError(field + ": '" + s + "' is not an integer");
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& field, const std::string& text) {
  std::string s = detail::trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(field + ": '" + text + "' is not a boolean");
}

inline std::vector<double> parse_double_list(const std::string& field, const std::string& text) {
  std::string s = detail::trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError(field + ": unterminated list");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(field, item));
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

class KeyValues {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValues parse(std::istream& in, const std::string& source = "<config>") {
    KeyValues kv;
    kv.source_ = source;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      const auto hash = raw.find('#');
      const std::string body = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
      const std::string key = detail::trim(body.substr(0, eq));
      const std::string value = detail::trim(body.substr(eq + 1));
      if (!detail::valid_key(key))
        throw ConfigError(source + ":" + std::to_string(line) + ": invalid key '" + key + "'");
      if (value.empty())
        throw ConfigError(source + ":" + std::to_string(line) + ": missing value for '" + key + "'");
      if (!kv.entries_.emplace(key, Entry{value, line}).second)
        throw ConfigError(source + ":" + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    return kv;
  }

  static KeyValues load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse(in, path);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  /// Name used in error messages, e.g. "run.cfg:4 (gt_step)".
  std::string where(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? key : source_ + ":" + std::to_string(it->second.line) + " (" + key + ")";
  }
  const std::string& value(const std::string& key) const { return entries_.at(key).value; }

  void reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [k, e] : entries_)
      if (!allowed.count(k))
        throw ConfigError(source_ + ":" + std::to_string(e.line) + ": unknown key '" + k + "'");
  }

  void read(const std::string& key, double& out) const {
    if (has(key)) out = parse_double(where(key), value(key));
  }
  void read(const std::string& key, int& out) const {
    if (has(key)) out = parse_int(where(key), value(key));
  }
  void read(const std::string& key, bool& out) const {
    if (has(key)) out = parse_bool(where(key), value(key));
  }
  void read(const std::string& key, std::vector<double>& out) const {
    if (has(key)) out = parse_double_list(where(key), value(key));
  }
  void read(const std::string& key, std::string& out) const {
    if (has(key)) out = value(key);
  }

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
};

} // namespace stark

#endif
