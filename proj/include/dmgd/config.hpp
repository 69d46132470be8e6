#pragma once

#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dmgd {

// Flat key=value configuration text: one pair per line, '#' starts a
// comment, blank lines ignored. Unknown keys are rejected by the consumer.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig cfg;
    cfg.raw_text_ = text;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      line = line.substr(first, last - first + 1);
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": expected key=value, got '" + line + "'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": empty key");
      if (cfg.values_.count(key))
        throw std::runtime_error("config: duplicate key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  const std::string& raw_text() const { return raw_text_; }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end())
      throw std::runtime_error("config: missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& dflt) {
    return has(key) ? get_string(key) : dflt;
  }

  long long get_int(const std::string& key) {
    return parse_int(key, get_string(key));
  }
  long long get_int(const std::string& key, long long dflt) {
    return has(key) ? get_int(key) : dflt;
  }

  double get_real(const std::string& key) {
    return parse_real(key, get_string(key));
  }
  double get_real(const std::string& key, double dflt) {
    return has(key) ? get_real(key) : dflt;
  }

  // Call after all keys are read; any leftover key is an error.
  void reject_unknown() const {
    for (const auto& [key, value] : values_)
      if (!consumed_.count(key))
        throw std::runtime_error("config: unknown key '" + key + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

  long long parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long long out = 0;
    try {
      out = std::stoll(v, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != v.size())
      throw std::runtime_error("config: key '" + key +
                               "' expects an integer, got '" + v + "'");
    return out;
  }

  double parse_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0;
    try {
      out = std::stod(v, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != v.size())
      throw std::runtime_error("config: key '" + key +
                               "' expects a number, got '" + v + "'");
    return out;
  }

  std::string raw_text_;
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

}  // namespace dmgd
