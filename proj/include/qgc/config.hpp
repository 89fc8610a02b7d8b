#pragma once

// Minimal INI/TOML-style scenario configs: [section] headers, repeatable
// [[block]] headers, key = value lines, # comments, quoted strings, and
// arithmetic values ("cbrt(2)", "pi/2") evaluated to full precision where
// numbers are requested.

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qgc {

class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(std::string_view text, const std::string& origin = "<config>");

  bool has(const std::string& key) const;  // dotted: "section.key"

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_number(const std::string& key) const;
  double get_number(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_numbers(const std::string& key) const;  // comma-separated

  // The n-th [[name]] block contributes keys under "name.n."; this returns
  // the prefixes "name.1" .. "name.n" in declaration order.
  std::vector<std::string> block_prefixes(const std::string& name) const;

  // Keys of one section in declaration order ("section.key" -> "key").
  std::vector<std::string> section_keys(const std::string& section) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> entries_;
  std::vector<std::string> order_;         // full keys in declaration order
  std::map<std::string, int> blocks_;      // [[name]] occurrence counts
  std::string origin_;
};

}  // namespace qgc
