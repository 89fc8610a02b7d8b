#include "qgc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qgc/core.hpp"
#include "qgc/expression.hpp"

namespace qgc {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// strips a trailing comment that is not inside double quotes
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void fail(const std::string& origin, int line_no, const std::string& why) {
  std::ostringstream os;
  os << origin << ":" << line_no << ": " << why;
  throw ConfigError(os.str());
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(std::string_view text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.size() >= 2 && line[0] == '[' && line[1] == '[') {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]")
        fail(origin, line_no, "unterminated block header");
      const std::string name = trim(std::string_view(line).substr(2, line.size() - 4));
      if (name.empty()) fail(origin, line_no, "empty block name");
      section = name + "." + std::to_string(++cfg.blocks_[name]);
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) fail(origin, line_no, "empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "empty key");
    if (section.empty()) fail(origin, line_no, "key '" + key + "' appears outside any section");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    const std::string full = section + "." + key;
    if (cfg.entries_.count(full)) fail(origin, line_no, "duplicate key '" + full + "'");
    cfg.entries_[full] = value;
    cfg.order_.push_back(full);
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_number(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    return eval_constant(raw);
  } catch (const Error& e) {
    throw ConfigError(origin_ + ": key '" + key + "': " + e.what());
  }
}

double Config::get_number(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  const double v = get_number(key);
  const double r = std::round(v);
  if (std::fabs(v - r) > 1e-9 || std::fabs(r) > 2e9)
    throw ConfigError(origin_ + ": key '" + key + "' is not an integer");
  return static_cast<int>(r);
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(origin_ + ": key '" + key + "' is not a boolean");
}

std::vector<double> Config::get_numbers(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t comma = raw.find(',', start);
    if (comma == std::string::npos) comma = raw.size();
    const std::string piece = trim(std::string_view(raw).substr(start, comma - start));
    if (!piece.empty()) {
      try {
        out.push_back(eval_constant(piece));
      } catch (const Error& e) {
        throw ConfigError(origin_ + ": key '" + key + "': " + e.what());
      }
    }
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError(origin_ + ": key '" + key + "' holds no numbers");
  return out;
}

std::vector<std::string> Config::block_prefixes(const std::string& name) const {
  std::vector<std::string> out;
  const auto it = blocks_.find(name);
  if (it == blocks_.end()) return out;
  for (int i = 1; i <= it->second; ++i) out.push_back(name + "." + std::to_string(i));
  return out;
}

std::vector<std::string> Config::section_keys(const std::string& section) const {
  std::vector<std::string> out;
  const std::string prefix = section + ".";
  for (const std::string& full : order_)
    if (full.size() > prefix.size() && full.compare(0, prefix.size(), prefix) == 0 &&
        full.find('.', prefix.size()) == std::string::npos)
      out.push_back(full.substr(prefix.size()));
  return out;
}

}  // namespace qgc
