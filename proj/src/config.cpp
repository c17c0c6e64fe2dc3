#include "gffpin/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gffpin/common.hpp"
#include "gffpin/io.hpp"

namespace gffpin {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
      return false;
  return k.front() != '.' && k.back() != '.';
}

void check_value(const std::string& v) {
  if (v.find('\n') != std::string::npos || v.find('#') != std::string::npos)
    throw ConfigError("config value may not contain '#' or a newline: " + v);
}

double parse_number(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("config key " + key + ": not a number: " + v);
  return x;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ConfigError("invalid config key: " + key);
  const std::string v = trim(value);
  check_value(v);
  values_[key] = v;
}

void Config::set(const std::string& key, double value) { set(key, format_double(value)); }

void Config::set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }

void Config::set_u64(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

double Config::get_double(const std::string& key) const { return parse_number(key, get(key)); }

std::int64_t Config::get_int(const std::string& key) const {
  const std::string& v = get(key);
  std::int64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("config key " + key + ": not an integer: " + v);
  return x;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ConfigError("config key " + key + ": not an unsigned integer: " + v);
  return x;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key " + key + ": not a boolean: " + v);
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
  return out;
}

void Config::merge(const Config& other, bool strict) {
  for (const auto& [k, v] : other.values_) {
    if (strict && !has(k)) throw ConfigError("unknown config key: " + k);
    values_[k] = v;
  }
}

void Config::apply_assignment(std::string_view assignment, bool strict) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value: " + std::string(assignment));
  const std::string key = trim(assignment.substr(0, eq));
  if (strict && !has(key)) throw ConfigError("unknown config key: " + key);
  set(key, std::string(assignment.substr(eq + 1)));
}

Config parse_config(std::string_view text) {
  Config c;
  std::string section;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!section.empty() && !valid_key(section))
        throw ConfigError("line " + std::to_string(lineno) + ": bad section name");
      continue;
    }
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = trim(std::string_view(line).substr(0, hash));
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    c.set(section.empty() ? key : section + "." + key, line.substr(eq + 1));
  }
  return c;
}

std::string render_config(const Config& c) {
  // Keys without a dot first, then one [section] block per prefix.
  std::ostringstream os;
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [k, v] : c.values()) {
    const auto dot = k.find('.');
    if (dot == std::string::npos)
      os << k << " = " << v << '\n';
    else
      sections[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
  }
  for (const auto& [s, kv] : sections) {
    os << "\n[" << s << "]\n";
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  }
  return os.str();
}

Config load_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string format_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

}  // namespace gffpin
