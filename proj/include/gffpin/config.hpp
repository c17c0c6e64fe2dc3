#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gffpin {

// Flat key = value configuration. A [section] header prefixes the keys that
// follow it with "section."; lines starting with # are comments.
class Config {
 public:
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::int64_t value);
  void set(const std::string& key, int value) { set(key, static_cast<std::int64_t>(value)); }
  void set_u64(const std::string& key, std::uint64_t value);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  // Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key) const;

  // Values of `other` override ours; unknown keys are rejected when strict.
  void merge(const Config& other, bool strict);
  // Apply "key=value".
  void apply_assignment(std::string_view assignment, bool strict);

  const std::map<std::string, std::string>& values() const { return values_; }
  bool operator==(const Config& o) const { return values_ == o.values_; }

 private:
  std::map<std::string, std::string> values_;
};

Config parse_config(std::string_view text);
std::string render_config(const Config& c);
Config load_config_file(const std::filesystem::path& path);

std::string format_list(const std::vector<double>& v);

}  // namespace gffpin
