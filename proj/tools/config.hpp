#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace csas::app {

/// Bad config file, unknown key or malformed value (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `section.key` settings with a fixed schema. Every key has a default;
/// files and overrides may only set known keys.
class RunConfig {
 public:
  RunConfig();

  /// INI file with [section] headers. Later loads override earlier ones.
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  int integer(const std::string& key) const;
  std::uint64_t seed(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// Comma-separated list; empty string gives an empty list.
  std::vector<std::string> list(const std::string& key) const;
  std::vector<double> num_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  /// Resolves short command-line aliases such as `method` -> `deconv.method`.
  static std::string resolve_alias(const std::string& key);

 private:
  std::map<std::string, std::string> values_;
};

double parse_number(const std::string& text, const std::string& key);

}  // namespace csas::app
