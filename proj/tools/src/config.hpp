#pragma once

// Flat `key = value` experiment configuration with `#` comments.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polar_tails/polar_exact.hpp"

namespace polar::cli {

class Config {
 public:
  /// Throws ConfigError on syntax errors, duplicate keys and unknown keys.
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const;
  /// Comma-separated values or `linspace(lo, hi, n)`; must be non-empty and strictly increasing.
  std::vector<double> grid(const std::string& key) const;
  /// Relative paths resolve against the directory of the config file.
  std::filesystem::path path(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

 private:
  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
};

/// Model from radial.*, angular.* and rho (defaults: chi2 radius, uniform angle, rho = 0).
PolarModel build_model(const Config& config);

}  // namespace polar::cli
