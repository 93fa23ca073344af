#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "polar_tails/errors.hpp"

namespace polar::cli {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "radial.family", "radial.K",   "radial.N",      "radial.r",    "radial.kappa",
      "angular.family", "angular.a", "angular.b",     "angular.eps", "angular.delta",
      "rho",           "u_grid",     "y_grid",        "z_grid",      "n",
      "seed",          "stream",     "k",             "tail_fraction", "delta",
      "input",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("'" + key + "' expects a number, got '" + raw + "'");
  }
  return out;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (cfg.values_.contains(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Config cfg = parse(in, path.string());
  cfg.base_dir_ = path.parent_path();
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.contains(key); }

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return to_double(key, it->second);
}

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::uint64_t Config::count(const std::string& key, std::uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string v = trim(it->second);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + it->second + "'");
  }
  return out;
}

std::vector<double> Config::grid(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required grid '" + key + "'");
  const std::string v = trim(it->second);
  std::vector<double> out;
  if (v.rfind("linspace(", 0) == 0 && v.back() == ')') {
    const std::string inner = v.substr(9, v.size() - 10);
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = inner.find(',', start)) != std::string::npos; start = pos + 1) {
      parts.push_back(inner.substr(start, pos - start));
    }
    parts.push_back(inner.substr(start));
    if (parts.size() != 3) throw ConfigError("'" + key + "': linspace takes (lo, hi, n)");
    const double lo = to_double(key, parts[0]);
    const double hi = to_double(key, parts[1]);
    const double n = to_double(key, parts[2]);
    if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError("'" + key + "': linspace count must be a positive integer");
    const auto count = static_cast<int>(n);
    for (int i = 0; i < count; ++i) out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  } else if (!v.empty()) {
    std::size_t start = 0;
    while (true) {
      const auto pos = v.find(',', start);
      out.push_back(to_double(key, v.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  if (out.empty()) throw ConfigError("grid '" + key + "' is empty");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] > out[i - 1])) throw ConfigError("grid '" + key + "' must be strictly increasing");
  }
  return out;
}

std::filesystem::path Config::path(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  std::filesystem::path p(it->second);
  if (p.is_relative() && !base_dir_.empty()) p = base_dir_ / p;
  return p;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_keys().contains(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

PolarModel build_model(const Config& config) {
  const std::string radial_family = config.text("radial.family", "chi2");
  RadialModel radial = RadialModel::chi2df();
  if (radial_family == "kotz") {
    radial = RadialModel::kotz({config.number("radial.K", 1.0), config.number("radial.N", 0.0),
                                config.number("radial.r", 1.0), config.number("radial.kappa", 1.0)});
  } else if (radial_family != "chi2" && radial_family != "chi2df") {
    throw ConfigError("radial.family must be kotz or chi2, got '" + radial_family + "'");
  }

  const std::string angular_family = config.text("angular.family", "uniform");
  const double eps = config.number("angular.eps", std::numbers::pi);
  AngularModel angular = AngularModel::uniform();
  if (angular_family == "dirichlet") {
    angular = AngularModel::dirichlet({config.number("angular.a"), config.number("angular.b"), eps});
  } else if (angular_family == "custom") {
    angular = AngularModel::power(config.number("angular.delta"), eps);
  } else if (angular_family != "uniform") {
    throw ConfigError("angular.family must be uniform, dirichlet or custom, got '" + angular_family + "'");
  }
  return PolarModel(std::move(radial), std::move(angular), config.number("rho", 0.0));
}

}  // namespace polar::cli
