#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polar {

/// Bad model parameters or configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data cannot support the requested statistic (too few points, degenerate fit).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t count = 0)
      : std::runtime_error(what), count_(count) {}

  /// Number of usable observations that were available.
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

/// A numerical routine failed to reach its tolerance (or under/overflowed).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, double achieved_error = 0.0)
      : std::runtime_error(what), achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

}  // namespace polar
