#pragma once

// Reproducible Monte Carlo for polar vectors and the empirical statistics built on it.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "polar_tails/polar_exact.hpp"

namespace polar {

struct XY {
  double x = 0.0;
  double y = 0.0;
};

struct SampleBatch {
  std::vector<XY> pairs;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string model_hash;  ///< 16 hex digits, see model_hash()
};

/// FNV-1a (64 bit) of the model descriptor, as 16 lowercase hex digits.
std::string model_hash(const PolarModel& model);

/// n draws of (X, Y). Element i depends only on (seed, stream, i), so the batch is identical for
/// any thread count. threads = 0 uses the hardware concurrency.
SampleBatch sample_polar(const PolarModel& model, std::size_t n, std::uint64_t seed,
                         std::uint64_t stream = 0, unsigned threads = 0);

/// n draws of the radius alone (stream-compatible with sample_polar's radius draws).
std::vector<double> sample_radius(const RadialModel& radial, std::size_t n, std::uint64_t seed,
                                  std::uint64_t stream = 0, unsigned threads = 0);

/// Fraction of X values strictly above u.
double empirical_survivor(std::span<const XY> pairs, double u);

/// Empirical P(Y <= y | X > u) on y_grid. Throws DataError with fewer than 50 exceedances.
std::vector<double> empirical_conditional_cdf(std::span<const XY> pairs, double u,
                                              std::span<const double> y_grid);

/// For X > u: y = (Y - rho u) sqrt(t) / (u sqrt(1 - rho^2)) and x = (X - u) w(u), t = u w(u).
struct RescaledExceedances {
  std::vector<double> x;
  std::vector<double> y;
};
RescaledExceedances rescaled_exceedance_stats(std::span<const XY> pairs, double u, double rho, double w_at_u);

/// sup |F_n - F| for the sample against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov p-value with the small-sample correction of Stephens (1970).
double ks_pvalue(double statistic, std::size_t n);

/// Writes the header `x,y` and one row per pair with 17 significant digits.
void write_xy_csv(std::ostream& out, std::span<const XY> pairs);
/// Reads `x,y` rows; lines starting with '#' and a non-numeric header line are skipped.
/// Throws DataError on malformed rows.
std::vector<XY> read_xy_csv(std::istream& in);

/// 17 significant digits with a '.' decimal point, independent of the locale.
std::string format_number(double value);

}  // namespace polar
