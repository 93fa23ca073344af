#pragma once

// Estimators for the conditional tail law from an i.i.d. sample of (X, Y).

#include <cstddef>
#include <span>
#include <string>

#include "polar_tails/radial.hpp"
#include "polar_tails/sampling.hpp"

namespace polar {

/// `clipped` reports whether the estimate hit |rho| = 1 - 1e-9.
struct RhoEstimate {
  double rho = 0.0;
  std::size_t k = 0;
  bool clipped = false;
};
/// Midpoint of the 25% and 75% quantiles of Y/X over the k largest X; requires 50 <= k <= n/10.
/// Clipped to |rho| <= 1 - 1e-9.
RhoEstimate estimate_rho(std::span<const XY> pairs, std::size_t k);

/// Fit of -log S(u) = c u^gamma, so that w(u) = c gamma u^{gamma - 1}.
struct WParams {
  double c = 1.0;
  double gamma = 1.0;
  std::size_t points = 0;
  double residual_rms = 0.0;
  double w(double u) const;
};

/// Least squares of log(-log S_hat) on log u over the top tail_fraction of the sample, with
/// S_hat(x_(i)) = i/(n+1) for the i-th largest value. tail_fraction in (0, 0.2], at least 200
/// tail points.
WParams estimate_w_params(std::span<const double> x_sample, double tail_fraction);
/// The same regression on exact (u, S(u)) pairs.
WParams estimate_w_params(std::span<const double> u, std::span<const double> survivor);

struct DeltaEstimate {
  double delta = 0.0;
  std::string source;  ///< "angles", "provided" or "tail_ratio"
  std::size_t k = 0;
};

/// Power-law (Hill-type) fit of P(|Theta| <= s) ~ C s^{2 delta + 1} on the smallest 5% of |Theta|.
/// Needs at least 100 such angles.
DeltaEstimate estimate_delta(std::span<const double> theta);
/// Configured value, marked as provided.
DeltaEstimate estimate_delta_provided(double delta);
/// From P_hat(X > u) / (1 - F(u)) ~ C t^{-(delta + 1/2)} at two thresholds u1 < u2 with F known.
DeltaEstimate estimate_delta_tail_ratio(std::span<const XY> pairs, const RadialModel& radial, double u1, double u2);

/// Angles recovered from (x, y) given rho: atan2((y - rho x)/sqrt(1 - rho^2), x).
std::vector<double> reconstruct_angles(std::span<const XY> pairs, double rho);

struct EstimatorReport {
  double rho_hat = 0.0;
  double c_hat = 1.0;
  double gamma_hat = 1.0;
  double delta_hat = 0.0;
  std::string delta_source = "provided";
  std::size_t n = 0;
  std::size_t k_used = 0;
  std::size_t w_points = 0;
  double w_residual_rms = 0.0;
  bool rho_clipped = false;

  double w(double u) const;
  /// `key=value` lines.
  std::string serialize() const;
  static EstimatorReport parse(const std::string& text);
};

enum class PsiHatVariant { Centered = 1, Shifted = 2 };

/// Gamma limit CDF of (y - m) / sqrt((1 - rho^2) x / w(x)) with m = rho x (variant 1) or
/// m = rho (x + 1/w(x)) (variant 2), all parameters taken from the report.
double psi_hat(const EstimatorReport& report, double x, double y, PsiHatVariant variant);
/// x w(x) > 10, below which the estimator is unreliable.
bool psi_hat_reliable(const EstimatorReport& report, double x);

}  // namespace polar
