#pragma once

// Radial law F of the polar vector: survivor 1-F, scaling function w of the Gumbel
// max-domain of attraction, quantiles for inverse-transform sampling, and the
// optional second-order bound |S(u+x/w(u))/S(u) - e^{-x}| <= A(u) B(x).

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>

namespace polar {

enum class RadialFamily { Kotz, Chi2df, Custom };

/// Kotz Type III tail K u^N exp(-r u^kappa). The survivor is 1 below the threshold u0
/// and K u^N exp(-r u^kappa) above it (see RadialModel::kotz for the completion rule).
struct KotzRadialParams {
  double K = 1.0;
  double N = 0.0;
  double r = 1.0;
  double kappa = 1.0;
};

/// Second-order pair (A, B), asserted for u >= valid_from and x >= 0.
struct RadialSecondOrder {
  std::function<double(double)> A;
  std::function<double(double)> B;
  double valid_from = 0.0;
};

class RadialModel {
 public:
  /// Kotz family with survivor min(1, K u^N e^{-r u^kappa}) continued as 1 below the
  /// largest crossing u0 of the level 1. If the tail function never reaches 1 on its
  /// decreasing branch, the survivor ramps linearly from 1 at u = 0 down to the tail at
  /// u0 = max(u_peak, r^{-1/kappa}), which keeps F(0) = 0 and F continuous.
  static RadialModel kotz(const KotzRadialParams& params);

  /// R^2 chi-squared with 2 degrees of freedom: survivor exp(-u^2/2), w(u) = u.
  static RadialModel chi2df();

  /// User-supplied law. `survivor` must be nonincreasing with survivor(0) = 1;
  /// quantiles are obtained by bisection on it.
  static RadialModel custom(std::function<double(double)> survivor,
                            std::function<double(double)> scaling_w,
                            std::optional<RadialSecondOrder> second_order = std::nullopt,
                            std::string label = "custom");

  double survivor(double u) const;
  /// log(1 - F(u)); finite far beyond the underflow point of survivor().
  double log_survivor(double u) const;
  /// Scaling function w(u); throws std::domain_error for u <= 0.
  double scaling_w(double u) const;
  /// t(u) = u w(u).
  double t_of(double u) const { return u * scaling_w(u); }
  /// Radius whose survivor equals p, p in (0, 1). Relative accuracy 1e-12.
  double quantile(double p) const;
  /// Radius whose log-survivor equals log_p < 0; usable when p underflows.
  double quantile_log(double log_p) const;

  /// (1 - F(u + x/w(u))) / (1 - F(u)).
  double mda_ratio_diagnostic(double u, double x) const;

  const std::optional<RadialSecondOrder>& second_order() const;
  RadialFamily family() const;
  /// Parameters for Kotz/Chi2df models (Chi2df reports K=1, N=0, r=1/2, kappa=2).
  std::optional<KotzRadialParams> kotz_params() const;
  /// Threshold where the tail formula takes over (0 for custom laws).
  double u0() const;
  /// Canonical text of the parameters, used for run manifests and hashing.
  std::string descriptor() const;

  class Law;

 private:
  explicit RadialModel(std::shared_ptr<const Law> law) : law_(std::move(law)) {}
  std::shared_ptr<const Law> law_;
};

/// Largest violation max(0, |ratio - e^{-x}| - A(u) B(x)) over the grid; 0 means the
/// asserted second-order bound holds everywhere on it. Grid points below valid_from are skipped.
double second_order_violation(const RadialModel& model, std::span<const double> u_grid,
                              std::span<const double> x_grid);

}  // namespace polar
