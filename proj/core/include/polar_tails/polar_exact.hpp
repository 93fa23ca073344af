#pragma once

// Exact tail probabilities of the polar vector
//   X = R cos(Theta),  Y = rho R cos(Theta) + sqrt(1 - rho^2) R sin(Theta)
// by one-dimensional quadrature over the angle.

#include <functional>
#include <optional>
#include <string>

#include "polar_tails/angular.hpp"
#include "polar_tails/quadrature.hpp"
#include "polar_tails/radial.hpp"

namespace polar {

struct PolarModel {
  PolarModel(RadialModel radial_law, AngularModel angular_law, double pseudo_correlation);

  RadialModel radial;
  AngularModel angular;
  double rho;

  /// Canonical parameter text; the basis of the model hash.
  std::string descriptor() const;
};

/// sqrt(1 + (y/x - rho)^2 / (1 - rho^2)); requires x > 0.
double alpha_rho(double x, double y, double rho);
/// alpha_rho(x, y) x / y; requires x > 0 and y != 0.
double alpha_star(double x, double y, double rho);

enum class JWeight {
  Tilde,   ///< h(arccos(1/t))
  BarRho,  ///< h(arcsin(1/t) - arcsin(rho))
};

/// J(a, b, x) = integral over t in [a, b] of (1 - F(x t)) w(t) / (t sqrt(t^2 - 1)); b may be +inf.
struct JIntegralSpec {
  double a = 1.0;
  double b = 1.0;
  double x = 1.0;
  JWeight weight = JWeight::Tilde;
  /// arccos(1/a) when the caller knows it more accurately than a itself (a rounds to 1 for
  /// angles below ~1e-8).
  std::optional<double> a_angle;
};

/// Evaluated after t = 1/cos(theta), which turns dt / (t sqrt(t^2-1)) into d theta. Infinite
/// ranges are cut where 1 - F(x t) < 1e-18 (1 - F(x)); the cut mass is added to the error.
/// Throws NumericError when the requested accuracy is not reached.
quad::Estimate j_integral(const PolarModel& model, const JIntegralSpec& spec);

/// J-integral with an arbitrary weight function h(t) in place of the angular weights:
/// integral over [a, b] of (1 - F(x t)) h(t) / (t sqrt(t^2 - 1)) dt, same method and tolerances.
quad::Estimate j_integral_weighted(const RadialModel& radial, const std::function<double(double)>& h,
                                   double a, double b, double x);

/// P(X > x) = 2 J(1, inf, x, tilde).
double survivor_x(const PolarModel& model, double x);

/// P(X > x, Y > y). Uses the J-integral decompositions for 0 < y <= x with y/x != rho and
/// the direct angular representation elsewhere.
double joint_survivor(const PolarModel& model, double x, double y);

/// J(alpha, inf, x, tilde) + J(alpha*, inf, y, bar); valid for y > 0, y/x > rho.
double joint_survivor_ratio_above(const PolarModel& model, double x, double y);
/// 2 J(1, inf, x, tilde) - J(alpha, inf, x, tilde) + J(alpha*, inf, y, bar); valid for 0 < y/x < rho.
double joint_survivor_ratio_below(const PolarModel& model, double x, double y);
/// Integral over theta of [(1-F)(L(theta)) - (1-F)(U(theta))]^+ h(theta); valid for every x > 0, y.
double joint_survivor_general(const PolarModel& model, double x, double y);

/// P(Y <= y | X > u). Throws NumericError when P(X > u) < 1e-300.
double conditional_cdf(const PolarModel& model, double u, double y);

}  // namespace polar
