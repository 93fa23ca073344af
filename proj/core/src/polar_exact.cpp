#include "polar_tails/polar_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "polar_tails/errors.hpp"

namespace polar {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kTruncation = 1e-18;
constexpr double kAbsFactor = 1e-13;
constexpr double kRelTol = 1e-10;

// theta = arccos(1/t) for t >= 1, accurate near t = 1.
// arccos(1 / alpha_rho(x, y, rho)) without passing through alpha.
double ratio_angle(double x, double y, double rho) {
  return std::atan(std::abs(y / x - rho) / std::sqrt((1.0 - rho) * (1.0 + rho)));
}

double angle_of(double t) {
  if (std::isinf(t)) return kHalfPi;
  return std::atan(std::sqrt((t - 1.0) * (t + 1.0)));
}

// Smallest t with 1 - F(x t) <= kTruncation (1 - F(x a)); infinity when that is not
// representable.
double truncation_t(const RadialModel& radial, double x, double a) {
  const double ls = radial.log_survivor(x * a);
  if (!std::isfinite(ls)) return std::numeric_limits<double>::infinity();
  return std::max(a, radial.quantile_log(ls + std::log(kTruncation)) / x);
}

void require_converged(const quad::Estimate& e, const char* what) {
  if (!e.converged) {
    throw NumericError(std::string(what) + ": quadrature did not reach tolerance",
                       e.value != 0.0 ? e.error / std::abs(e.value) : e.error);
  }
}

}  // namespace

PolarModel::PolarModel(RadialModel radial_law, AngularModel angular_law, double pseudo_correlation)
    : radial(std::move(radial_law)), angular(std::move(angular_law)), rho(pseudo_correlation) {
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("pseudo-correlation rho must lie in (-1, 1)");
}

std::string PolarModel::descriptor() const {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "radial=" << radial.descriptor() << ";angular=" << angular.descriptor() << ";rho=" << rho;
  return os.str();
}

double alpha_rho(double x, double y, double rho) {
  if (!(x > 0.0)) throw std::domain_error("alpha_rho requires x > 0");
  if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("alpha_rho requires |rho| < 1");
  const double d = y / x - rho;
  return std::sqrt(1.0 + d * d / ((1.0 - rho) * (1.0 + rho)));
}

double alpha_star(double x, double y, double rho) {
  if (y == 0.0) throw std::domain_error("alpha_star requires y != 0");
  return alpha_rho(x, y, rho) * x / y;
}

quad::Estimate j_integral(const PolarModel& model, const JIntegralSpec& spec) {
  if (!(spec.a >= 1.0) || !(spec.b >= spec.a) || !(spec.x > 0.0)) {
    throw std::domain_error("j_integral requires 1 <= a <= b and x > 0");
  }
  if (spec.a == spec.b) return {0.0, 0.0, 0, true};

  const RadialModel& radial = model.radial;
  const double x = spec.x;
  const double s_scale = radial.survivor(x * spec.a);
  double b = spec.b;
  double cut_error = 0.0;
  const double t_cut = truncation_t(radial, x, spec.a);
  if (t_cut < b) {
    b = t_cut;
    cut_error = kTruncation * s_scale;
  }
  if (b <= spec.a) return {0.0, cut_error, 0, true};

  const double phi_lo = spec.a_angle ? *spec.a_angle : angle_of(spec.a);
  const double phi_hi = angle_of(b);
  const quad::Tolerance tol{kAbsFactor * s_scale, kRelTol};
  quad::Estimate result;
  if (spec.weight == JWeight::Tilde) {
    auto g = [&](double theta) { return radial.survivor(x / std::cos(theta)); };
    result = integrate_against_density(model.angular, g, phi_lo, phi_hi, tol);
  } else {
    // theta = pi/2 - beta - phi, so cos(phi) = sin(theta + beta).
    const double beta = std::asin(model.rho);
    auto g = [&](double theta) {
      const double s = std::sin(theta + beta);
      return s > 0.0 ? radial.survivor(x / s) : 0.0;
    };
    result = integrate_against_density(model.angular, g, kHalfPi - beta - phi_hi, kHalfPi - beta - phi_lo, tol);
  }
  result.error += cut_error;
  require_converged(result, "j_integral");
  return result;
}

quad::Estimate j_integral_weighted(const RadialModel& radial, const std::function<double(double)>& h,
                                   double a, double b, double x) {
  if (!(a >= 1.0) || !(b >= a) || !(x > 0.0)) {
    throw std::domain_error("j_integral_weighted requires 1 <= a <= b and x > 0");
  }
  if (a == b) return {0.0, 0.0, 0, true};
  const double s_scale = radial.survivor(x * a);
  double cut_error = 0.0;
  const double t_cut = truncation_t(radial, x, a);
  if (t_cut < b) {
    b = t_cut;
    cut_error = kTruncation * s_scale;
  }
  if (b <= a) return {0.0, cut_error, 0, true};
  auto g = [&](double theta) {
    const double t = 1.0 / std::cos(theta);
    return radial.survivor(x * t) * h(t);
  };
  quad::Estimate result = quad::gauss_kronrod(g, angle_of(a), angle_of(b), {kAbsFactor * s_scale, kRelTol});
  result.error += cut_error;
  require_converged(result, "j_integral_weighted");
  return result;
}

double survivor_x(const PolarModel& model, double x) {
  if (!(x > 0.0)) throw std::domain_error("survivor_x requires x > 0");
  const double inf = std::numeric_limits<double>::infinity();
  const double v = 2.0 * j_integral(model, {1.0, inf, x, JWeight::Tilde}).value;
  return std::clamp(v, 0.0, 1.0);
}

double joint_survivor_ratio_above(const PolarModel& model, double x, double y) {
  if (!(x > 0.0 && y > 0.0) || !(y / x > model.rho)) {
    throw std::domain_error("ratio-above decomposition requires x, y > 0 and y/x > rho");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double a = alpha_rho(x, y, model.rho);
  const double a_star = alpha_star(x, y, model.rho);
  return j_integral(model, {a, inf, x, JWeight::Tilde, ratio_angle(x, y, model.rho)}).value +
         j_integral(model, {a_star, inf, y, JWeight::BarRho}).value;
}

double joint_survivor_ratio_below(const PolarModel& model, double x, double y) {
  if (!(x > 0.0 && y > 0.0) || !(y / x < model.rho)) {
    throw std::domain_error("ratio-below decomposition requires x, y > 0 and y/x < rho");
  }
  const double inf = std::numeric_limits<double>::infinity();
  const double a = alpha_rho(x, y, model.rho);
  const double a_star = alpha_star(x, y, model.rho);
  return 2.0 * j_integral(model, {1.0, inf, x, JWeight::Tilde}).value -
         j_integral(model, {a, inf, x, JWeight::Tilde, ratio_angle(x, y, model.rho)}).value +
         j_integral(model, {a_star, inf, y, JWeight::BarRho}).value;
}

double joint_survivor_general(const PolarModel& model, double x, double y) {
  if (!(x > 0.0)) throw std::domain_error("joint_survivor requires x > 0");
  if (std::isnan(y)) throw std::domain_error("joint_survivor: y is NaN");
  if (y == -std::numeric_limits<double>::infinity()) return survivor_x(model, x);
  if (y == std::numeric_limits<double>::infinity()) return 0.0;

  const RadialModel& radial = model.radial;
  const double rho = model.rho;
  const double beta = std::asin(rho);
  const double cos_beta = std::sqrt((1.0 - rho) * (1.0 + rho));
  // Smallest radius on the integration region sets the absolute scale.
  const double a_min = (y > 0.0 && y / x > rho) ? alpha_rho(x, y, rho) : 1.0;
  const double s_scale = radial.survivor(x * a_min);
  const double theta_max = angle_of(truncation_t(radial, x, a_min));

  auto g = [&](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta + beta);
    double lower = x / c;
    double upper = std::numeric_limits<double>::infinity();
    if (y > 0.0) {
      if (s <= 0.0) return 0.0;
      lower = std::max(lower, y / s);
    } else if (y == 0.0) {
      if (s <= 0.0) return 0.0;
    } else if (s < 0.0) {
      upper = y / s;
    }
    if (!(lower < upper)) return 0.0;
    const double log_lo = radial.log_survivor(lower);
    if (std::isinf(upper)) return std::exp(log_lo);
    const double log_hi = radial.log_survivor(upper);
    return -std::exp(log_lo) * std::expm1(log_hi - log_lo);
  };

  const double theta_star = std::atan((y / x - rho) / cos_beta);
  const std::array<double, 3> breaks{theta_star, -beta, kHalfPi - beta};
  quad::Estimate e = integrate_against_density(model.angular, g, -theta_max, theta_max,
                                               {kAbsFactor * s_scale, kRelTol}, breaks);
  if (theta_max < kHalfPi) e.error += 2.0 * kTruncation * s_scale;
  require_converged(e, "joint_survivor");
  return std::clamp(e.value, 0.0, 1.0);
}

double joint_survivor(const PolarModel& model, double x, double y) {
  if (!(x > 0.0)) throw std::domain_error("joint_survivor requires x > 0");
  if (y > 0.0 && y <= x) {
    const double ratio = y / x;
    if (ratio > model.rho) return std::clamp(joint_survivor_ratio_above(model, x, y), 0.0, 1.0);
    if (ratio < model.rho) return std::clamp(joint_survivor_ratio_below(model, x, y), 0.0, 1.0);
  }
  return joint_survivor_general(model, x, y);
}

double conditional_cdf(const PolarModel& model, double u, double y) {
  if (!(u > 0.0)) throw std::domain_error("conditional_cdf requires u > 0");
  const double sx = survivor_x(model, u);
  if (sx < 1e-300) throw NumericError("conditional_cdf: P(X > u) underflows", sx);
  if (y == -std::numeric_limits<double>::infinity()) return 0.0;
  if (y == std::numeric_limits<double>::infinity()) return 1.0;
  return std::clamp(1.0 - joint_survivor(model, u, y) / sx, 0.0, 1.0);
}

}  // namespace polar
