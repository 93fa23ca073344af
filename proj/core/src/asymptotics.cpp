#include "polar_tails/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "polar_tails/errors.hpp"
#include "polar_tails/quadrature.hpp"
#include "polar_tails/special_functions.hpp"

namespace polar {

namespace {

constexpr double kQuadRel = 1e-13;

double gamma_normalizer(double delta) {
  return std::exp((delta + 0.5) * std::numbers::ln2 + std::lgamma(delta + 0.5));
}

}  // namespace

LimitLaw::LimitLaw()
    : psi_([](double) { return 1.0; }), delta_(0.0), normalizer_(std::sqrt(2.0 * std::numbers::pi)) {}

LimitLaw LimitLaw::gamma(double delta) {
  if (!(delta > -0.5) || !std::isfinite(delta)) throw ConfigError("limit law requires delta > -1/2");
  LimitLaw law;
  law.psi_ = [delta](double s) { return delta == 0.0 ? 1.0 : std::pow(2.0 * s, delta); };
  law.delta_ = delta;
  law.normalizer_ = gamma_normalizer(delta);
  return law;
}

LimitLaw LimitLaw::from_profile(std::function<double(double)> psi) {
  if (!psi) throw ConfigError("limit law needs a profile psi");
  LimitLaw law;
  law.psi_ = std::move(psi);
  law.delta_.reset();
  const auto& f = law.psi_;
  const quad::Estimate half = quad::exp_sinh(
      [&f](double s) { return std::exp(-0.5 * s * s) * f(0.5 * s * s); }, 0.0, {0.0, kQuadRel});
  law.normalizer_ = 2.0 * half.value;
  if (!(law.normalizer_ > 0.0) || !std::isfinite(law.normalizer_)) {
    throw ConfigError("limit profile psi is not integrable against exp(-s^2/2)");
  }
  return law;
}

double LimitLaw::psi(double s) const { return psi_(s); }
double LimitLaw::normalizer() const { return normalizer_; }

double LimitLaw::density(double z) const {
  if (std::isinf(z)) return 0.0;
  return std::exp(-0.5 * z * z) * psi_(0.5 * z * z) / normalizer_;
}

double LimitLaw::cdf(double z) const {
  if (std::isnan(z)) throw std::domain_error("limit_cdf: z is NaN");
  if (!delta_) return numeric_cdf(z);
  if (z == 0.0) return 0.5;
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * gamma_q(*delta_ + 0.5, 0.5 * z * z);
  return z < 0.0 ? tail : 1.0 - tail;
}

double LimitLaw::numeric_cdf(double z) const {
  if (std::isnan(z)) throw std::domain_error("limit_cdf: z is NaN");
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  auto f = [this](double s) { return std::exp(-0.5 * s * s) * psi_(0.5 * s * s); };
  const quad::Estimate tail = quad::exp_sinh(f, std::abs(z), {0.0, kQuadRel});
  if (!tail.converged && tail.error > 1e-11 * std::max(tail.value, 1e-300)) {
    throw NumericError("limit law quadrature did not converge", tail.error);
  }
  const double upper = tail.value / normalizer_;
  return z < 0.0 ? upper : 1.0 - upper;
}

LimitLaw limit_law_for(const AngularModel& angular) {
  switch (angular.family()) {
    case AngularFamily::Uniform:
      return LimitLaw::gamma(0.0);
    case AngularFamily::Dirichlet:
    case AngularFamily::Power:
      return LimitLaw::gamma(angular.local_profile().delta);
    case AngularFamily::Custom:
      break;
  }
  return LimitLaw::from_profile(angular.local_profile().psi);
}

ApproxContext make_context(const PolarModel& model, double u) {
  if (!(u > 0.0)) throw std::domain_error("approximation context requires u > 0");
  ApproxContext ctx;
  ctx.u = u;
  ctx.t = model.radial.t_of(u);
  ctx.h_at = model.angular.density(1.0 / std::sqrt(ctx.t));
  ctx.rho = model.rho;
  ctx.law = limit_law_for(model.angular);
  return ctx;
}

double thm1_survivor_approx(const ApproxContext& ctx, double radial_survivor_at_u) {
  return ctx.h_at * radial_survivor_at_u * ctx.law.normalizer() / std::sqrt(ctx.t);
}

double thm3_constant(double delta, Thm3Constant constant) {
  const double log_two_part = (delta + 0.5) * std::numbers::ln2;
  const double log_gamma = std::lgamma(delta + 0.5);
  return constant == Thm3Constant::Default ? std::exp(log_two_part + log_gamma)
                                           : std::exp(log_two_part - log_gamma);
}

double thm3_survivor_approx(const ApproxContext& ctx, double radial_survivor_at_u, Thm3Constant constant) {
  const auto delta = ctx.law.closed_form_delta();
  if (!delta) throw ConfigError("thm3 approximation needs a regularly varying (power-profile) angle");
  return thm3_constant(*delta, constant) * ctx.h_at * radial_survivor_at_u / std::sqrt(ctx.t);
}

double thm2_joint_limit(double x, double y, double rho, const LimitLaw& law) {
  if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("thm2 requires |rho| < 1");
  if (!(x > 0.0)) throw std::domain_error("thm2 requires x > 0");
  const double w_part = std::isinf(x) ? 1.0 : -std::expm1(-x);
  return law.cdf(y / std::sqrt((1.0 - rho) * (1.0 + rho))) * w_part;
}

double thm4_second_order(double z, double rho, double t, const LimitLaw& law) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("thm4 requires rho in [0, 1)");
  if (!(t > 0.0)) throw std::domain_error("thm4 requires t > 0");
  const double first = 1.0 - law.cdf(z);
  if (rho == 0.0) return first;
  const double correction = rho / std::sqrt((1.0 - rho) * (1.0 + rho)) * law.density(z) / std::sqrt(t);
  return std::clamp(first + correction, 0.0, 1.0);
}

double thm4_conditional_cdf(double z, double rho, double t, const LimitLaw& law) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("thm4 requires rho in [0, 1)");
  if (!(t > 0.0)) throw std::domain_error("thm4 requires t > 0");
  const double first = law.cdf(z);
  if (rho == 0.0) return first;
  const double correction = rho / std::sqrt((1.0 - rho) * (1.0 + rho)) * law.density(z) / std::sqrt(t);
  return std::clamp(first - correction, 0.0, 1.0);
}

double conditional_threshold(const ApproxContext& ctx, double z) {
  return ctx.rho * ctx.u + z * ctx.u * std::sqrt((1.0 - ctx.rho) * (1.0 + ctx.rho)) / std::sqrt(ctx.t);
}

double standardized_y(const ApproxContext& ctx, double y) {
  return (y - ctx.rho * ctx.u) * std::sqrt(ctx.t) / (ctx.u * std::sqrt((1.0 - ctx.rho) * (1.0 + ctx.rho)));
}

JointTailThresholds joint_tail_thresholds(const PolarModel& model, double u, double x, double y) {
  if (!(u > 0.0)) throw std::domain_error("joint tail requires u > 0");
  const double w = model.radial.scaling_w(u);
  return {u + x / w, model.rho * u + y * u / std::sqrt(u * w)};
}

double joint_tail_asym(double x, double y, double u, const PolarModel& model, const LimitLaw& law) {
  if (!(x >= 0.0)) throw std::domain_error("joint_tail_asym requires x >= 0");
  const double rho = model.rho;
  const double y_part = 1.0 - law.cdf(y / std::sqrt((1.0 - rho) * (1.0 + rho)));
  return std::exp(-x) * y_part * survivor_x(model, u);
}

JointTailRegime classify_joint_tail(double rho, double c) {
  if (c < rho) return JointTailRegime::Equivalent;
  if (c == rho) return JointTailRegime::DegenerateLimit;
  return JointTailRegime::Negligible;
}

EllipticalConstants elliptical_ext_constants(double rho, double c) {
  if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("elliptical constants require |rho| < 1");
  if (!(c > rho && c <= 1.0)) throw std::domain_error("elliptical constants require c in (rho, 1]");
  const double one_minus_rho2 = (1.0 - rho) * (1.0 + rho);
  EllipticalConstants k;
  k.alpha_naive = std::sqrt((1.0 - 2.0 * c * rho + rho * rho) / one_minus_rho2);
  k.alpha_corrected = std::sqrt((1.0 - 2.0 * c * rho + c * c) / one_minus_rho2);
  k.K = std::pow(one_minus_rho2, 1.5) / ((1.0 - c * rho) * (c - rho));
  return k;
}

double elliptical_joint_tail(const RadialModel& radial, double rho, double c, double u, double alpha) {
  if (!(u > 0.0) || !(alpha > 0.0)) throw std::domain_error("elliptical joint tail requires u, alpha > 0");
  const EllipticalConstants k = elliptical_ext_constants(rho, c);
  const double au = alpha * u;
  return alpha * k.K / (2.0 * std::numbers::pi) * radial.survivor(au) / (u * radial.scaling_w(au));
}

double lemma2_integral(Lemma2Case which, const Lemma2Params& p, const std::function<double(double)>& psi) {
  if (!(p.xi >= 0.0) || !(p.eta >= p.xi)) throw std::domain_error("lemma2 requires 0 <= xi <= eta");
  if (!(p.tau >= 0.0) || std::isinf(p.tau)) throw std::domain_error("lemma2 requires finite tau >= 0");
  if (p.eta == p.xi) return 0.0;
  auto f = [&](double x) {
    const double base = std::exp(-x) * psi(x);
    return which == Lemma2Case::A ? base : base / std::sqrt(2.0 * x + 2.0 * p.tau);
  };
  const quad::Estimate e = std::isinf(p.eta) ? quad::exp_sinh(f, p.xi, {0.0, kQuadRel})
                                             : quad::tanh_sinh(f, p.xi, p.eta, {0.0, kQuadRel});
  if (!e.converged && e.error > 1e-11 * std::abs(e.value)) {
    throw NumericError("lemma2 integral did not converge", e.error);
  }
  return e.value;
}

double lemma2_j_approx(Lemma2Case which, const Lemma2Params& p, const RadialModel& radial,
                       const std::function<double(double)>& psi) {
  if (!(p.u > 0.0)) throw std::domain_error("lemma2 requires u > 0");
  if (which == Lemma2Case::A && !(p.gamma > 1.0)) throw std::domain_error("lemma2 case A requires gamma > 1");
  if (which == Lemma2Case::B && !(p.gamma >= 1.0)) throw std::domain_error("lemma2 case B requires gamma >= 1");
  const double gu = p.gamma * p.u;
  const double t = p.u * radial.scaling_w(gu);
  const double integral = lemma2_integral(which, p, psi);
  if (which == Lemma2Case::A) {
    const double g = p.gamma;
    return p.r / (g * std::sqrt((g - 1.0) * (g + 1.0))) * radial.survivor(gu) / t * integral;
  }
  return p.r * radial.survivor(gu) / std::sqrt(t) * integral;
}

double sup_distance_diagnostic(const PolarModel& model, double u, const LimitLaw& law,
                               std::span<const double> y_grid) {
  const double rho = model.rho;
  const double scale = std::sqrt((1.0 - rho) * (1.0 + rho));
  std::vector<double> default_grid;
  if (y_grid.empty()) {
    constexpr int kPoints = 400;
    default_grid.reserve(kPoints);
    for (int i = 0; i < kPoints; ++i) default_grid.push_back(scale * (-6.0 + 12.0 * i / (kPoints - 1)));
    y_grid = default_grid;
  }
  const double sx = survivor_x(model, u);
  if (sx < 1e-300) throw NumericError("sup_distance_diagnostic: P(X > u) underflows", sx);
  const double root_t = std::sqrt(model.radial.t_of(u));
  double worst = 0.0;
  for (double y : y_grid) {
    const double exact = std::clamp(1.0 - joint_survivor(model, u, u * (rho + y / root_t)) / sx, 0.0, 1.0);
    worst = std::max(worst, std::abs(exact - law.cdf(y / scale)));
  }
  return worst;
}

}  // namespace polar
