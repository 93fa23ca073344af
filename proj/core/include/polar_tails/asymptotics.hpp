#pragma once

// Limit laws and tail approximations for polar vectors with a Gumbel-type radius.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "polar_tails/angular.hpp"
#include "polar_tails/polar_exact.hpp"
#include "polar_tails/radial.hpp"

namespace polar {

/// Symmetric law with density proportional to exp(-z^2/2) psi(z^2/2).
/// For psi(s) = (2s)^delta, Z^2 ~ Gamma(delta + 1/2, rate 1/2) and the CDF is
/// (1 + sign(z) P(delta + 1/2, z^2/2)) / 2.
class LimitLaw {
 public:
  /// Standard normal (psi = 1).
  LimitLaw();
  /// Closed Gamma form, delta > -1/2.
  static LimitLaw gamma(double delta);
  /// General profile; CDF and normaliser by quadrature.
  static LimitLaw from_profile(std::function<double(double)> psi);

  double cdf(double z) const;
  double density(double z) const;
  /// Integral over the real line of exp(-s^2/2) psi(s^2/2).
  double normalizer() const;
  double psi(double s) const;
  /// Quadrature of the defining ratio of integrals, regardless of closed form.
  double numeric_cdf(double z) const;
  std::optional<double> closed_form_delta() const { return delta_; }

 private:
  std::function<double(double)> psi_;
  std::optional<double> delta_;
  double normalizer_ = 1.0;
};

/// The limit law implied by an angular model (closed form for the built-in families).
LimitLaw limit_law_for(const AngularModel& angular);

struct ApproxContext {
  double u = 0.0;
  double t = 0.0;     ///< u w(u)
  double h_at = 0.0;  ///< h(1/sqrt(t))
  double rho = 0.0;
  LimitLaw law;
};

ApproxContext make_context(const PolarModel& model, double u);

/// t^{-1/2} h(1/sqrt t) (1 - F(u)) times the normaliser of the limit law.
double thm1_survivor_approx(const ApproxContext& ctx, double radial_survivor_at_u);

enum class Thm3Constant {
  Default,  ///< 2^{delta+1/2} Gamma(delta+1/2), equal to the power-law normaliser
  Strict,   ///< 2^{delta+1/2} / Gamma(delta+1/2)
};

/// c t^{-1/2} h(1/sqrt t) (1 - F(u)) for a regularly varying angle of index 2 delta.
double thm3_survivor_approx(const ApproxContext& ctx, double radial_survivor_at_u,
                            Thm3Constant constant = Thm3Constant::Default);
double thm3_constant(double delta, Thm3Constant constant);

/// P(Z <= y / sqrt(1 - rho^2)) (1 - e^{-x}).
double thm2_joint_limit(double x, double y, double rho, const LimitLaw& law);

/// 1 - Psi(z) + t^{-1/2} rho (1 - rho^2)^{-1/2} Psi'(z), clipped to [0, 1]; rho in [0, 1).
double thm4_second_order(double z, double rho, double t, const LimitLaw& law);

/// Psi(z) - t^{-1/2} rho (1 - rho^2)^{-1/2} Psi'(z), clipped: the matching approximation of
/// P(Y <= threshold | X > u). Equals Psi(z) exactly at rho = 0.
double thm4_conditional_cdf(double z, double rho, double t, const LimitLaw& law);

/// Threshold rho u + z u sqrt(1 - rho^2) / sqrt(t) on Y, and the inverse map.
double conditional_threshold(const ApproxContext& ctx, double z);
double standardized_y(const ApproxContext& ctx, double y);

/// Thresholds (u + x / w(u), rho u + y u / sqrt(t)) for the joint tail point (x, y).
struct JointTailThresholds {
  double x = 0.0;
  double y = 0.0;
};
JointTailThresholds joint_tail_thresholds(const PolarModel& model, double u, double x, double y);

/// e^{-x} (1 - Psi(y / sqrt(1 - rho^2))) P(X > u): approximates
/// P(X > u + x/w(u), Y > rho u + y u / sqrt(t)).
double joint_tail_asym(double x, double y, double u, const PolarModel& model, const LimitLaw& law);

enum class JointTailRegime { Equivalent, DegenerateLimit, Negligible };
/// Behaviour of P(X > u, Y > c u) relative to P(X > u).
JointTailRegime classify_joint_tail(double rho, double c);

struct EllipticalConstants {
  double alpha_naive = 0.0;      ///< sqrt((1 - 2 c rho + rho^2) / (1 - rho^2)); rho^2 where c^2 belongs
  double alpha_corrected = 0.0;  ///< sqrt((1 - 2 c rho + c^2) / (1 - rho^2))
  double K = 0.0;                ///< (1 - rho^2)^{3/2} / ((1 - c rho)(c - rho))
};
EllipticalConstants elliptical_ext_constants(double rho, double c);

/// alpha K / (2 pi) (1 - F(alpha u)) / (u w(alpha u)): asymptotic P(X > u, Y > c u) for an
/// elliptical vector with radial law F, evaluated with the given alpha.
double elliptical_joint_tail(const RadialModel& radial, double rho, double c, double u, double alpha);

enum class Lemma2Case { A, B };

struct Lemma2Params {
  double gamma = 1.0;  ///< gamma_n
  double u = 1.0;      ///< u_n
  double xi = 0.0;
  double eta = std::numeric_limits<double>::infinity();
  double tau = 0.0;
  double r = 1.0;  ///< r(gamma_n, t_n)
};

/// Asymptotic value of J(a_n, b_n, u_n, h) with t = u w(gamma u):
///   case A (gamma > 1): r / (gamma sqrt(gamma^2-1)) (1 - F(gamma u)) / t * int_xi^eta e^{-x} psi(x) dx
///   case B:             r (1 - F(gamma u)) / sqrt(t) * int_xi^eta e^{-x} psi(x) / sqrt(2x + 2 tau) dx
double lemma2_j_approx(Lemma2Case which, const Lemma2Params& params, const RadialModel& radial,
                       const std::function<double(double)>& psi);

/// The integral factor of lemma2_j_approx alone.
double lemma2_integral(Lemma2Case which, const Lemma2Params& params,
                       const std::function<double(double)>& psi);

/// sup over y of |P(Y <= u (rho + y / sqrt t) | X > u) - Psi(y / sqrt(1 - rho^2))|. The default
/// grid puts 400 points uniformly on y / sqrt(1 - rho^2) in [-6, 6].
double sup_distance_diagnostic(const PolarModel& model, double u, const LimitLaw& law,
                               std::span<const double> y_grid = {});

}  // namespace polar
