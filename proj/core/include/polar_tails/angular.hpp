#pragma once

// Angular law of the polar vector: a symmetric density h on (-pi, pi) whose behaviour at 0
// (regular variation with index 2 delta, limit profile psi) drives every conditional limit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polar_tails/quadrature.hpp"

namespace polar {

enum class AngularFamily { Uniform, Dirichlet, Power, Custom };

/// h(theta) = c_ab |sin theta|^{2a-1} |cos theta|^{2b-1} on (-eps, eps), zero outside.
struct DirichletAngularParams {
  double a = 0.5;
  double b = 0.5;
  double eps = 3.141592653589793;
};

/// psi(z) <= K max(z^lambda1, z^lambda2).
struct PsiGrowth {
  double K = 1.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

/// Local structure at 0: h regularly varying with index 2 delta and
/// h(sqrt(2z/t)) / h(1/sqrt t) -> psi(z).
struct LocalProfile {
  double delta = 0.0;
  std::function<double(double)> psi;
  PsiGrowth growth;
};

/// Point where h is singular or non-smooth: near theta_s, h behaves like |theta - theta_s|^exponent
/// (exponent 0 for a jump or kink).
struct SpecialPoint {
  double theta = 0.0;
  double exponent = 0.0;
};

/// Second-order pair (a, b): |h(sqrt(2z/t))/h(1/sqrt t) - psi(z)| <= a(t) b(z) where valid(t, z).
struct AngularSecondOrder {
  std::function<double(double)> a;
  std::function<double(double)> b;
  std::function<bool(double, double)> valid;
};

/// Power-law local profile psi(s) = (2s)^delta with its growth constants.
LocalProfile power_profile(double delta);

class AngularModel {
 public:
  static AngularModel uniform();
  /// For eps = pi the constant is Gamma(a+b)/(2 Gamma(a) Gamma(b)); otherwise it is
  /// obtained by quadrature.
  static AngularModel dirichlet(const DirichletAngularParams& params);
  /// h(theta) = c |theta|^{2 delta} on (-eps, eps).
  static AngularModel power(double delta, double eps);
  /// Arbitrary symmetric density (normalised here by quadrature).
  static AngularModel custom(std::function<double(double)> density, LocalProfile profile,
                             std::vector<SpecialPoint> special_points = {},
                             std::optional<AngularSecondOrder> second_order = std::nullopt,
                             std::string label = "custom");

  /// Density at theta in (-pi, pi); throws std::domain_error outside.
  double density(double theta) const;
  /// Density at anchor + offset. Where the family has a reflection symmetry about the anchor
  /// (pi and pi/2 for Dirichlet) the value is computed from the offset itself, which keeps it
  /// accurate when anchor + offset is not representable. Zero outside (-pi, pi).
  double density_near(double anchor, double offset) const;
  double cdf(double theta) const;
  /// Inverse of the tabulated CDF, p in (0, 1).
  double inverse_cdf(double p) const;
  /// n i.i.d. angles from stream `stream` of `seed`.
  std::vector<double> sample(std::uint64_t seed, std::uint64_t stream, std::size_t n) const;

  const LocalProfile& local_profile() const;
  /// Special points inside [-pi, pi], sorted; always contains -pi and pi.
  std::span<const SpecialPoint> special_points() const;
  const std::optional<AngularSecondOrder>& second_order() const;
  AngularFamily family() const;
  /// Normalising constant applied to the raw shape (c_ab for Dirichlet).
  double normalization_constant() const;
  std::string descriptor() const;

  struct Impl;

 private:
  explicit AngularModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

namespace detail {

inline int grading_power(double exponent) {
  if (exponent == 0.0 || exponent >= 1.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(2.0 / (exponent + 1.0))));
}

// Integral of f(anchor, offset) over [lo, hi] with theta = end + L v^m grading towards a
// singular end; the offset from that end is passed separately from the end itself.
template <class F>
quad::Estimate graded_piece(F& f, double lo, double hi, int m_lo, int m_hi, quad::Tolerance tol) {
  if (m_lo > 1 && m_hi > 1) {
    const double mid = 0.5 * (lo + hi);
    quad::Tolerance half_tol{0.5 * tol.abs, tol.rel};
    quad::Estimate left = graded_piece(f, lo, mid, m_lo, 1, half_tol);
    quad::Estimate right = graded_piece(f, mid, hi, 1, m_hi, half_tol);
    return {left.value + right.value, left.error + right.error,
            left.evaluations + right.evaluations, left.converged && right.converged};
  }
  const double length = hi - lo;
  if (m_hi > 1) {
    const int m = m_hi;
    auto g = [&](double v) {
      const double vm1 = std::pow(v, m - 1);
      return f(hi, -length * vm1 * v) * m * length * vm1;
    };
    return quad::gauss_kronrod(g, 0.0, 1.0, tol);
  }
  if (m_lo > 1) {
    const int m = m_lo;
    auto g = [&](double v) {
      const double vm1 = std::pow(v, m - 1);
      return f(lo, length * vm1 * v) * m * length * vm1;
    };
    return quad::gauss_kronrod(g, 0.0, 1.0, tol);
  }
  return quad::gauss_kronrod([&](double theta) { return f(theta, 0.0); }, lo, hi, tol);
}

}  // namespace detail

/// Integral of g(theta) h(theta) over [lo, hi] within (-pi, pi), split at the model's special
/// points and at `breaks`; pieces touching a singular point are integrated with a power-law
/// grading that removes the singularity.
template <class G>
quad::Estimate integrate_against_density(const AngularModel& model, G&& g, double lo, double hi,
                                         quad::Tolerance tol, std::span<const double> breaks = {}) {
  if (!(lo < hi)) return {0.0, 0.0, 0, true};
  struct Node {
    double theta;
    double exponent;
  };
  std::vector<Node> nodes{{lo, 0.0}, {hi, 0.0}};
  for (const SpecialPoint& sp : model.special_points()) {
    if (sp.theta > lo && sp.theta < hi) {
      nodes.push_back({sp.theta, sp.exponent});
    } else if (sp.theta == lo) {
      nodes[0].exponent = sp.exponent;
    } else if (sp.theta == hi) {
      nodes[1].exponent = sp.exponent;
    }
  }
  for (double b : breaks) {
    if (b > lo && b < hi) nodes.push_back({b, 0.0});
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& x, const Node& y) { return x.theta < y.theta; });

  auto integrand = [&](double anchor, double offset) {
    const double theta = std::clamp(anchor + offset, lo, hi);
    const double h = model.density_near(anchor, offset);
    return h == 0.0 ? 0.0 : g(theta) * h;
  };
  const double pieces = static_cast<double>(nodes.size() - 1);
  quad::Tolerance piece_tol{tol.abs / pieces, tol.rel};
  quad::Estimate total{0.0, 0.0, 0, true};
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i].theta;
    const double b = nodes[i + 1].theta;
    if (!(a < b)) continue;
    const quad::Estimate part = detail::graded_piece(integrand, a, b, detail::grading_power(nodes[i].exponent),
                                                     detail::grading_power(nodes[i + 1].exponent), piece_tol);
    total.value += part.value;
    total.error += part.error;
    total.evaluations += part.evaluations;
    total.converged = total.converged && part.converged;
  }
  return total;
}

/// |integral of h over (-pi, pi) - 1|, by adaptive quadrature.
double normalization_error(const AngularModel& model);

/// h(t s) / h(t); tends to s^{2 delta} as t -> 0.
double regular_variation_ratio(const AngularModel& model, double t, double s);

/// |h(sqrt(2z/t)) / h(1/sqrt(t)) - psi(z)|.
double psi_consistency_gap(const AngularModel& model, double t, double z);

/// True when psi(z) <= K max(z^lambda1, z^lambda2) on every grid point.
bool psi_growth_holds(const LocalProfile& profile, std::span<const double> z_grid);

/// Largest excess of the second-order gap over a(t) b(z) on the valid part of the grid.
double angular_second_order_violation(const AngularModel& model, std::span<const double> t_grid,
                                      std::span<const double> z_grid);

}  // namespace polar
