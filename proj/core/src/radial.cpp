#include "polar_tails/radial.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "polar_tails/errors.hpp"

namespace polar {

class RadialModel::Law {
 public:
  virtual ~Law() = default;
  virtual double survivor(double u) const = 0;
  virtual double log_survivor(double u) const = 0;
  virtual double scaling_w(double u) const = 0;
  virtual double quantile_log(double log_p) const = 0;
  /// log S(u + d) - log S(u) for d >= 0.
  virtual double log_survivor_step(double u, double d) const { return log_survivor(u + d) - log_survivor(u); }

  RadialFamily family = RadialFamily::Custom;
  std::optional<KotzRadialParams> kotz;
  std::optional<RadialSecondOrder> second_order;
  double u0 = 0.0;
  std::string descriptor;
};

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

// Monotone root of a decreasing function on [lo, hi] with f(lo) >= 0 >= f(hi):
// Newton steps, falling back to bisection whenever a step leaves the bracket.
template <class F, class DF>
double decreasing_root(F f, DF df, double lo, double hi) {
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0) lo = x; else hi = x;
    const double d = df(x);
    double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::abs(next) || hi - lo <= 1e-15 * std::abs(hi)) {
      return next;
    }
    x = next;
  }
  return x;
}

class KotzLaw final : public RadialModel::Law {
 public:
  explicit KotzLaw(const KotzRadialParams& p) : p_(p) {
    if (!(p.K > 0.0) || !(p.r > 0.0) || !(p.kappa > 0.0) || !std::isfinite(p.N)) {
      throw ConfigError("Kotz radial law requires K > 0, r > 0, kappa > 0 and finite N");
    }
    kotz = p;
    family = RadialFamily::Kotz;
    locate_threshold();
    if (p.N == 0.0 && p.kappa >= 1.0) attach_second_order();
    descriptor = "kotz(K=" + format_double(p.K) + ",N=" + format_double(p.N) +
                 ",r=" + format_double(p.r) + ",kappa=" + format_double(p.kappa) + ")";
  }

  double tail_log(double u) const {
    return std::log(p_.K) + (p_.N == 0.0 ? 0.0 : p_.N * std::log(u)) - p_.r * std::pow(u, p_.kappa);
  }

  double survivor(double u) const override {
    if (u <= u0) {
      if (!ramp_ || u <= 0.0) return 1.0;
      return 1.0 - (1.0 - ramp_end_) * u / u0;
    }
    return std::exp(tail_log(u));
  }

  double log_survivor(double u) const override {
    if (u <= u0) {
      if (!ramp_ || u <= 0.0) return 0.0;
      return std::log1p(-(1.0 - ramp_end_) * u / u0);
    }
    return tail_log(u);
  }

  double log_survivor_step(double u, double d) const override {
    if (u <= u0) return log_survivor(u + d) - log_survivor(u);
    // Both logs can be ~1e10 far out; expand around u instead of subtracting.
    const double l = std::log1p(d / u);
    return p_.N * l - p_.r * std::pow(u, p_.kappa) * std::expm1(p_.kappa * l);
  }

  double scaling_w(double u) const override {
    if (!(u > 0.0)) throw std::domain_error("scaling_w requires u > 0");
    return p_.r * p_.kappa * std::pow(u, p_.kappa - 1.0);
  }

  double quantile_log(double log_p) const override {
    if (ramp_ && log_p >= std::log(ramp_end_)) {
      return u0 * (-std::expm1(log_p)) / (1.0 - ramp_end_);
    }
    if (p_.N == 0.0) {
      return std::pow((std::log(p_.K) - log_p) / p_.r, 1.0 / p_.kappa);
    }
    auto f = [&](double u) { return tail_log(u) - log_p; };
    auto df = [&](double u) { return p_.N / u - p_.r * p_.kappa * std::pow(u, p_.kappa - 1.0); };
    double lo = u0;
    double hi = std::max(2.0 * u0, 1.0);
    while (f(hi) > 0.0) {
      lo = hi;
      hi *= 2.0;
    }
    return decreasing_root(f, df, lo, hi);
  }

 private:
  void locate_threshold() {
    const double r = p_.r;
    const double kappa = p_.kappa;
    const double u_peak = p_.N > 0.0 ? std::pow(p_.N / (r * kappa), 1.0 / kappa) : 0.0;
    auto f = [&](double u) { return tail_log(u); };
    auto df = [&](double u) { return p_.N / u - r * kappa * std::pow(u, kappa - 1.0); };

    if (p_.N == 0.0) {
      if (p_.K >= 1.0) {
        u0 = std::pow(std::log(p_.K) / r, 1.0 / kappa);
        return;
      }
    } else {
      double lo = u_peak;
      if (p_.N < 0.0) {
        lo = 1.0;
        while (f(lo) < 0.0) lo *= 0.5;
      }
      if (f(lo) >= 0.0) {
        double hi = std::max(2.0 * lo, 1.0);
        while (f(hi) > 0.0) hi *= 2.0;
        u0 = decreasing_root(f, df, lo, hi);
        return;
      }
    }
    // The tail function stays below 1: linear survivor ramp down to the tail at u0.
    ramp_ = true;
    u0 = std::max(u_peak, std::pow(r, -1.0 / kappa));
    ramp_end_ = std::exp(tail_log(u0));
  }

  // For N = 0 the ratio is exp(-x q) with q = ((1+y)^kappa - 1)/(kappa y), y = x/t, so
  // |ratio - e^{-x}| <= e^{-x} x (q - 1) for kappa >= 1.
  //   kappa <= 2: q - 1 <= (kappa-1) y / 2, and x^2 e^{-x} <= (2/e) (1+x) e^{-x/2},
  //               giving A(u) = (kappa-1) / (e t).
  //   kappa > 2:  q - 1 <= (kappa-1) y (1+y)^{kappa-2} / 2 and (1+y)^{kappa-2} <= e^{x/4}
  //               once t >= 4 (kappa-2); x^2 e^{-3x/4} <= (4/e) (1+x) e^{-x/2},
  //               giving A(u) = 2 (kappa-1) / (e t).
  void attach_second_order() {
    const double kappa = p_.kappa;
    const double constant = (kappa <= 2.0 ? 1.0 : 2.0) * (kappa - 1.0) / std::numbers::e;
    const double rk = p_.r * kappa;
    double valid_from = u0;
    if (kappa > 2.0) valid_from = std::max(valid_from, std::pow(4.0 * (kappa - 2.0) / rk, 1.0 / kappa));
    RadialSecondOrder so;
    so.A = [constant, rk, kappa](double u) { return constant / (rk * std::pow(u, kappa)); };
    so.B = [](double x) { return (1.0 + x) * std::exp(-0.5 * x); };
    so.valid_from = valid_from;
    second_order = std::move(so);
  }

  KotzRadialParams p_;
  bool ramp_ = false;
  double ramp_end_ = 1.0;
};

class CustomLaw final : public RadialModel::Law {
 public:
  CustomLaw(std::function<double(double)> s, std::function<double(double)> w,
            std::optional<RadialSecondOrder> so, std::string label)
      : s_(std::move(s)), w_(std::move(w)) {
    if (!s_ || !w_) throw ConfigError("custom radial law needs survivor and scaling functions");
    second_order = std::move(so);
    descriptor = std::move(label);
  }

  double survivor(double u) const override { return u <= 0.0 ? 1.0 : s_(u); }
  double log_survivor(double u) const override { return std::log(survivor(u)); }
  double scaling_w(double u) const override {
    if (!(u > 0.0)) throw std::domain_error("scaling_w requires u > 0");
    return w_(u);
  }
  double quantile_log(double log_p) const override {
    double lo = 0.0;
    double hi = 1.0;
    while (log_survivor(hi) > log_p) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw NumericError("custom radial quantile: survivor does not reach target");
    }
    for (int it = 0; it < 2000 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (log_survivor(mid) > log_p) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::function<double(double)> s_;
  std::function<double(double)> w_;
};

}  // namespace

RadialModel RadialModel::kotz(const KotzRadialParams& params) {
  return RadialModel(std::make_shared<KotzLaw>(params));
}

RadialModel RadialModel::chi2df() {
  auto law = std::make_shared<KotzLaw>(KotzRadialParams{1.0, 0.0, 0.5, 2.0});
  law->family = RadialFamily::Chi2df;
  law->descriptor = "chi2df";
  return RadialModel(std::move(law));
}

RadialModel RadialModel::custom(std::function<double(double)> survivor,
                                std::function<double(double)> scaling_w,
                                std::optional<RadialSecondOrder> second_order, std::string label) {
  return RadialModel(std::make_shared<CustomLaw>(std::move(survivor), std::move(scaling_w),
                                                 std::move(second_order), std::move(label)));
}

double RadialModel::survivor(double u) const { return law_->survivor(u); }
double RadialModel::log_survivor(double u) const { return law_->log_survivor(u); }
double RadialModel::scaling_w(double u) const { return law_->scaling_w(u); }

double RadialModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile requires p in (0, 1)");
  return law_->quantile_log(std::log(p));
}

double RadialModel::quantile_log(double log_p) const {
  if (!(log_p < 0.0)) throw std::domain_error("quantile_log requires log_p < 0");
  return law_->quantile_log(log_p);
}

double RadialModel::mda_ratio_diagnostic(double u, double x) const {
  if (!(u > 0.0)) throw std::domain_error("mda_ratio_diagnostic requires u > 0");
  if (x == 0.0) return 1.0;
  const double step = x / scaling_w(u);
  if (u + step < 0.0) throw std::domain_error("mda_ratio_diagnostic requires u + x/w(u) >= 0");
  if (step < 0.0) return std::exp(log_survivor(u + step) - log_survivor(u));
  return std::exp(law_->log_survivor_step(u, step));
}

const std::optional<RadialSecondOrder>& RadialModel::second_order() const { return law_->second_order; }
RadialFamily RadialModel::family() const { return law_->family; }
std::optional<KotzRadialParams> RadialModel::kotz_params() const { return law_->kotz; }
double RadialModel::u0() const { return law_->u0; }
std::string RadialModel::descriptor() const { return law_->descriptor; }

double second_order_violation(const RadialModel& model, std::span<const double> u_grid,
                              std::span<const double> x_grid) {
  const auto& so = model.second_order();
  if (!so) throw ConfigError("radial model has no second-order bound");
  double worst = 0.0;
  for (double u : u_grid) {
    if (u < so->valid_from || u <= 0.0) continue;
    const double a = so->A(u);
    for (double x : x_grid) {
      if (x < 0.0) continue;
      const double gap = std::abs(model.mda_ratio_diagnostic(u, x) - std::exp(-x));
      // Rounding in the ratio itself is ~1e-15; do not count it as a violation.
      worst = std::max(worst, gap - a * so->B(x) - 1e-14);
    }
  }
  return std::max(worst, 0.0);
}

}  // namespace polar
