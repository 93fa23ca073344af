#include "polar_tails/angular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "polar_tails/errors.hpp"
#include "polar_tails/rng.hpp"

namespace polar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kTableCells = 4096;

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

// Maps v in [0,1] to [0,1] with cubic clustering at both ends.
double two_sided_grading(double v) {
  const double a = v * v * v;
  const double b = (1.0 - v) * (1.0 - v) * (1.0 - v);
  return a / (a + b);
}

double hermite(double c0, double c1, double d0, double d1, double dx, double s) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * c0 + (s3 - 2 * s2 + s) * dx * d0 + (-2 * s3 + 3 * s2) * c1 +
         (s3 - s2) * dx * d1;
}

double hermite_ds(double c0, double c1, double d0, double d1, double dx, double s) {
  const double s2 = s * s;
  return (6 * s2 - 6 * s) * c0 + (3 * s2 - 4 * s + 1) * dx * d0 + (-6 * s2 + 6 * s) * c1 +
         (3 * s2 - 2 * s) * dx * d1;
}

// Fritsch-Carlson monotone slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1);
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    secant[i] = (y[i + 1] - y[i]) / h[i];
  }
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] > 0.0 && secant[i] > 0.0) {
      const double w1 = 2 * h[i] + h[i - 1];
      const double w2 = h[i] + 2 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / secant[i - 1] + w2 / secant[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double s0, double s1) {
    double v = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if (v * s0 <= 0.0) return 0.0;
    if (s0 * s1 <= 0.0 && std::abs(v) > 3 * std::abs(s0)) return 3 * s0;
    return v;
  };
  if (n > 2) {
    d[0] = end_slope(h[0], h[1], secant[0], secant[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], secant[n - 2], secant[n - 3]);
  } else {
    d[0] = d[1] = secant[0];
  }
  return d;
}

}  // namespace

struct AngularModel::Impl {
  AngularFamily family = AngularFamily::Custom;
  std::function<double(double)> shape;  // unnormalised
  std::function<double(double, double)> shape_near;  // optional, see density_near
  double constant = 1.0;
  LocalProfile profile;
  std::vector<SpecialPoint> specials;
  std::optional<AngularSecondOrder> second_order;
  std::string descriptor;
  std::vector<double> nodes;
  std::vector<double> cdf;
  std::vector<double> slopes;
};

namespace {

void add_special(std::vector<SpecialPoint>& pts, double theta, double exponent) {
  for (SpecialPoint& p : pts) {
    if (p.theta == theta) {
      p.exponent = std::min(p.exponent, exponent);
      return;
    }
  }
  pts.push_back({theta, exponent});
}

void finish_specials(std::vector<SpecialPoint>& pts) {
  add_special(pts, -kPi, 0.0);
  add_special(pts, kPi, 0.0);
  pts.erase(std::remove_if(pts.begin(), pts.end(),
                           [](const SpecialPoint& p) { return p.theta < -kPi || p.theta > kPi; }),
            pts.end());
  std::sort(pts.begin(), pts.end(),
            [](const SpecialPoint& a, const SpecialPoint& b) { return a.theta < b.theta; });
}

}  // namespace

LocalProfile power_profile(double delta) {
  LocalProfile p;
  p.delta = delta;
  p.psi = [delta](double s) { return delta == 0.0 ? 1.0 : std::pow(2.0 * s, delta); };
  p.growth = {std::pow(2.0, delta), delta, delta};
  return p;
}

namespace {

// Fills the normalising constant (when `known_constant` is not positive) and the CDF table.
AngularModel finalize(std::shared_ptr<AngularModel::Impl> impl, double known_constant,
                      const std::function<AngularModel(std::shared_ptr<const AngularModel::Impl>)>& wrap) {
  finish_specials(impl->specials);
  const AngularModel probe = wrap(impl);
  if (known_constant > 0.0) {
    impl->constant = known_constant;
  } else {
    impl->constant = 1.0;
    const quad::Estimate mass =
        integrate_against_density(probe, [](double) { return 1.0; }, -kPi, kPi, {1e-15, 1e-13});
    if (!(mass.value > 0.0) || !std::isfinite(mass.value)) {
      throw ConfigError("angular density has no finite positive mass");
    }
    if (!mass.converged) {
      throw NumericError("angular normalisation did not converge", mass.error / mass.value);
    }
    impl->constant = 1.0 / mass.value;
  }

  // Segment boundaries: special points plus 0 and +-pi/2.
  std::vector<double> bounds;
  for (const SpecialPoint& p : impl->specials) bounds.push_back(p.theta);
  for (double extra : {0.0, -0.5 * kPi, 0.5 * kPi}) bounds.push_back(extra);
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  std::vector<double>& nodes = impl->nodes;
  nodes.clear();
  nodes.push_back(bounds.front());
  const std::size_t segments = bounds.size() - 1;
  for (std::size_t s = 0; s < segments; ++s) {
    const double lo = bounds[s];
    const double hi = bounds[s + 1];
    std::size_t cells = static_cast<std::size_t>(
        std::llround(static_cast<double>(kTableCells) * (hi - lo) / (2.0 * kPi)));
    cells = std::max<std::size_t>(cells, 16);
    if (cells % 2 == 1) ++cells;
    for (std::size_t k = 1; k < cells; ++k) {
      nodes.push_back(lo + (hi - lo) * two_sided_grading(static_cast<double>(k) / static_cast<double>(cells)));
    }
    nodes.push_back(hi);
  }

  std::vector<double>& cdf = impl->cdf;
  cdf.assign(nodes.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const quad::Estimate cell =
        integrate_against_density(probe, [](double) { return 1.0; }, nodes[i], nodes[i + 1], {1e-17, 1e-12});
    cdf[i + 1] = cdf[i] + std::max(cell.value, 0.0);
  }
  const double total = cdf.back();
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;
  impl->slopes = pchip_slopes(nodes, cdf);
  return probe;
}

}  // namespace

AngularModel AngularModel::uniform() {
  auto impl = std::make_shared<Impl>();
  impl->family = AngularFamily::Uniform;
  impl->shape = [](double) { return 1.0; };
  impl->profile = power_profile(0.0);
  impl->descriptor = "uniform";
  return finalize(impl, 1.0 / (2.0 * kPi),
                  [](std::shared_ptr<const Impl> p) { return AngularModel(std::move(p)); });
}

AngularModel AngularModel::dirichlet(const DirichletAngularParams& params) {
  const double a = params.a;
  const double b = params.b;
  const double eps = params.eps;
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError("Dirichlet angular law requires a > 0 and b > 0");
  }
  if (!(eps > 0.0 && eps <= kPi)) throw ConfigError("Dirichlet angular law requires eps in (0, pi]");

  auto impl = std::make_shared<Impl>();
  impl->family = AngularFamily::Dirichlet;
  const double ea = 2 * a - 1;
  const double eb = 2 * b - 1;
  impl->shape = [ea, eb, eps](double theta) {
    if (std::abs(theta) >= eps) return 0.0;
    const double s = ea == 0.0 ? 1.0 : std::pow(std::abs(std::sin(theta)), ea);
    const double c = eb == 0.0 ? 1.0 : std::pow(std::abs(std::cos(theta)), eb);
    return s * c;
  };
  if (eps == kPi) {
    // h(pi - d) = h(d) and h(pi/2 - d) = |cos d|^ea |sin d|^eb.
    impl->shape_near = [ea, eb](double anchor, double d) {
      const double s = std::abs(std::sin(d));
      const double c = std::abs(std::cos(d));
      const bool quarter = std::abs(anchor) == 0.5 * kPi;
      const double ps = ea == 0.0 ? 1.0 : std::pow(quarter ? c : s, ea);
      const double pc = eb == 0.0 ? 1.0 : std::pow(quarter ? s : c, eb);
      return ps * pc;
    };
  }
  impl->profile = power_profile(a - 0.5);
  add_special(impl->specials, 0.0, ea);
  if (eps > 0.5 * kPi) {
    add_special(impl->specials, 0.5 * kPi, eb);
    add_special(impl->specials, -0.5 * kPi, eb);
  } else if (eps == 0.5 * kPi) {
    add_special(impl->specials, 0.5 * kPi, std::min(eb, 0.0));
    add_special(impl->specials, -0.5 * kPi, std::min(eb, 0.0));
  }
  if (eps < kPi) {
    add_special(impl->specials, eps, 0.0);
    add_special(impl->specials, -eps, 0.0);
  } else {
    add_special(impl->specials, kPi, ea);
    add_special(impl->specials, -kPi, ea);
  }

  // |log(sin th/th)| <= th^2/5 and |log cos th| <= th^2 for th <= 1; with L = C1 (2z+1)/t <= 1
  // the ratio error is psi(z) |e^L - 1| <= e psi(z) L.
  const double c1 = std::abs(ea) / 5.0 + std::abs(eb);
  const double delta = a - 0.5;
  AngularSecondOrder so;
  so.a = [](double t) { return 1.0 / t; };
  so.b = [c1, delta](double z) { return std::numbers::e * c1 * (2 * z + 1) * std::pow(2 * z, delta); };
  so.valid = [c1, eps](double t, double z) {
    const double limit = std::min(1.0, eps);
    return t > 0.0 && z > 0.0 && std::sqrt(2 * z / t) < limit && 1.0 / std::sqrt(t) < limit &&
           c1 * (2 * z + 1) / t <= 1.0;
  };
  impl->second_order = std::move(so);
  impl->descriptor = "dirichlet(a=" + format_double(a) + ",b=" + format_double(b) +
                     ",eps=" + format_double(eps) + ")";

  const double constant = eps == kPi ? std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)) / 2.0 : 0.0;
  return finalize(impl, constant, [](std::shared_ptr<const Impl> p) { return AngularModel(std::move(p)); });
}

AngularModel AngularModel::power(double delta, double eps) {
  if (!(delta > -0.5) || !std::isfinite(delta)) throw ConfigError("power angular law requires delta > -1/2");
  if (!(eps > 0.0 && eps <= kPi)) throw ConfigError("power angular law requires eps in (0, pi]");
  auto impl = std::make_shared<Impl>();
  impl->family = AngularFamily::Power;
  const double e = 2 * delta;
  impl->shape = [e, eps](double theta) {
    if (std::abs(theta) >= eps) return 0.0;
    return e == 0.0 ? 1.0 : std::pow(std::abs(theta), e);
  };
  impl->profile = power_profile(delta);
  add_special(impl->specials, 0.0, e);
  add_special(impl->specials, eps, 0.0);
  add_special(impl->specials, -eps, 0.0);
  // The local ratio equals psi exactly inside the support.
  AngularSecondOrder so;
  so.a = [](double t) { return 1.0 / t; };
  so.b = [](double) { return 0.0; };
  so.valid = [eps](double t, double z) {
    return t > 0.0 && z > 0.0 && std::sqrt(2 * z / t) < eps && 1.0 / std::sqrt(t) < eps;
  };
  impl->second_order = std::move(so);
  impl->descriptor = "power(delta=" + format_double(delta) + ",eps=" + format_double(eps) + ")";
  const double constant = (e + 1.0) / (2.0 * std::pow(eps, e + 1.0));
  return finalize(impl, constant, [](std::shared_ptr<const Impl> p) { return AngularModel(std::move(p)); });
}

AngularModel AngularModel::custom(std::function<double(double)> density, LocalProfile profile,
                                  std::vector<SpecialPoint> special_points,
                                  std::optional<AngularSecondOrder> second_order, std::string label) {
  if (!density) throw ConfigError("custom angular law needs a density");
  if (!profile.psi) throw ConfigError("custom angular law needs a limit profile psi");
  if (!(profile.delta > -0.5)) throw ConfigError("custom angular law requires delta > -1/2");
  auto impl = std::make_shared<Impl>();
  impl->family = AngularFamily::Custom;
  impl->shape = std::move(density);
  impl->profile = std::move(profile);
  impl->specials = std::move(special_points);
  add_special(impl->specials, 0.0, 2 * impl->profile.delta);
  impl->second_order = std::move(second_order);
  impl->descriptor = std::move(label);
  return finalize(impl, 0.0, [](std::shared_ptr<const Impl> p) { return AngularModel(std::move(p)); });
}

double AngularModel::density(double theta) const {
  if (!(theta > -kPi && theta < kPi)) throw std::domain_error("angular density requires theta in (-pi, pi)");
  return impl_->constant * impl_->shape(theta);
}

double AngularModel::density_near(double anchor, double offset) const {
  const bool reflected = std::abs(anchor) == kPi || std::abs(anchor) == 0.5 * kPi;
  if (impl_->shape_near && reflected && offset != 0.0) {
    const double theta = anchor + offset;
    if (theta < -kPi || theta > kPi) return 0.0;
    return impl_->constant * impl_->shape_near(anchor, offset);
  }
  const double theta = anchor + offset;
  if (!(theta > -kPi && theta < kPi)) return 0.0;
  return density(theta);
}

double AngularModel::cdf(double theta) const {
  const auto& x = impl_->nodes;
  const auto& c = impl_->cdf;
  if (std::isnan(theta)) throw std::domain_error("angular cdf: theta is NaN");
  if (theta <= x.front()) return 0.0;
  if (theta >= x.back()) return 1.0;
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), theta) - x.begin()) - 1;
  const double dx = x[k + 1] - x[k];
  const double s = (theta - x[k]) / dx;
  const double v = hermite(c[k], c[k + 1], impl_->slopes[k], impl_->slopes[k + 1], dx, s);
  return std::clamp(v, c[k], c[k + 1]);
}

double AngularModel::inverse_cdf(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_cdf requires p in (0, 1)");
  const auto& x = impl_->nodes;
  const auto& c = impl_->cdf;
  const auto& d = impl_->slopes;
  // First cell with c[k] <= p < c[k+1]; zero-mass cells are skipped automatically.
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), p) - c.begin()) - 1;
  const double dx = x[k + 1] - x[k];
  double lo = 0.0;
  double hi = 1.0;
  double s = (p - c[k]) / (c[k + 1] - c[k]);
  for (int it = 0; it < 100; ++it) {
    const double f = hermite(c[k], c[k + 1], d[k], d[k + 1], dx, s) - p;
    if (f == 0.0) break;
    if (f < 0.0) lo = s; else hi = s;
    const double df = hermite_ds(c[k], c[k + 1], d[k], d[k + 1], dx, s);
    double next = df > 0.0 ? s - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) < 1e-15 || hi - lo < 1e-15) {
      s = next;
      break;
    }
    s = next;
  }
  return x[k] + dx * s;
}

std::vector<double> AngularModel::sample(std::uint64_t seed, std::uint64_t stream, std::size_t n) const {
  if (n == 0) throw std::invalid_argument("angular sample size must be at least 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = inverse_cdf(rng::uniform_pair(seed, stream, i)[0]);
  return out;
}

const LocalProfile& AngularModel::local_profile() const { return impl_->profile; }
std::span<const SpecialPoint> AngularModel::special_points() const { return impl_->specials; }
const std::optional<AngularSecondOrder>& AngularModel::second_order() const { return impl_->second_order; }
AngularFamily AngularModel::family() const { return impl_->family; }
double AngularModel::normalization_constant() const { return impl_->constant; }
std::string AngularModel::descriptor() const { return impl_->descriptor; }

double normalization_error(const AngularModel& model) {
  const quad::Estimate mass =
      integrate_against_density(model, [](double) { return 1.0; }, -kPi, kPi, {1e-15, 1e-13});
  return std::abs(mass.value - 1.0);
}

double regular_variation_ratio(const AngularModel& model, double t, double s) {
  return model.density(t * s) / model.density(t);
}

double psi_consistency_gap(const AngularModel& model, double t, double z) {
  const double ratio = model.density(std::sqrt(2 * z / t)) / model.density(1.0 / std::sqrt(t));
  return std::abs(ratio - model.local_profile().psi(z));
}

bool psi_growth_holds(const LocalProfile& profile, std::span<const double> z_grid) {
  for (double z : z_grid) {
    const double bound = profile.growth.K * std::max(std::pow(z, profile.growth.lambda1),
                                                     std::pow(z, profile.growth.lambda2));
    if (profile.psi(z) > bound * (1.0 + 1e-12)) return false;
  }
  return true;
}

double angular_second_order_violation(const AngularModel& model, std::span<const double> t_grid,
                                      std::span<const double> z_grid) {
  const auto& so = model.second_order();
  if (!so) throw ConfigError("angular model has no second-order bound");
  double worst = 0.0;
  for (double t : t_grid) {
    for (double z : z_grid) {
      if (!so->valid(t, z)) continue;
      const double gap = psi_consistency_gap(model, t, z);
      worst = std::max(worst, gap - so->a(t) * so->b(z) - 1e-13 * (1.0 + model.local_profile().psi(z)));
    }
  }
  return std::max(worst, 0.0);
}

}  // namespace polar
