#include "polar_tails/estimation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "polar_tails/asymptotics.hpp"
#include "polar_tails/errors.hpp"

namespace polar {

namespace {

constexpr double kRhoLimit = 1.0 - 1e-9;

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 1e-12 * n)) throw DataError("degenerate tail fit: no spread in log u", xs.size());
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

WParams to_w_params(const LineFit& fit, std::size_t points) {
  if (!(fit.slope > 0.0)) throw DataError("tail fit gives a non-positive exponent", points);
  WParams p;
  p.gamma = fit.slope;
  p.c = std::exp(fit.intercept);
  p.points = points;
  p.residual_rms = fit.residual_rms;
  return p;
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("report value for '" + key + "' is not a number: " + value);
  }
  return v;
}

}  // namespace

RhoEstimate estimate_rho(std::span<const XY> pairs, std::size_t k) {
  if (k < 50) throw DataError("estimate_rho needs k >= 50", k);
  if (k > pairs.size() / 10) throw DataError("estimate_rho needs k <= n/10", pairs.size());
  std::vector<XY> top(pairs.begin(), pairs.end());
  std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k - 1), top.end(),
                   [](const XY& a, const XY& b) { return a.x > b.x; });
  std::vector<double> ratios;
  ratios.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(top[i].x > 0.0)) throw DataError("estimate_rho: top-order X values must be positive", i);
    ratios.push_back(top[i].y / top[i].x);
  }
  std::sort(ratios.begin(), ratios.end());
  // Midpoint of the ratio quartiles. The conditional law of Y/X is symmetric about rho, and
  // unlike the median this stays stable when the angle density vanishes at 0.
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(k - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, k - 1);
    return ratios[lo] + (pos - static_cast<double>(lo)) * (ratios[hi] - ratios[lo]);
  };
  double center = 0.5 * (quantile(0.25) + quantile(0.75));
  RhoEstimate est;
  est.k = k;
  if (std::abs(center) > kRhoLimit) {
    center = std::copysign(kRhoLimit, center);
    est.clipped = true;
  }
  est.rho = center;
  return est;
}

double WParams::w(double u) const { return c * gamma * std::pow(u, gamma - 1.0); }

WParams estimate_w_params(std::span<const double> x_sample, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 0.2)) throw ConfigError("tail_fraction must lie in (0, 0.2]");
  const std::size_t n = x_sample.size();
  const auto m = static_cast<std::size_t>(std::floor(tail_fraction * static_cast<double>(n)));
  if (m < 200) throw DataError("estimate_w_params needs at least 200 tail points", m);
  std::vector<double> sorted(x_sample.begin(), x_sample.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m), sorted.end(), std::greater<>());
  std::vector<double> lx;
  std::vector<double> ly;
  lx.reserve(m);
  ly.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(sorted[i] > 0.0)) break;
    const double s_hat = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    lx.push_back(std::log(sorted[i]));
    ly.push_back(std::log(-std::log(s_hat)));
  }
  if (lx.size() < 200) throw DataError("estimate_w_params needs at least 200 positive tail points", lx.size());
  return to_w_params(least_squares(lx, ly), lx.size());
}

WParams estimate_w_params(std::span<const double> u, std::span<const double> survivor) {
  if (u.size() != survivor.size()) throw ConfigError("u and survivor grids differ in length");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > 0.0 && survivor[i] > 0.0 && survivor[i] < 1.0) {
      lx.push_back(std::log(u[i]));
      ly.push_back(std::log(-std::log(survivor[i])));
    }
  }
  if (lx.size() < 2) throw DataError("estimate_w_params needs two usable grid points", lx.size());
  return to_w_params(least_squares(lx, ly), lx.size());
}

DeltaEstimate estimate_delta(std::span<const double> theta) {
  std::vector<double> mags;
  mags.reserve(theta.size());
  for (double t : theta) mags.push_back(std::abs(t));
  const auto k = static_cast<std::size_t>(std::floor(0.05 * static_cast<double>(mags.size())));
  if (k < 100) throw DataError("estimate_delta needs at least 100 angles below the 5% quantile of |theta|", k);
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k - 1), mags.end());
  const double edge = mags[k - 1];
  if (!(edge > 0.0)) throw DataError("estimate_delta: angles concentrate at zero", k);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (!(mags[i] > 0.0)) throw DataError("estimate_delta: zero angle in the sample", k);
    sum += std::log(edge / mags[i]);
  }
  const double beta = static_cast<double>(k - 1) / sum;
  return {(beta - 1.0) / 2.0, "angles", k};
}

DeltaEstimate estimate_delta_provided(double delta) {
  if (!(delta > -0.5) || !std::isfinite(delta)) throw ConfigError("delta must exceed -1/2");
  return {delta, "provided", 0};
}

DeltaEstimate estimate_delta_tail_ratio(std::span<const XY> pairs, const RadialModel& radial, double u1, double u2) {
  if (!(u1 > 0.0 && u2 > u1)) throw ConfigError("tail-ratio delta needs 0 < u1 < u2");
  const double n = static_cast<double>(pairs.size());
  const auto count2 = static_cast<std::size_t>(std::round(empirical_survivor(pairs, u2) * n));
  if (count2 < 50) throw DataError("tail-ratio delta needs 50 exceedances of u2", count2);
  const double r1 = empirical_survivor(pairs, u1) / radial.survivor(u1);
  const double r2 = empirical_survivor(pairs, u2) / radial.survivor(u2);
  const double slope = std::log(r1 / r2) / std::log(radial.t_of(u1) / radial.t_of(u2));
  return {-slope - 0.5, "tail_ratio", count2};
}

std::vector<double> reconstruct_angles(std::span<const XY> pairs, double rho) {
  if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("reconstruct_angles requires |rho| < 1");
  const double c = std::sqrt((1.0 - rho) * (1.0 + rho));
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const XY& p : pairs) out.push_back(std::atan2((p.y - rho * p.x) / c, p.x));
  return out;
}

double EstimatorReport::w(double u) const { return c_hat * gamma_hat * std::pow(u, gamma_hat - 1.0); }

std::string EstimatorReport::serialize() const {
  std::ostringstream os;
  os << "rho_hat=" << format_number(rho_hat) << '\n'
     << "c_hat=" << format_number(c_hat) << '\n'
     << "gamma_hat=" << format_number(gamma_hat) << '\n'
     << "delta_hat=" << format_number(delta_hat) << '\n'
     << "delta_source=" << delta_source << '\n'
     << "n=" << n << '\n'
     << "k_used=" << k_used << '\n'
     << "w_points=" << w_points << '\n'
     << "w_residual_rms=" << format_number(w_residual_rms) << '\n'
     << "rho_clipped=" << (rho_clipped ? 1 : 0) << '\n';
  return os.str();
}

EstimatorReport EstimatorReport::parse(const std::string& text) {
  EstimatorReport r;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("report line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "rho_hat") r.rho_hat = parse_double(key, value);
    else if (key == "c_hat") r.c_hat = parse_double(key, value);
    else if (key == "gamma_hat") r.gamma_hat = parse_double(key, value);
    else if (key == "delta_hat") r.delta_hat = parse_double(key, value);
    else if (key == "delta_source") r.delta_source = value;
    else if (key == "n") r.n = static_cast<std::size_t>(parse_double(key, value));
    else if (key == "k_used") r.k_used = static_cast<std::size_t>(parse_double(key, value));
    else if (key == "w_points") r.w_points = static_cast<std::size_t>(parse_double(key, value));
    else if (key == "w_residual_rms") r.w_residual_rms = parse_double(key, value);
    else if (key == "rho_clipped") r.rho_clipped = parse_double(key, value) != 0.0;
  }
  return r;
}

double psi_hat(const EstimatorReport& report, double x, double y, PsiHatVariant variant) {
  if (!(report.rho_hat > -1.0 && report.rho_hat < 1.0) || !(report.c_hat > 0.0) || !(report.gamma_hat > 0.0) ||
      !(report.delta_hat > -0.5)) {
    throw ConfigError("invalid estimator report");
  }
  if (!(x > 0.0)) throw std::domain_error("psi_hat requires x > 0");
  const double rho = report.rho_hat;
  const double w = report.w(x);
  const double scale = std::sqrt((1.0 - rho) * (1.0 + rho) * x / w);
  const double center = variant == PsiHatVariant::Centered ? rho * x : rho * (x + 1.0 / w);
  return LimitLaw::gamma(report.delta_hat).cdf((y - center) / scale);
}

bool psi_hat_reliable(const EstimatorReport& report, double x) { return x * report.w(x) > 10.0; }

}  // namespace polar
