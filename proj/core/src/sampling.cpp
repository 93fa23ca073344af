#include "polar_tails/sampling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "polar_tails/errors.hpp"
#include "polar_tails/rng.hpp"

namespace polar {

namespace {

constexpr std::size_t kMinExceedances = 50;

unsigned resolve_threads(unsigned threads, std::size_t n) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t useful = std::max<std::size_t>(1, n / 4096);
  return static_cast<unsigned>(std::min<std::size_t>(threads, useful));
}

// Runs body(begin, end) over contiguous chunks of [0, n).
template <class Body>
void parallel_ranges(std::size_t n, unsigned threads, Body body) {
  threads = resolve_threads(threads, n);
  if (threads <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = std::min(n, w * chunk);
    const std::size_t end = std::min(n, begin + chunk);
    workers.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<double> exceedance_values(std::span<const XY> pairs, double u) {
  std::vector<double> ys;
  for (const XY& p : pairs) {
    if (p.x > u) ys.push_back(p.y);
  }
  return ys;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string model_hash(const PolarModel& model) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : model.descriptor()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SampleBatch sample_polar(const PolarModel& model, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                         unsigned threads) {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
  SampleBatch batch;
  batch.seed = seed;
  batch.stream = stream;
  batch.model_hash = model_hash(model);
  batch.pairs.resize(n);
  const double rho = model.rho;
  const double c = std::sqrt((1.0 - rho) * (1.0 + rho));
  parallel_ranges(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto u = rng::uniform_pair(seed, stream, i);
      const double r = model.radial.quantile(u[0]);
      const double theta = model.angular.inverse_cdf(u[1]);
      const double s1 = r * std::cos(theta);
      const double s2 = r * std::sin(theta);
      batch.pairs[i] = {s1, rho * s1 + c * s2};
    }
  });
  return batch;
}

std::vector<double> sample_radius(const RadialModel& radial, std::size_t n, std::uint64_t seed,
                                  std::uint64_t stream, unsigned threads) {
  if (n == 0) throw std::invalid_argument("sample size must be at least 1");
  std::vector<double> out(n);
  parallel_ranges(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = radial.quantile(rng::uniform_pair(seed, stream, i)[0]);
  });
  return out;
}

double empirical_survivor(std::span<const XY> pairs, double u) {
  if (pairs.empty()) throw DataError("empirical survivor of an empty sample", 0);
  const auto count = std::count_if(pairs.begin(), pairs.end(), [u](const XY& p) { return p.x > u; });
  return static_cast<double>(count) / static_cast<double>(pairs.size());
}

std::vector<double> empirical_conditional_cdf(std::span<const XY> pairs, double u, std::span<const double> y_grid) {
  std::vector<double> ys = exceedance_values(pairs, u);
  if (ys.size() < kMinExceedances) {
    throw DataError("too few exceedances for a conditional CDF (need 50)", ys.size());
  }
  std::sort(ys.begin(), ys.end());
  std::vector<double> out;
  out.reserve(y_grid.size());
  const double m = static_cast<double>(ys.size());
  for (double y : y_grid) {
    const auto below = std::upper_bound(ys.begin(), ys.end(), y) - ys.begin();
    out.push_back(static_cast<double>(below) / m);
  }
  return out;
}

RescaledExceedances rescaled_exceedance_stats(std::span<const XY> pairs, double u, double rho, double w_at_u) {
  if (!(u > 0.0) || !(w_at_u > 0.0)) throw std::domain_error("rescaled exceedances require u > 0 and w > 0");
  if (!(rho > -1.0 && rho < 1.0)) throw std::domain_error("rescaled exceedances require |rho| < 1");
  RescaledExceedances out;
  const double root_t = std::sqrt(u * w_at_u);
  const double scale = u * std::sqrt((1.0 - rho) * (1.0 + rho));
  for (const XY& p : pairs) {
    if (p.x > u) {
      out.x.push_back((p.x - u) * w_at_u);
      out.y.push_back((p.y - rho * u) * root_t / scale);
    }
  }
  if (out.x.empty()) throw DataError("no exceedances of the threshold", 0);
  return out;
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DataError("KS statistic of an empty sample", 0);
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_pvalue(double statistic, std::size_t n) {
  if (n == 0) throw std::domain_error("ks_pvalue requires n >= 1");
  const double root_n = std::sqrt(static_cast<double>(n));
  const double lambda = (root_n + 0.12 + 0.11 / root_n) * statistic;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

void write_xy_csv(std::ostream& out, std::span<const XY> pairs) {
  out << "x,y\n";
  for (const XY& p : pairs) out << format_number(p.x) << ',' << format_number(p.y) << '\n';
}

std::vector<XY> read_xy_csv(std::istream& in) {
  std::vector<XY> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    double x = 0.0;
    double y = 0.0;
    bool ok = comma != std::string::npos;
    if (ok) {
      const char* b = line.data();
      const auto rx = std::from_chars(b, b + comma, x);
      const auto ry = std::from_chars(b + comma + 1, b + line.size(), y);
      ok = rx.ec == std::errc() && rx.ptr == b + comma && ry.ec == std::errc() && ry.ptr == b + line.size();
    }
    if (!ok) {
      if (!header_seen && rows.empty()) {
        header_seen = true;
        continue;
      }
      throw DataError("malformed CSV row at line " + std::to_string(line_no), rows.size());
    }
    rows.push_back({x, y});
  }
  return rows;
}

}  // namespace polar
