#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>
#include <vector>

#include "polar_tails/asymptotics.hpp"
#include "polar_tails/errors.hpp"
#include "polar_tails/estimation.hpp"
#include "polar_tails/sampling.hpp"

namespace polar::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Calls fn(i) for i in [0, n) on up to `threads` workers; the first exception is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::uint64_t resolve_seed(const Config& config, const RunOptions& options) {
  return options.seed ? *options.seed : config.count("seed", kDefaultSeed);
}

void write_row(std::ostream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_number(v);
    first = false;
  }
  out << '\n';
}

struct InputManifest {
  std::string hash = "none";
  std::optional<std::uint64_t> seed;
};

InputManifest read_manifest(const std::filesystem::path& path) {
  InputManifest m;
  std::ifstream in(path);
  std::string line;
  if (std::getline(in, line) && line.rfind("# manifest: ", 0) == 0) {
    std::istringstream fields(line.substr(12));
    std::string hash;
    std::uint64_t seed = 0;
    if (fields >> hash) m.hash = hash;
    if (fields >> seed) m.seed = seed;
  }
  return m;
}

}  // namespace

unsigned threads_from_env() {
  const char* raw = std::getenv("POLAR_TAILS_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 0 || v > 4096) {
    throw ConfigError(std::string("POLAR_TAILS_THREADS must be a non-negative integer, got '") + raw + "'");
  }
  return static_cast<unsigned>(v);
}

std::string version() { return POLAR_TAILS_VERSION; }

void write_manifest(std::ostream& out, const std::string& model_hash, std::uint64_t seed) {
  out << "# manifest: " << model_hash << ' ' << seed << ' ' << version() << '\n';
}

void cmd_tail_table(const Config& config, const RunOptions& options, std::ostream& out) {
  const PolarModel model = build_model(config);
  const std::vector<double> u_grid = config.grid("u_grid");
  struct Row {
    double t, exact, thm1, thm3_default, thm3_strict;
  };
  std::vector<Row> rows(u_grid.size());
  parallel_for(u_grid.size(), options.threads, [&](std::size_t i) {
    const double u = u_grid[i];
    const ApproxContext ctx = make_context(model, u);
    const double s = model.radial.survivor(u);
    Row& r = rows[i];
    r.t = ctx.t;
    r.exact = survivor_x(model, u);
    r.thm1 = thm1_survivor_approx(ctx, s);
    const bool power = ctx.law.closed_form_delta().has_value();
    r.thm3_default = power ? thm3_survivor_approx(ctx, s, Thm3Constant::Default) : kNaN;
    r.thm3_strict = power ? thm3_survivor_approx(ctx, s, Thm3Constant::Strict) : kNaN;
  });
  write_manifest(out, model_hash(model), resolve_seed(config, options));
  out << "u,t,exact,thm1,thm3_default,thm3_strict,ratio_thm1,ratio_thm3\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    write_row(out, {u_grid[i], r.t, r.exact, r.thm1, r.thm3_default, r.thm3_strict, r.exact / r.thm1,
                    r.exact / r.thm3_default});
  }
}

void cmd_cond_cdf(const Config& config, const RunOptions& options, std::ostream& out) {
  const PolarModel model = build_model(config);
  const std::vector<double> u_grid = config.grid("u_grid");
  const bool use_z = config.has("z_grid");
  if (use_z == config.has("y_grid")) throw ConfigError("cond-cdf needs exactly one of y_grid or z_grid");
  const std::vector<double> grid = config.grid(use_z ? "z_grid" : "y_grid");

  struct Row {
    double u, y, exact, limit, second;
  };
  std::vector<Row> rows(u_grid.size() * grid.size());
  parallel_for(u_grid.size(), options.threads, [&](std::size_t iu) {
    const double u = u_grid[iu];
    const ApproxContext ctx = make_context(model, u);
    const double sx = survivor_x(model, u);
    if (sx < 1e-300) throw NumericError("cond-cdf: P(X > u) underflows at u = " + format_number(u), sx);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double y = use_z ? conditional_threshold(ctx, grid[j]) : grid[j];
      const double z = use_z ? grid[j] : standardized_y(ctx, y);
      Row& r = rows[iu * grid.size() + j];
      r.u = u;
      r.y = y;
      r.exact = std::clamp(1.0 - joint_survivor(model, u, y) / sx, 0.0, 1.0);
      r.limit = ctx.law.cdf(z);
      r.second = model.rho >= 0.0 ? thm4_conditional_cdf(z, model.rho, ctx.t, ctx.law) : kNaN;
    }
  });
  write_manifest(out, model_hash(model), resolve_seed(config, options));
  out << "u,y,exact,limit,second_order,err_limit,err_2nd\n";
  for (const Row& r : rows) {
    write_row(out, {r.u, r.y, r.exact, r.limit, r.second, std::abs(r.limit - r.exact), std::abs(r.second - r.exact)});
  }
}

void cmd_simulate(const Config& config, const RunOptions& options, std::ostream& out) {
  const PolarModel model = build_model(config);
  const std::uint64_t n = config.count("n", 0);
  if (n == 0) throw ConfigError("simulate needs n >= 1");
  const std::uint64_t seed = resolve_seed(config, options);
  const SampleBatch batch = sample_polar(model, n, seed, config.count("stream", 0), options.threads);
  write_manifest(out, batch.model_hash, seed);
  write_xy_csv(out, batch.pairs);
}

void cmd_estimate(const Config& config, const RunOptions& options, std::ostream& out) {
  const std::filesystem::path input = config.path("input");
  std::ifstream in(input);
  if (!in) throw DataError("cannot open input CSV " + input.string(), 0);
  const std::vector<XY> pairs = read_xy_csv(in);
  const std::size_t n = pairs.size();
  const std::size_t k = config.count("k", std::max<std::size_t>(50, n / 100));
  const double tail_fraction = config.number("tail_fraction", 0.05);

  EstimatorReport report;
  report.n = n;
  const RhoEstimate rho = estimate_rho(pairs, k);
  report.rho_hat = rho.rho;
  report.k_used = rho.k;
  report.rho_clipped = rho.clipped;

  std::vector<double> xs;
  xs.reserve(n);
  for (const XY& p : pairs) xs.push_back(p.x);
  const WParams w = estimate_w_params(xs, tail_fraction);
  report.c_hat = w.c;
  report.gamma_hat = w.gamma;
  report.w_points = w.points;
  report.w_residual_rms = w.residual_rms;

  const DeltaEstimate delta = config.has("delta") ? estimate_delta_provided(config.number("delta"))
                                                  : estimate_delta(reconstruct_angles(pairs, report.rho_hat));
  report.delta_hat = delta.delta;
  report.delta_source = delta.source;

  // The report inherits the sample's provenance unless a seed is given explicitly.
  const InputManifest source = read_manifest(input);
  const std::uint64_t seed = options.seed ? *options.seed
                             : config.has("seed") ? config.count("seed", kDefaultSeed)
                                                  : source.seed.value_or(kDefaultSeed);
  write_manifest(out, source.hash, seed);
  out << report.serialize();
}

int cmd_validate(const Config& config, const RunOptions& options, std::ostream& out) {
  const PolarModel model = build_model(config);
  const RadialModel& radial = model.radial;
  const AngularModel& angular = model.angular;
  const std::uint64_t seed = resolve_seed(config, options);

  struct Check {
    std::string name;
    double value;
    double limit;
    bool passed;
  };
  std::vector<Check> checks;
  auto at_most = [&](std::string name, double value, double limit) {
    checks.push_back({std::move(name), value, limit, value <= limit});
  };

  // Radial law.
  at_most("radial.survivor_at_zero", std::abs(radial.survivor(0.0) - 1.0), 0.0);
  {
    const double top = radial.quantile(1e-12);
    double worst = 0.0;
    double prev = radial.survivor(0.0);
    for (int i = 1; i <= 400; ++i) {
      const double s = radial.survivor(top * i / 400.0);
      worst = std::max(worst, s - prev);
      prev = s;
    }
    at_most("radial.survivor_nonincreasing", worst, 0.0);
  }
  {
    double worst = 0.0;
    for (double p = 1e-2; p >= 1e-12; p /= 10.0) {
      const double u = radial.quantile(p);
      if (u > radial.u0()) worst = std::max(worst, std::abs(radial.survivor(u) / p - 1.0));
    }
    at_most("radial.quantile_roundtrip", worst, 1e-10);
  }
  {
    double worst = 0.0;
    for (double x : {0.5, 1.0, 2.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double u : {5.0, 10.0, 20.0, 40.0}) {
        const double gap = std::abs(radial.mda_ratio_diagnostic(u, x) - std::exp(-x));
        worst = std::max(worst, gap - prev);
        prev = gap;
      }
    }
    at_most("radial.mda_gap_nonincreasing", worst, 1e-14);
  }
  if (radial.kotz_params()) {
    double worst = 0.0;
    const double u = 50.0;
    const double w = radial.scaling_w(u);
    for (int i = 0; i <= 40; ++i) {
      const double z = -2.0 + 0.1 * i;
      worst = std::max(worst, std::abs(radial.scaling_w(u + z / w) / w - 1.0));
    }
    at_most("radial.self_neglecting_u50", worst, 0.05);
  }
  if (radial.second_order()) {
    std::vector<double> us;
    std::vector<double> xs;
    for (double u = 2.0; u <= 200.0; u *= 1.25) us.push_back(u);
    for (int i = 0; i <= 60; ++i) xs.push_back(0.25 * i);
    at_most("radial.second_order_bound", second_order_violation(radial, us, xs), 0.0);
  }

  // Angular law.
  at_most("angular.normalization", normalization_error(angular), 1e-10);
  {
    double worst = 0.0;
    for (int i = 1; i < 200; ++i) {
      const double th = 0.5 * std::numbers::pi * i / 200.0;
      const double a = angular.density(th);
      const double b = angular.density(-th);
      if (a != b) worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
    at_most("angular.symmetry", worst, 0.0);
  }
  {
    std::vector<double> zs;
    for (double z = 1e-3; z <= 1e3; z *= 1.2) zs.push_back(z);
    const bool ok = psi_growth_holds(angular.local_profile(), zs);
    checks.push_back({"angular.psi_growth", ok ? 0.0 : 1.0, 0.0, ok});
  }
  {
    const double two_delta = 2.0 * angular.local_profile().delta;
    double worst = 0.0;
    for (double s : {0.5, 2.0}) {
      double prev = std::numeric_limits<double>::infinity();
      for (double t : {1e-2, 1e-3, 1e-4}) {
        const double gap = std::abs(regular_variation_ratio(angular, t, s) - std::pow(s, two_delta));
        worst = std::max(worst, gap - prev);
        prev = gap;
      }
    }
    at_most("angular.regular_variation_nonincreasing", worst, 1e-12);
  }
  {
    double worst = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (double t : {1e2, 1e4, 1e6}) {
      double gap = 0.0;
      for (int i = 0; i <= 50; ++i) gap = std::max(gap, psi_consistency_gap(angular, t, 0.1 * std::pow(100.0, i / 50.0)));
      worst = std::max(worst, gap - prev);
      prev = gap;
    }
    at_most("angular.psi_consistency_nonincreasing", worst, 1e-12);
  }
  if (angular.second_order()) {
    std::vector<double> ts;
    std::vector<double> zs;
    for (double t = 10.0; t <= 1e6; t *= 2.0) ts.push_back(t);
    for (int i = 0; i <= 50; ++i) zs.push_back(0.1 * std::pow(100.0, i / 50.0));
    at_most("angular.second_order_bound", angular_second_order_violation(angular, ts, zs), 0.0);
  }
  {
    double worst = std::abs(angular.cdf(-std::numbers::pi)) + std::abs(angular.cdf(std::numbers::pi) - 1.0);
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double c = angular.cdf(-std::numbers::pi + 2.0 * std::numbers::pi * i / 1000.0);
      worst = std::max(worst, prev - c);
      prev = c;
    }
    at_most("angular.cdf_monotone_endpoints", worst, 0.0);
  }

  // Exact probabilities.
  const double p_target = 0.01;
  double u_p = 0.0;
  {
    double lo = 1e-6;
    double hi = radial.quantile(p_target);
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (survivor_x(model, mid) > p_target) lo = mid; else hi = mid;
    }
    u_p = 0.5 * (lo + hi);
  }
  {
    double worst = 0.0;
    for (double x : {0.5 * u_p, u_p, 2.0 * u_p}) {
      const double sx = survivor_x(model, x);
      for (double y : {-2.0 * x, -0.5 * x, 0.0, 0.3 * x, x, 1.5 * x}) {
        const double j = joint_survivor(model, x, y);
        worst = std::max({worst, -j, j - sx});
      }
    }
    at_most("exact.joint_bounds", worst, 1e-15);
  }
  if (model.rho > 0.0) {
    const double x = u_p;
    const double above = joint_survivor_ratio_above(model, x, model.rho * x * (1.0 + 1e-9));
    const double below = joint_survivor_ratio_below(model, x, model.rho * x * (1.0 - 1e-9));
    at_most("exact.branch_continuity", std::abs(above - below), 1e-7);
  }
  {
    double worst = 0.0;
    for (double y : {0.25 * u_p, 0.5 * u_p, 0.9 * u_p}) {
      const double a = joint_survivor(model, u_p, y);
      const double b = joint_survivor_general(model, u_p, y);
      worst = std::max(worst, std::abs(a - b) / std::max(b, 1e-300));
    }
    at_most("exact.branches_vs_general", worst, 1e-7);
  }
  {
    double worst = 0.0;
    double prev = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double y = model.rho * u_p + (-4.0 + 8.0 * i / 99.0) * std::max(1.0, u_p);
      const double c = conditional_cdf(model, u_p, y);
      worst = std::max(worst, prev - c);
      prev = c;
    }
    at_most("exact.conditional_cdf_monotone", worst, 1e-12);
  }

  // Asymptotics.
  const ApproxContext ctx = make_context(model, std::max(u_p, 1.0));
  {
    double worst = 0.0;
    if (ctx.law.closed_form_delta()) {
      for (int i = 0; i <= 120; ++i) {
        const double z = -6.0 + 0.1 * i;
        worst = std::max(worst, std::abs(ctx.law.cdf(z) - ctx.law.numeric_cdf(z)));
      }
    }
    at_most("asym.limit_law_closed_vs_numeric", worst, 1e-8);
  }
  if (ctx.law.closed_form_delta()) {
    const double s = radial.survivor(ctx.u);
    const double a = thm1_survivor_approx(ctx, s);
    const double b = thm3_survivor_approx(ctx, s, Thm3Constant::Default);
    at_most("asym.thm1_equals_thm3_default", std::abs(a - b) / a, 1e-12);
  }
  {
    double worst = 0.0;
    for (int i = 0; i <= 40; ++i) {
      const double z = -4.0 + 0.2 * i;
      worst = std::max(worst, std::abs(thm4_second_order(z, 0.0, ctx.t, ctx.law) - (1.0 - ctx.law.cdf(z))));
    }
    at_most("asym.thm4_rho0_reduces", worst, 0.0);
  }

  // Sampling.
  {
    const SampleBatch a = sample_polar(model, 1000, seed, 0, options.threads);
    const SampleBatch b = sample_polar(model, 1000, seed, 0, 1);
    bool same = true;
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
      same = same && a.pairs[i].x == b.pairs[i].x && a.pairs[i].y == b.pairs[i].y;
    }
    checks.push_back({"sampling.reproducible", same ? 0.0 : 1.0, 0.0, same});
  }
  {
    const std::size_t n = config.count("n", 200000);
    const SampleBatch batch = sample_polar(model, n, seed, 0, options.threads);
    const double p = survivor_x(model, u_p);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    at_most("sampling.survivor_within_4se", std::abs(empirical_survivor(batch.pairs, u_p) - p) / se, 4.0);
  }

  // Estimation.
  if (const auto kp = radial.kotz_params(); kp && kp->N == 0.0 && ctx.law.closed_form_delta()) {
    EstimatorReport report;
    report.rho_hat = model.rho;
    report.c_hat = kp->r;
    report.gamma_hat = kp->kappa;
    report.delta_hat = *ctx.law.closed_form_delta();
    double worst = 0.0;
    const double x = ctx.u;
    const double w = radial.scaling_w(x);
    const double scale = std::sqrt((1.0 - model.rho) * (1.0 + model.rho) * x / w);
    for (int i = 0; i <= 20; ++i) {
      const double y = model.rho * x + (-3.0 + 0.3 * i) * scale;
      const double expected = ctx.law.cdf((y - model.rho * x) / scale);
      worst = std::max(worst, std::abs(psi_hat(report, x, y, PsiHatVariant::Centered) - expected));
    }
    at_most("estimation.psi_hat_plugin_exact", worst, 1e-15);
  }

  write_manifest(out, model_hash(model), seed);
  out << "check,passed,value,limit\n";
  int failures = 0;
  for (const Check& c : checks) {
    out << c.name << ',' << (c.passed ? "true" : "false") << ',' << format_number(c.value) << ','
        << format_number(c.limit) << '\n';
    if (!c.passed) ++failures;
  }
  return failures;
}

}  // namespace polar::cli
