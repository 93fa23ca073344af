#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "polar_tails/errors.hpp"
#include "polar_tails/radial.hpp"

using polar::KotzRadialParams;
using polar::RadialModel;

namespace {

RadialModel kotz(double K, double N, double r, double kappa) { return RadialModel::kotz({K, N, r, kappa}); }

std::vector<RadialModel> shipped() {
  return {kotz(1, 0, 1, 1), kotz(1, 0, 1, 2), kotz(1, 0, 1, 3), kotz(2, 1, 1, 2),
          kotz(0.5, -1, 2, 1.5), kotz(3, 2, 0.5, 0.7), RadialModel::chi2df()};
}

// Root of f on [lo, hi] by plain bisection.
template <class F>
double bisect(F f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(RadialSurvivor, ClosedFormExamples) {
  EXPECT_NEAR(kotz(1, 0, 1, 1).survivor(1.0), std::exp(-1.0), 1e-16);
  EXPECT_NEAR(RadialModel::chi2df().survivor(2.0), std::exp(-2.0), 1e-16);
  EXPECT_EQ(kotz(1, 0, 1, 2).survivor(0.0), 1.0);
}

TEST(RadialSurvivor, KotzTailAboveThreshold) {
  const RadialModel m = kotz(2, 1, 1, 2);
  for (double u : {1.5, 2.0, 4.0}) EXPECT_NEAR(m.survivor(u), 2.0 * u * std::exp(-u * u), 1e-15);
  EXPECT_NEAR(m.log_survivor(40.0), std::log(80.0) - 1600.0, 1e-9);
}

TEST(RadialSurvivor, KotzThresholdIsContinuous) {
  for (const RadialModel& m : shipped()) {
    const double u0 = m.u0();
    if (u0 <= 0.0) continue;
    EXPECT_NEAR(m.survivor(u0 * (1 - 1e-12)), m.survivor(u0 * (1 + 1e-12)), 1e-9) << m.descriptor();
  }
}

TEST(RadialSurvivor, InvariantsOnEveryFamily) {
  for (const RadialModel& m : shipped()) {
    EXPECT_EQ(m.survivor(0.0), 1.0) << m.descriptor();
    double prev = 1.0;
    for (double u = 0.0; u < 30.0; u += 0.01) {
      const double s = m.survivor(u);
      ASSERT_LE(s, prev) << m.descriptor() << " u=" << u;
      ASSERT_GE(s, 0.0);
      prev = s;
    }
    EXPECT_LT(m.log_survivor(1e4), -100.0) << m.descriptor();
    double prev_t = 0.0;
    for (double u = 10.0; u < 1e4; u *= 2.0) {
      EXPECT_GT(m.scaling_w(u), 0.0);
      EXPECT_GT(m.t_of(u), prev_t);
      prev_t = m.t_of(u);
    }
  }
}

TEST(RadialScaling, Examples) {
  EXPECT_DOUBLE_EQ(kotz(1, 0, 1, 2).scaling_w(3.0), 6.0);
  EXPECT_DOUBLE_EQ(RadialModel::chi2df().scaling_w(2.0), 2.0);
  EXPECT_DOUBLE_EQ(kotz(1, 0, 2, 1).scaling_w(5.0), 2.0);
  EXPECT_THROW(kotz(1, 0, 1, 2).scaling_w(0.0), std::domain_error);
  EXPECT_THROW(kotz(1, 0, 1, 2).scaling_w(-1.0), std::domain_error);
}

TEST(RadialQuantile, Examples) {
  EXPECT_NEAR(kotz(1, 0, 1, 1).quantile(std::exp(-1.0)), 1.0, 1e-12);
  EXPECT_NEAR(RadialModel::chi2df().quantile(std::exp(-2.0)), 2.0, 1e-12);
  const double root = bisect([](double u) { return 2.0 * u * std::exp(-u * u) - 0.5; }, 1.0, 3.0);
  EXPECT_NEAR(kotz(2, 1, 1, 2).quantile(0.5), root, 1e-12 * root);
}

TEST(RadialQuantile, InvertsSurvivorPastThreshold) {
  for (const RadialModel& m : shipped()) {
    for (double p = 0.3; p > 1e-250; p *= 1e-3) {
      const double u = m.quantile(p);
      if (u <= m.u0()) continue;
      EXPECT_NEAR(m.survivor(u) / p, 1.0, 1e-10) << m.descriptor() << " p=" << p;
    }
    for (double lp : {-10.0, -800.0, -5000.0}) {
      const double u = m.quantile_log(lp);
      EXPECT_NEAR(m.log_survivor(u), lp, 1e-10 * std::abs(lp)) << m.descriptor();
    }
  }
}

TEST(RadialQuantile, RejectsOutOfRange) {
  const RadialModel m = RadialModel::chi2df();
  EXPECT_THROW(m.quantile(0.0), std::domain_error);
  EXPECT_THROW(m.quantile(1.0), std::domain_error);
  EXPECT_THROW(m.quantile_log(0.0), std::domain_error);
}

TEST(RadialMda, Examples) {
  EXPECT_NEAR(kotz(1, 0, 1, 1).mda_ratio_diagnostic(10.0, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(RadialModel::chi2df().mda_ratio_diagnostic(20.0, 1.0), std::exp(-1.0 - 1.0 / 800.0), 1e-13);
  for (const RadialModel& m : shipped()) EXPECT_DOUBLE_EQ(m.mda_ratio_diagnostic(7.0, 0.0), 1.0);
}

TEST(RadialMda, GapDecreasesAlongThresholds) {
  for (const RadialModel& m : shipped()) {
    for (double x : {0.5, 1.0, 2.0}) {
      double prev = INFINITY;
      for (double u : {5.0, 10.0, 20.0, 40.0}) {
        const double gap = std::abs(m.mda_ratio_diagnostic(u, x) - std::exp(-x));
        EXPECT_LE(gap, prev + 1e-15) << m.descriptor() << " x=" << x << " u=" << u;
        prev = gap;
      }
    }
  }
}

TEST(RadialScaling, SelfNeglecting) {
  for (double kappa : {1.0, 2.0, 3.0}) {
    const RadialModel m = kotz(1, 0, 1, kappa);
    const double u = 50.0;
    const double w = m.scaling_w(u);
    for (double z = -2.0; z <= 2.0; z += 0.25) EXPECT_LT(std::abs(m.scaling_w(u + z / w) / w - 1.0), 0.05);
  }
}

TEST(RadialSecondOrder, BoundHoldsOnGrid) {
  std::vector<double> us;
  std::vector<double> xs;
  for (double u = 1.0; u <= 500.0; u *= 1.1) us.push_back(u);
  for (double x = 0.0; x <= 30.0; x += 0.1) xs.push_back(x);
  for (double kappa : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    const RadialModel m = kotz(1, 0, 1, kappa);
    ASSERT_TRUE(m.second_order().has_value()) << kappa;
    EXPECT_EQ(polar::second_order_violation(m, us, xs), 0.0) << "kappa=" << kappa;
  }
  EXPECT_EQ(polar::second_order_violation(RadialModel::chi2df(), us, xs), 0.0);
  EXPECT_FALSE(kotz(2, 1, 1, 2).second_order().has_value());
}

TEST(RadialModel, RejectsBadParameters) {
  EXPECT_THROW(kotz(0, 0, 1, 1), polar::ConfigError);
  EXPECT_THROW(kotz(1, 0, -1, 1), polar::ConfigError);
  EXPECT_THROW(kotz(1, 0, 1, 0), polar::ConfigError);
}

TEST(RadialModel, CustomLawUsesBisectionQuantile) {
  const RadialModel m = RadialModel::custom([](double u) { return std::exp(-u * u * u); },
                                            [](double u) { return 3.0 * u * u; });
  EXPECT_EQ(m.family(), polar::RadialFamily::Custom);
  EXPECT_NEAR(m.quantile(std::exp(-8.0)), 2.0, 1e-11);
  EXPECT_DOUBLE_EQ(m.scaling_w(2.0), 12.0);
}

TEST(RadialModel, DescriptorsDistinguishParameters) {
  EXPECT_NE(kotz(1, 0, 1, 1).descriptor(), kotz(1, 0, 1, 2).descriptor());
  EXPECT_EQ(kotz(1, 0, 1, 1).descriptor(), kotz(1, 0, 1, 1).descriptor());
}
