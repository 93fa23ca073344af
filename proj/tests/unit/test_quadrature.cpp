#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "polar_tails/quadrature.hpp"

namespace q = polar::quad;

TEST(GaussKronrod, IntegratesPolynomialsExactly) {
  // 21-point Kronrod is exact up to degree 31.
  const auto r = q::gauss_kronrod([](double x) { return std::pow(x, 20) - 3.0 * x * x + 1.0; }, -1.0, 2.0);
  const double exact = (std::pow(2.0, 21) + 1.0) / 21.0 - (8.0 + 1.0) + 3.0;
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, exact, 1e-12 * exact);
}

TEST(GaussKronrod, ReversedIntervalFlipsSign) {
  auto f = [](double x) { return std::exp(x); };
  const auto fwd = q::gauss_kronrod(f, 0.0, 1.0);
  const auto bwd = q::gauss_kronrod(f, 1.0, 0.0);
  EXPECT_NEAR(fwd.value, std::numbers::e - 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(bwd.value, -fwd.value);
}

TEST(GaussKronrod, EmptyIntervalIsZero) {
  const auto r = q::gauss_kronrod([](double) { return 1.0; }, 3.0, 3.0);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.converged);
}

TEST(GaussKronrod, AdaptsToPeakedIntegrand) {
  const auto r = q::gauss_kronrod([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, {0.0, 1e-12});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0 * std::atan(1.0 / 1e-2) / 1e-2, 1e-9);
}

TEST(TanhSinh, HandlesInverseSquareRootEndpoint) {
  const auto r = q::tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {0.0, 1e-12});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-11);
}

TEST(TanhSinh, HandlesBothEndpointsSingular) {
  // integral of 1/sqrt(1 - x^2) over (-1, 1) = pi. Abscissae within one ulp of +-1 are not
  // representable, so the mass missed there is about 2 sqrt(2 * 2^-53) ~ 4e-8.
  const auto r = q::tanh_sinh([](double x) { return 1.0 / std::sqrt((1.0 - x) * (1.0 + x)); }, -1.0, 1.0);
  EXPECT_NEAR(r.value, std::numbers::pi, 5e-8);
  // The same integral with the singularities at the origin is limited only by the rule.
  const auto s = q::tanh_sinh([](double x) { return 1.0 / std::sqrt(x * (2.0 - x)); }, 0.0, 1.0);
  EXPECT_NEAR(s.value, 0.5 * std::numbers::pi, 1e-10);
}

TEST(ExpSinh, HalfLineIntegrals) {
  EXPECT_NEAR(q::exp_sinh([](double x) { return std::exp(-x); }, 0.0).value, 1.0, 1e-12);
  EXPECT_NEAR(q::exp_sinh([](double x) { return std::exp(-x) / std::sqrt(x); }, 0.0).value,
              std::sqrt(std::numbers::pi), 1e-10);
  EXPECT_NEAR(q::exp_sinh([](double x) { return std::exp(-x * x / 2.0); }, 1.0).value,
              std::sqrt(std::numbers::pi / 2.0) * std::erfc(1.0 / std::numbers::sqrt2), 1e-12);
}
