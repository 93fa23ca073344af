#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>

#include "polar_tails/special_functions.hpp"

TEST(IncompleteGamma, MatchesBoostOnGrid) {
  for (double a : {0.25, 0.5, 1.0, 1.5, 2.5, 7.0, 30.0}) {
    for (double x : {1e-6, 0.01, 0.3, 1.0, 2.0, 5.0, 12.0, 40.0, 100.0}) {
      const double p = polar::gamma_p(a, x);
      const double q = polar::gamma_q(a, x);
      const double bp = boost::math::gamma_p(a, x);
      const double bq = boost::math::gamma_q(a, x);
      EXPECT_NEAR(p, bp, 1e-12 * std::max(bp, 1e-300) + 1e-300) << "a=" << a << " x=" << x;
      EXPECT_NEAR(q, bq, 1e-12 * std::max(bq, 1e-300) + 1e-300) << "a=" << a << " x=" << x;
    }
  }
}

TEST(IncompleteGamma, ComplementsSumToOne) {
  for (double a : {0.5, 3.0, 10.0}) {
    for (double x = 0.1; x < 30.0; x *= 1.7) EXPECT_NEAR(polar::gamma_p(a, x) + polar::gamma_q(a, x), 1.0, 1e-14);
  }
}

TEST(IncompleteGamma, HalfOrderIsErf) {
  for (double x : {0.1, 0.5, 1.0, 3.0}) EXPECT_NEAR(polar::gamma_p(0.5, x), std::erf(std::sqrt(x)), 1e-14);
}

TEST(IncompleteGamma, Boundaries) {
  EXPECT_EQ(polar::gamma_p(2.0, 0.0), 0.0);
  EXPECT_EQ(polar::gamma_q(2.0, 0.0), 1.0);
}
