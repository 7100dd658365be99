#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mtfrac/gamma.hpp"

using namespace mtfrac;

TEST(Gamma, ExactPoints) {
  EXPECT_NEAR(gamma_fn(1.0), 1.0, 1e-15);
  EXPECT_NEAR(gamma_fn(2.0), 1.0, 1e-15);
  EXPECT_NEAR(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(gamma_fn(5.0), 24.0, 24.0 * 1e-14);
}

TEST(Gamma, MatchesLibmOnWorkingStrip) {
  double worst = 0.0;
  for (int i = 1; i <= 4000; ++i) {
    const double x = 0.001 * i + 0.0003;  // (0, 4]
    const double rel = std::abs(gamma_fn(x) / std::tgamma(x) - 1.0);
    worst = std::max(worst, rel);
  }
  EXPECT_LT(worst, 1e-13);
}

TEST(Gamma, LogGammaForLargeArguments) {
  for (double x : {10.0, 50.5, 170.0, 400.0, 1500.25}) {
    EXPECT_NEAR(lgamma_fn(x), std::lgamma(x), 1e-13 * std::abs(std::lgamma(x)));
  }
}

TEST(Gamma, ReciprocalVanishesAtPoles) {
  EXPECT_EQ(rgamma(0.0), 0.0);
  EXPECT_EQ(rgamma(-3.0), 0.0);
  EXPECT_NEAR(rgamma(-0.5), 1.0 / std::tgamma(-0.5), 1e-14);
  EXPECT_GT(rgamma(175.0), 0.0);
  EXPECT_LT(rgamma(175.0), 1e-300);
}

TEST(Gamma, ExtendedRangeReciprocal) {
  for (double x : {175.5, 480.25, 1500.0}) {
    EXPECT_NEAR(static_cast<double>(std::log(rgamma_ld(x))), -std::lgamma(x), 1e-13 * std::lgamma(x));
  }
  EXPECT_EQ(rgamma_ld(3.0), static_cast<long double>(rgamma(3.0)));
}

TEST(Gamma, MinimumConstants) {
  EXPECT_NEAR(gamma_fn(kGammaArgMin), kGammaMin, 1e-15);
  EXPECT_GT(gamma_fn(kGammaArgMin - 0.01), kGammaMin);
  EXPECT_GT(gamma_fn(kGammaArgMin + 0.01), kGammaMin);
}
