#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mtfrac/specfun.hpp"

using namespace mtfrac;

namespace {

long double factorial(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// E_{1/2,1}(x) = exp(x^2) erfc(-x)
double ml_half(double x) { return std::exp(x * x) * std::erfc(-x); }

}  // namespace

TEST(Multinomial, SmallValues) {
  EXPECT_EQ(multinomial_coefficient(3, std::vector{1, 1, 1}), Uint128{6});
  EXPECT_EQ(multinomial_coefficient(5, std::vector{5, 0}), Uint128{1});
  EXPECT_EQ(multinomial_coefficient(4, std::vector{2, 2}), Uint128{6});
  EXPECT_EQ(multinomial_coefficient(0, std::vector{0, 0, 0}), Uint128{1});
}

TEST(Multinomial, NegativePartIsZero) {
  EXPECT_EQ(multinomial_coefficient(2, std::vector{3, -1}), Uint128{0});
  EXPECT_THROW(multinomial_coefficient(2, std::vector{4, -2}), DomainError);
  EXPECT_THROW(multinomial_coefficient(3, std::vector{1, 1}), DomainError);
}

TEST(Multinomial, MatchesFactorialFormula) {
  for (int m = 1; m <= 4; ++m) {
    for (int k = 0; k <= 12; ++k) {
      std::vector<int> parts(static_cast<std::size_t>(m), 0);
      parts[0] = k;
      do {
        long double expect = factorial(k);
        for (int p : parts) expect /= factorial(p);
        EXPECT_EQ(static_cast<long double>(multinomial_coefficient(k, parts)), std::round(expect));
      } while (next_composition(parts));
    }
  }
}

TEST(Multinomial, RecurrenceExact) {
  for (int m = 1; m <= 4; ++m) {
    for (int k = 1; k <= 12; ++k) {
      std::vector<int> parts(static_cast<std::size_t>(m), 0);
      parts[0] = k;
      do {
        Uint128 sum = 0;
        for (std::size_t j = 0; j < parts.size(); ++j) {
          auto lowered = parts;
          lowered[j] -= 1;
          sum += multinomial_coefficient(k - 1, lowered);
        }
        EXPECT_TRUE(sum == multinomial_coefficient(k, parts));
      } while (next_composition(parts));
    }
  }
}

TEST(Multinomial, OverflowIsReported) {
  EXPECT_NO_THROW(multinomial_coefficient(60, std::vector{15, 15, 15, 15}));
  EXPECT_THROW(multinomial_coefficient(200, std::vector{50, 50, 50, 50}), OverflowError);
}

TEST(Composition, EnumeratesEachOnce) {
  // C(k+m-1, m-1) compositions of k into m parts
  std::vector<int> parts{7, 0, 0};
  int count = 1;
  while (next_composition(parts)) {
    EXPECT_EQ(parts[0] + parts[1] + parts[2], 7);
    ++count;
  }
  EXPECT_EQ(count, 36);
  EXPECT_EQ(parts, (std::vector<int>{0, 0, 7}));
}

TEST(Series, ZeroArgumentsGiveReciprocalGamma) {
  const MLParams p(1.0, {0.4, 0.2});
  const auto r = mml_series(p, MLArgs{0.0, 0.0});
  EXPECT_DOUBLE_EQ(r.value.real(), 1.0);
  EXPECT_EQ(r.method, EvalMethod::Series);
  const MLParams q(0.5, {0.7});
  EXPECT_NEAR(mml_series(q, MLArgs{0.0}).value.real(), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
}

TEST(Series, ClassicalHalfOrder) {
  const MLParams p(1.0, {0.5});
  for (double x : {-1.0, -0.3, 0.5, -2.5}) {
    const auto r = mml_series(p, MLArgs{x});
    EXPECT_LE(std::abs(r.value.real() - ml_half(x)), r.abs_error_estimate) << x;
    EXPECT_LT(r.abs_error_estimate, 1e-10 * std::max(1.0, std::abs(ml_half(x))));
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-300);
  }
  EXPECT_NEAR(mml_series(p, MLArgs{-1.0}).value.real(), 0.42758357615580700441, 4e-15);
}

TEST(Series, TwoTermFrozenValue) {
  // 25-digit reference: 0.3962122366410500187850106
  const MLParams p(1.0, {0.8, 0.3});
  const auto r = mml_series(p, MLArgs{-0.7, -0.4});
  EXPECT_NEAR(r.value.real(), 0.39621223664105001879, 4e-15);
  EXPECT_LT(r.abs_error_estimate, 1e-12);
  EXPECT_GE(r.abs_error_estimate, 0.0);
}

TEST(Series, NonConvergenceCarriesPartialSum) {
  const MLParams p(1.0, {0.5});
  try {
    (void)mml_series(p, MLArgs{-30.0}, 1e-14, 5);
    FAIL() << "expected SeriesNotConverged";
  } catch (const SeriesNotConverged& e) {
    EXPECT_EQ(e.shells(), 6);
    EXPECT_TRUE(std::isfinite(e.partial_sum().real()));
  }
}

TEST(Series, RejectsBadArguments) {
  const MLParams p(1.0, {0.5});
  EXPECT_THROW(mml_series(p, MLArgs{0.0, 0.0}), DomainError);
  EXPECT_THROW(mml_series(p, MLArgs{0.0}, 0.0), DomainError);
  EXPECT_THROW(mml_series(p, MLArgs{0.0}, 1e-14, 0), DomainError);
  EXPECT_THROW(MLParams(2.0, {0.5}), DomainError);
  EXPECT_THROW(MLParams(1.0, {1.0}), DomainError);
  EXPECT_THROW(MLParams(1.0, {}), DomainError);
}

TEST(Contour, MatchesClassicalHalfOrder) {
  const MLParams p(1.0, {0.5});
  const auto cfg = ContourConfig::defaults(0.5);
  for (double x : {-0.5, -3.0, -10.0, -25.0}) {
    const auto r = mml_contour(p, MLArgs{x}, cfg);
    EXPECT_NEAR(r.value.real(), ml_half(x), 1e-12 * std::abs(ml_half(x)) + 1e-15) << x;
    EXPECT_EQ(r.method, EvalMethod::Contour);
  }
}

TEST(Contour, AgreesWithSeriesOnOverlap) {
  struct Case {
    double beta0;
    std::vector<double> alphas;
    std::vector<double> qs;
  };
  const std::vector<Case> cases = {
      {1.0, {0.8, 0.3}, {1.0, 0.5}},
      {1.8, {0.8, 0.3}, {1.0, 2.0}},
      {0.8, {0.9, 0.5, 0.2}, {1.0, 1.0, 0.7}},
      {1.5, {0.5}, {1.0}},
  };
  int compared = 0;
  for (const auto& c : cases) {
    const FracOrders orders(c.alphas, c.qs);
    const auto p = MLParams::solver_family(orders, c.beta0);
    for (double t : {0.5, 1.0, 2.0}) {
      for (double lambda : {0.5, 3.0, 8.0}) {
        MLArgs args;
        args.z.emplace_back(-lambda * std::pow(t, c.alphas[0]));
        for (std::size_t j = 1; j < c.alphas.size(); ++j) {
          args.z.emplace_back(-c.qs[j] * std::pow(t, c.alphas[0] - c.alphas[j]));
        }
        const auto s = mml_series(p, args);
        if (s.abs_error_estimate > 1e-10 * std::abs(s.value)) continue;  // cancellation: outside series reach
        const auto k = mml_contour(p, args, ContourConfig::defaults(c.alphas[0]));
        EXPECT_LT(std::abs(s.value - k.value), 1e-8 * std::abs(s.value)) << c.beta0 << " " << t << " " << lambda;
        ++compared;
      }
    }
  }
  EXPECT_GE(compared, 12);
}

TEST(Contour, MatchesIndependentLaplaceInversion) {
  // Talbot inversion of s^{alpha_1 - 1} / (s^0.8 + 0.5 s^0.3 + 8) at t = 1, 40 digits
  const FracOrders orders({0.8, 0.3}, {1.0, 0.5});
  const auto p = MLParams::solver_family(orders, 1.0);
  const auto r = mml_contour(p, MLArgs{-8.0, -0.5}, ContourConfig::defaults(0.8));
  EXPECT_NEAR(r.value.real(), 0.032456937309041785935, 1e-15);
}

TEST(Contour, DecaysLikeInverseArgument) {
  const MLParams p(0.5, {0.5});
  const auto cfg = ContourConfig::defaults(0.5);
  std::vector<double> scaled;
  for (double x : {1e3, 1e4, 1e5, 1e6}) {
    const auto r = mml_contour(p, MLArgs{-x}, cfg);
    scaled.push_back(std::abs(r.value) * x);
  }
  for (double s : scaled) {
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 2.0 * scaled.front());
  }
}

TEST(Contour, RefinementWithinErrorEstimate) {
  const FracOrders orders({0.7, 0.4}, {1.0, 2.0});
  const auto p = MLParams::solver_family(orders, 1.0);
  auto cfg = ContourConfig::defaults(0.7);
  const MLArgs args{-40.0, -3.0};
  const auto coarse = mml_contour(p, args, cfg);
  cfg.quad_points *= 2;
  const auto fine = mml_contour(p, args, cfg);
  EXPECT_LE(std::abs(fine.value - coarse.value), std::max(coarse.abs_error_estimate, 1e-16));
}

TEST(Contour, RadiusDoesNotMatter) {
  const FracOrders orders({0.6, 0.25}, {1.0, 4.0});
  const auto p = MLParams::solver_family(orders, 1.6);
  const MLArgs args{-1e3, -50.0};
  auto cfg = ContourConfig::defaults(0.6);
  const auto a = mml_contour(p, args, cfg);
  cfg.radius = 0.05;
  const auto b = mml_contour(p, args, cfg);
  cfg.radius = 3.0;
  const auto c = mml_contour(p, args, cfg);
  EXPECT_NEAR(a.value.real(), b.value.real(), 1e-10 * std::abs(a.value));
  EXPECT_NEAR(a.value.real(), c.value.real(), 1e-10 * std::abs(a.value));
}

TEST(Contour, RejectsUncoveredArguments) {
  const MLParams p(1.0, {0.5});
  const auto cfg = ContourConfig::defaults(0.5);
  EXPECT_THROW(mml_contour(p, MLArgs{cplx(10.0, 1.0)}, cfg), DomainError);
  const MLParams generic(1.0, {0.5, 0.6});  // not (a1, a1 - a2) with a2 > 0
  EXPECT_THROW(mml_contour(generic, MLArgs{-1.0, -1.0}, ContourConfig::defaults(0.5)), DomainError);
  auto bad = cfg;
  bad.theta = bad.mu + 0.01;
  EXPECT_THROW(mml_contour(p, MLArgs{-1.0}, bad), DomainError);
}

TEST(Dispatch, PicksMethodByReach) {
  const MLParams p(1.0, {0.5});
  EXPECT_EQ(mml_eval(p, MLArgs{-0.5}).method, EvalMethod::Series);
  EXPECT_EQ(mml_eval(p, MLArgs{-1e8}).method, EvalMethod::Contour);
  EXPECT_THROW(mml_eval(p, MLArgs{1e3}), DomainError);
}

TEST(Dispatch, MethodsAgreeNearCrossover) {
  const FracOrders orders({0.8, 0.3}, {1.0, 1.0});
  const auto p = MLParams::solver_family(orders, 1.0);
  for (double x = 1.0; x <= 64.0; x *= 1.25) {
    const MLArgs args{-x, -0.8};
    try {
      const auto s = mml_series(p, args, 1e-14, 4000);
      if (s.abs_error_estimate > 1e-10 * std::abs(s.value)) continue;  // series no longer reliable
      const auto k = mml_contour(p, args, ContourConfig::defaults(0.8));
      EXPECT_LT(std::abs(s.value - k.value), 1e-8 * std::abs(k.value)) << x;
    } catch (const SeriesNotConverged&) {
    }
  }
}

TEST(Solver, ClassicalValue) {
  const FracOrders orders({0.5}, {1.0});
  EXPECT_NEAR(e_solver(1.0, orders, 1.0, 1.0), 0.4275835761558070, 1e-14);
  EXPECT_NEAR(e_solver(1.0, orders, 1.0, 1e-12), 1.0, 1e-5);
  EXPECT_THROW(e_solver(1.0, orders, 1.0, 0.0), DomainError);
}

TEST(Solver, BatchMatchesScalar) {
  const FracOrders orders({0.9, 0.5, 0.2}, {1.0, 0.3, 2.0});
  std::vector<double> lambdas;
  for (int n = 1; n <= 60; ++n) lambdas.push_back(0.9 * n * n);
  for (double t : {0.01, 0.7, 5.0}) {
    const auto batch = e_solver_batch(lambdas, orders, 1.0 + 0.9, t);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      EXPECT_DOUBLE_EQ(batch[i], e_solver(lambdas[i], orders, 1.9, t));
    }
  }
}

TEST(Solver, BoundForLargeArgument) {
  const FracOrders orders({0.7, 0.3}, {1.0, 1.5});
  double worst = 0.0;
  for (double x : log_grid(1.0, 1e8, 40)) {
    const double lambda = x;  // t = 1
    worst = std::max(worst, (1.0 + x) * std::abs(e_solver(lambda, orders, 1.7, 1.0)));
  }
  EXPECT_TRUE(std::isfinite(worst));
  EXPECT_LT(worst, 10.0);
}

TEST(Identity, ZeroArgumentsExact) {
  const MLParams p(0.7, {0.3, 0.6});
  EXPECT_EQ(ml_identity_residual(p, MLArgs{0.0, 0.0}), 0.0);
}

TEST(Identity, SingleTermClassical) {
  const MLParams p(1.0, {0.5});
  for (double x : {-2.0, -0.5, 1.0}) EXPECT_LT(ml_identity_residual(p, MLArgs{x}), 1e-12);
}

TEST(Identity, RandomizedArguments) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    // arguments drawn from the l1 ball sum |z_j| <= 2, which keeps every
    // coordinate within |z_j| <= 2 and the series within double-precision reach
    const int m = 1 + static_cast<int>(unit(rng) * 3.999);
    std::vector<double> betas;
    std::vector<double> share;
    for (int j = 0; j < m; ++j) share.push_back(-std::log(1.0 - unit(rng)));
    double total = 0.0;
    for (double s : share) total += s;
    const double radius = 2.0 * unit(rng);
    std::vector<cplx> z;
    for (int j = 0; j < m; ++j) {
      betas.push_back(0.25 + 0.7 * unit(rng));
      z.push_back(std::polar(radius * share[j] / total, 2.0 * std::numbers::pi * unit(rng)));
    }
    const MLParams p(0.1 + 1.85 * unit(rng), betas);
    EXPECT_LT(ml_identity_residual(p, MLArgs(z)), 1e-10) << trial;
  }
}

TEST(Positivity, KernelIsPositive) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double a1 = 0.2 + 0.75 * unit(rng);
    const double a2 = a1 * (0.1 + 0.8 * unit(rng));
    const FracOrders orders({a1, a2}, {1.0, 0.1 + 5.0 * unit(rng)});
    const double lambda = std::exp(std::log(1e4) * unit(rng));
    const double t = std::exp(std::log(1e-3) + std::log(1e6) * unit(rng));
    EXPECT_GT(std::pow(t, a1 - 1.0) * e_solver(lambda, orders, a1, t), 0.0) << trial;
  }
}
