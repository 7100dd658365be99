#include <cmath>
#include <numbers>
#include <thread>

#include <gtest/gtest.h>

#include "mtfrac/solver.hpp"

using namespace mtfrac;

namespace {

double ml_half(double x) { return std::exp(x * x) * std::erfc(-x); }
// E_{1/2,1/2}(x) = 1/sqrt(pi) + x exp(x^2) erfc(-x)
double ml_half_half(double x) { return 1.0 / std::sqrt(std::numbers::pi) + x * ml_half(x); }

Problem first_mode_problem(FracOrders orders, int n = 63) {
  auto op = Operator1D::laplacian(n);
  const auto s = eigendecompose(op);
  return Problem(std::move(orders), std::move(op), s.mode(0));
}

}  // namespace

TEST(ModeAmplitude, InitialValueAndClassicalCase) {
  const FracOrders single({0.5}, {1.0});
  EXPECT_EQ(mode_amplitude(single, 3.0, 0.0), 1.0);
  for (double t : {0.01, 0.5, 2.0, 30.0}) {
    for (double lambda : {0.3, 1.0, 3.0}) {
      const double expect = ml_half(-lambda * std::sqrt(t));
      EXPECT_NEAR(mode_amplitude(single, lambda, t), expect, 1e-12) << t << " " << lambda;
    }
  }
}

TEST(ModeAmplitude, LongTimeLeadingTerm) {
  const FracOrders orders({0.8, 0.4}, {1.0, 2.0});
  const double lambda = 3.0;
  double prev_gap = INFINITY;
  for (double t : {1e2, 1e3, 1e4, 1e5}) {
    const double scaled = mode_amplitude(orders, lambda, t) * lambda * gamma_fn(1.0 - 0.4) * std::pow(t, 0.4);
    const double gap = std::abs(scaled - 2.0);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 0.05);
}

TEST(ModeAmplitude, BatchMatchesScalar) {
  const FracOrders orders({0.7, 0.2}, {1.0, 0.5});
  const std::vector<double> lambdas{0.5, 2.0, 40.0, 900.0};
  const auto amp = mode_amplitudes(orders, lambdas, 0.8);
  for (std::size_t i = 0; i < lambdas.size(); ++i) EXPECT_DOUBLE_EQ(amp[i], mode_amplitude(orders, lambdas[i], 0.8));
}

TEST(Homogeneous, InitialValueAttained) {
  auto op = Operator1D::laplacian(63);
  const auto f = op.sample([](double x) { return x * (std::numbers::pi - x); });
  const Problem p(FracOrders({0.6, 0.3}, {1.0, 1.0}), op, f);
  EXPECT_LT((solve_homogeneous(p, 0.0) - f).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Homogeneous, FirstModeClassical) {
  const auto p = first_mode_problem(FracOrders({0.5}, {1.0}));
  const double l1 = p.spectrum->lambdas(0);
  for (double t : {0.1, 1.0, 5.0}) {
    const GridFunction expect = ml_half(-l1 * std::sqrt(t)) * p.spectrum->mode(0);
    EXPECT_LT((solve_homogeneous(p, t) - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Homogeneous, RejectsSource) {
  auto op = Operator1D::laplacian(15);
  const auto s = eigendecompose(op);
  Problem p(FracOrders({0.5}, {1.0}), op, GridFunction::Zero(15), SourceSamples::constant(s.mode(0), s));
  EXPECT_THROW(solve_homogeneous(p, 1.0), DomainError);
}

TEST(Source, ZeroSourceGivesZero) {
  auto op = Operator1D::laplacian(15);
  const auto s = eigendecompose(op);
  Problem p(FracOrders({0.5}, {1.0}), op, GridFunction::Zero(15), SourceSamples::constant(GridFunction::Zero(15), s));
  EXPECT_EQ(solve_source(p, 1.0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Source, ConstantFirstModeClosedForm) {
  for (const auto& orders : {FracOrders({0.5}, {1.0}), FracOrders({0.8, 0.3}, {1.0, 0.7})}) {
    auto op = Operator1D::laplacian(31);
    const auto s = eigendecompose(op);
    Problem p(orders, op, GridFunction::Zero(31), SourceSamples::constant(s.mode(0), s));
    const double l1 = s.lambdas(0);
    for (double t : {0.2, 1.0, 4.0}) {
      const auto c = source_coefficients(p, t);
      const double expect = (1.0 - mode_amplitude(orders, l1, t)) / l1;
      EXPECT_NEAR(c(0), expect, 1e-6 * expect) << t;
      EXPECT_LT(c.tail(c.size() - 1).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(Source, SampledConstantMatchesTimeIndependent) {
  auto op = Operator1D::laplacian(15);
  const auto s = eigendecompose(op);
  std::vector<GridFunction> frames(41, s.mode(1));
  const FracOrders orders({0.6}, {1.0});
  Problem a(orders, op, GridFunction::Zero(15), SourceSamples::from_grid(frames, 0.05, s));
  Problem b(orders, op, GridFunction::Zero(15), SourceSamples::constant(s.mode(1), s));
  EXPECT_LT((solve_source(a, 1.5) - solve_source(b, 1.5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Source, LinearInTimeMatchesConvolution) {
  // F_1(t) = t gives T(t) = int_0^t s^{a-1} E_{a,a}(-lambda s^a) (t - s) ds = t^{a+1} E_{a,a+2}(-lambda t^a),
  // and E_{a,a+2}(z) = (1/Gamma(2) - E_{a,2}(z)) / (-z) by the shift identity.
  auto op = Operator1D::laplacian(15);
  const auto s = eigendecompose(op);
  std::vector<GridFunction> frames;
  for (int k = 0; k <= 40; ++k) frames.push_back(0.05 * k * s.mode(0));
  const FracOrders orders({0.5}, {1.0});
  Problem p(orders, op, GridFunction::Zero(15), SourceSamples::from_grid(frames, 0.05, s));
  const double t = 2.0;
  const double lambda = s.lambdas(0);
  const double z = -lambda * std::sqrt(t);
  const double e2 = mml_series(MLParams(1.999999999999, {0.5}), MLArgs{z}).value.real();
  const double closed = std::pow(t, 1.5) * (1.0 - e2) / (-z);
  EXPECT_NEAR(source_coefficients(p, t)(0), closed, 1e-8 * std::abs(closed));
}

TEST(Source, UndersampledIsAnError) {
  auto op = Operator1D::laplacian(15);
  const auto s = eigendecompose(op);
  std::vector<GridFunction> frames(5, s.mode(0));
  Problem p(FracOrders({0.5}, {1.0}), op, GridFunction::Zero(15), SourceSamples::from_grid(frames, 0.5, s));
  EXPECT_THROW(solve_source(p, 3.0), DomainError);   // grid ends at 2
  EXPECT_THROW(solve_source(p, 0.75), DomainError);  // only 1.5 sample intervals
  EXPECT_NO_THROW(solve_source(p, 2.0));
}

TEST(TimeDerivative, ClassicalAndSign) {
  const auto p = first_mode_problem(FracOrders({0.5}, {1.0}));
  const double l1 = p.spectrum->lambdas(0);
  for (double t : {0.01, 0.3, 2.0}) {
    const double expect = -l1 * std::pow(t, -0.5) * ml_half_half(-l1 * std::sqrt(t));
    const GridFunction d = time_derivative(p, t);
    EXPECT_LT((d - expect * p.spectrum->mode(0)).cwiseAbs().maxCoeff(), 1e-10 * std::abs(expect));
    EXPECT_LT(project(d, *p.spectrum)(0), 0.0);
  }
  EXPECT_THROW(time_derivative(p, 0.0), DomainError);
}

TEST(TimeDerivative, CentralDifferenceSecondOrder) {
  auto op = Operator1D::laplacian(31);
  const auto f = op.sample([](double x) { return std::sin(x) + 0.2 * std::sin(2.0 * x); });
  const Problem p(FracOrders({0.7, 0.35}, {1.0, 0.8}), op, f);
  const double t = 0.6;
  const GridFunction exact = time_derivative(p, t);
  auto fd = [&](double h) {
    return ((solve_homogeneous(p, t + h) - solve_homogeneous(p, t - h)) / (2.0 * h) - exact).norm();
  };
  const double e1 = fd(0.02);
  const double e2 = fd(0.01);
  EXPECT_NEAR(std::log2(e1 / e2), 2.0, 0.2);
}

TEST(Caputo, ScalarSelfTest) {
  for (double beta : {0.2, 0.5, 0.9}) {
    for (double t : {0.3, 1.0, 4.0}) {
      const double got = caputo_scalar([](double) { return 1.0; }, 1.0, beta, t);
      EXPECT_NEAR(got, std::pow(t, 1.0 - beta) / gamma_fn(2.0 - beta), 1e-12) << beta << " " << t;
    }
  }
  // f = t^2, f' = 2 s
  EXPECT_NEAR(caputo_scalar([](double s) { return 2.0 * s; }, 1.0, 0.5, 1.5), 2.0 * std::pow(1.5, 1.5) / gamma_fn(2.5), 1e-12);
  // f = t^0.4, f' = 0.4 s^{-0.6}: d^beta f = Gamma(1.4)/Gamma(1.4 - beta) t^{0.4 - beta}
  EXPECT_NEAR(caputo_scalar([](double) { return 0.4; }, 0.4, 0.3, 2.0),
              gamma_fn(1.4) / gamma_fn(1.1) * std::pow(2.0, 0.1), 1e-12);
}

TEST(Caputo, SingleTermEquationResidual) {
  const auto p = first_mode_problem(FracOrders({0.5}, {1.0}));
  const double l1 = p.spectrum->lambdas(0);
  for (double t : {0.5, 1.0, 3.0}) {
    const GridFunction d = caputo_derivative(p, 0.5, t);
    const GridFunction u = solve_homogeneous(p, t);
    EXPECT_LT((d + l1 * u).norm(), 1e-4 * (l1 * u).norm()) << t;
  }
}

TEST(Caputo, MultiTermModeResidual) {
  const FracOrders orders({0.9, 0.5, 0.2}, {1.0, 0.6, 1.4});
  const std::vector<double> lambdas{1.0, 4.0, 25.0};
  for (double t : {0.5, 2.0}) {
    const auto res = mode_equation_residuals(orders, lambdas, t);
    for (double r : res) EXPECT_LT(r, tol::kOdeResidual) << t;
  }
}

TEST(Caputo, RefinementFailureIsReported) {
  QuadConfig q;
  q.panels = 2;
  q.refine_tol = 1e-12;
  const FracOrders orders({0.6}, {1.0});
  const std::vector<double> lambdas{5.0};
  EXPECT_THROW(caputo_mode_amplitudes(orders, lambdas, 0.5, 1.0, q), ConvergenceError);
}

TEST(ModalSolution, ConcurrentCacheIsConsistent) {
  auto op = Operator1D::laplacian(31);
  const auto f = op.sample([](double x) { return std::sin(x); });
  const Problem p(FracOrders({0.6, 0.3}, {1.0, 1.0}), op, f);
  const ModalSolution sol(p);
  std::vector<GridFunction> out(8);
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i) pool.emplace_back([&, i] { out[static_cast<std::size_t>(i)] = sol.homogeneous(0.5 + (i % 2)); });
  for (auto& th : pool) th.join();
  for (int i = 2; i < 8; ++i) EXPECT_EQ((out[static_cast<std::size_t>(i)] - out[static_cast<std::size_t>(i % 2)]).norm(), 0.0);
  EXPECT_EQ(sol.cache_size(), 2u);
}
