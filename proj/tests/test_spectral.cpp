#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mtfrac/spectral.hpp"
#include "mtfrac/tolerances.hpp"

using namespace mtfrac;

namespace {

GridFunction random_grid_function(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  GridFunction f(n);
  for (int i = 0; i < n; ++i) f(i) = g(rng);
  return f;
}

}  // namespace

TEST(Assemble, LaplacianStencil) {
  const auto op = Operator1D::laplacian(31);
  const auto a = assemble(op);
  const double h2 = op.h() * op.h();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.diag(i) * h2, 2.0, 1e-14);
    if (i + 1 < a.size()) EXPECT_NEAR(a.off(i) * h2, -1.0, 1e-14);
  }
  const Eigen::MatrixXd d = a.dense();
  EXPECT_EQ((d - d.transpose()).norm(), 0.0);
}

TEST(Assemble, PositiveDefiniteWithVariableCoefficients) {
  const auto op = Operator1D::from_profiles(Interval{0.0, 2.0}, 40, Profile::sinusoidal(2.0, 0.5, 3.0),
                                            Profile::linear(-1.0, 0.0));
  const auto s = eigendecompose(op);
  EXPECT_GT(s.lambdas(0), 0.0);
}

TEST(Operator, RejectsInvalidCoefficients) {
  EXPECT_THROW(Operator1D::from_profiles(Interval{}, 10, Profile::constant(-1.0), Profile::constant(0.0)),
               DomainError);
  EXPECT_THROW(Operator1D::from_profiles(Interval{}, 10, Profile::constant(1.0), Profile::constant(0.5)),
               DomainError);
  EXPECT_THROW(Operator1D(Interval{1.0, 0.0}, 3, {1, 1, 1, 1, 1}, {0, 0, 0}), DomainError);
  EXPECT_THROW(Operator1D(Interval{}, 3, {1, 1, 1}, {0, 0, 0}), DomainError);
}

TEST(Profile, TabulatedInterpolates) {
  const auto p = Profile::tabulated({1.0, 3.0, 2.0});
  const Interval iv{0.0, 1.0};
  EXPECT_DOUBLE_EQ(p(0.0, iv), 1.0);
  EXPECT_DOUBLE_EQ(p(0.25, iv), 2.0);
  EXPECT_DOUBLE_EQ(p(0.5, iv), 3.0);
  EXPECT_DOUBLE_EQ(p(1.0, iv), 2.0);
  EXPECT_THROW(Profile::tabulated({1.0}), DomainError);
}

TEST(Eigen, ClosedFormDiscreteSpectrum) {
  const auto op = Operator1D::laplacian(255);
  const auto s = eigendecompose(op);
  const double h = op.h();
  for (Eigen::Index n = 1; n <= s.n_modes(); ++n) {
    const double exact = 4.0 / (h * h) * std::pow(std::sin(n * h / 2.0), 2);
    EXPECT_NEAR(s.lambdas(n - 1), exact, 1e-10 * exact) << n;
  }
}

TEST(Eigen, Orthonormality) {
  const auto op = Operator1D::from_profiles(Interval{}, 255, Profile::sinusoidal(1.0, 0.3, 2.0),
                                            Profile::constant(-0.5));
  const auto s = eigendecompose(op);
  const Eigen::MatrixXd gram = s.h * s.eigvecs.transpose() * s.eigvecs;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), tol::kAlgebraic);
  for (Eigen::Index n = 1; n < s.n_modes(); ++n) EXPECT_GE(s.lambdas(n), s.lambdas(n - 1));
}

TEST(Eigen, SignConvention) {
  const auto s = eigendecompose(Operator1D::laplacian(63));
  for (Eigen::Index n = 0; n < s.n_modes(); ++n) {
    const auto col = s.eigvecs.col(n);
    const double scale = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-8 * scale) {
        EXPECT_GT(col(i), 0.0);
        break;
      }
    }
  }
}

TEST(Eigen, SecondOrderContinuumConvergence) {
  std::vector<double> err;
  for (int n : {31, 63, 127, 255}) {
    const auto s = eigendecompose(Operator1D::laplacian(n));
    err.push_back(std::abs(s.lambdas(0) - 1.0));
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i - 1] / err[i];
    EXPECT_NEAR(ratio, 4.0, 0.4);
  }
}

TEST(Project, SingleModeAndZero) {
  const auto s = eigendecompose(Operator1D::laplacian(127));
  const auto a = project(s.mode(2), s);
  for (Eigen::Index n = 0; n < a.size(); ++n) EXPECT_NEAR(a(n), n == 2 ? 1.0 : 0.0, tol::kAlgebraic);
  EXPECT_EQ(project(GridFunction::Zero(127), s).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(project(GridFunction::Zero(5), s), DomainError);
}

TEST(Project, ParsevalAndRoundTrip) {
  const auto op = Operator1D::from_profiles(Interval{}, 255, Profile::linear(1.0, 2.0), Profile::constant(0.0));
  const auto s = eigendecompose(op);
  const auto f = random_grid_function(255, 42);
  const auto a = project(f, s);
  const double norm2 = op.h() * f.squaredNorm();
  EXPECT_NEAR(a.squaredNorm(), norm2, tol::kAlgebraic * norm2);
  EXPECT_LT((synthesize(a, s) - f).cwiseAbs().maxCoeff(), tol::kAlgebraic);
}

TEST(Synthesize, UnitCoefficientAndLinearity) {
  const auto s = eigendecompose(Operator1D::laplacian(63));
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(1);
  e1(0) = 1.0;
  EXPECT_LT((synthesize(e1, s) - s.mode(0)).cwiseAbs().maxCoeff(), 1e-15);
  const auto a = project(random_grid_function(63, 1), s);
  const auto b = project(random_grid_function(63, 2), s);
  EXPECT_LT((synthesize(a + b, s) - synthesize(a, s) - synthesize(b, s)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(synthesize(Eigen::VectorXd::Zero(64), s), DomainError);
}

TEST(FracNorm, SpecialCases) {
  const auto op = Operator1D::laplacian(127);
  const auto s = eigendecompose(op);
  const auto f = random_grid_function(127, 3);
  EXPECT_NEAR(frac_norm(f, 0.0, s), l2_norm(f, op.h()), tol::kAlgebraic);
  EXPECT_NEAR(frac_norm(s.mode(0), 1.0, s), s.lambdas(0), tol::kAlgebraic);
  EXPECT_NEAR(frac_norm(s.mode(0), -1.0, s), 1.0 / s.lambdas(0), tol::kAlgebraic);
  EXPECT_THROW(frac_norm(f, 1.5, s), DomainError);
}

TEST(FracNorm, MonotoneInGammaWhenEigenvaluesExceedOne) {
  const auto op = Operator1D::laplacian(127);
  const auto s = eigendecompose(op);
  const auto f = random_grid_function(127, 4);
  double prev = 0.0;
  for (double g = -1.0; g <= 1.0; g += 0.125) {
    const double v = frac_norm(f, g, s);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(FracNorm, HalfPowerMatchesDirichletEnergy) {
  const auto op = Operator1D::from_profiles(Interval{}, 255, Profile::sinusoidal(1.5, 0.5, 1.0),
                                            Profile::constant(-0.25));
  const auto s = eigendecompose(op);
  const auto f = op.sample([](double x) { return std::sin(x) + 0.3 * std::sin(3.0 * x); });
  const double energy = dirichlet_energy(op, f);
  EXPECT_NEAR(std::pow(frac_norm(f, 0.5, s), 2), energy, 1e-10 * energy);
}

TEST(ApplyInverse, SolvesTheDiscreteProblem) {
  const auto op = Operator1D::from_profiles(Interval{}, 255, Profile::linear(1.0, 3.0), Profile::constant(-1.0));
  const auto a = assemble(op);
  const auto s = eigendecompose(a, op.h());
  const auto f = random_grid_function(255, 5);
  const auto u = apply_inverse(f, s);
  EXPECT_LT(l2_norm(a.apply(u) - f, op.h()), 1e-8 * l2_norm(f, op.h()));
  EXPECT_LT((apply_inverse(s.mode(0), s) - s.mode(0) / s.lambdas(0)).cwiseAbs().maxCoeff(), 1e-12);
  const auto g = random_grid_function(255, 6);
  EXPECT_LT((apply_inverse(f + g, s) - apply_inverse(f, s) - apply_inverse(g, s)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Operator, C1DistanceOnGrid) {
  const auto a = Operator1D::from_profiles(Interval{0.0, 1.0}, 99, Profile::constant(1.0), Profile::constant(0.0));
  const auto b = Operator1D::from_profiles(Interval{0.0, 1.0}, 99, Profile::linear(1.0, 1.1), Profile::constant(0.0));
  EXPECT_NEAR(Operator1D::c1_distance(a, b), 0.1 + 0.1, 1e-12);
  EXPECT_EQ(Operator1D::c1_distance(a, a), 0.0);
}
