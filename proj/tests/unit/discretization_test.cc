#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phdae/bench.h"
#include "phdae/discretization.h"
#include "phdae/error.h"
#include "support/test_support.h"

namespace phdae {
namespace {

PhDaeSystem ScalarOde(double s, Waveform input = ZeroInput{}) {
  PhDaeSystem sys;
  sys.E = Matrix::Identity(1, 1);
  sys.J = Matrix::Zero(1, 1);
  sys.R = Matrix::Constant(1, 1, s);
  sys.Q = Matrix::Identity(1, 1);
  sys.B = Matrix::Identity(1, 1);
  sys.input = InputSignal::Scalar(input);
  sys.x0 = Vector::Ones(1);
  sys.T = 1.0;
  return sys;
}

ReducedSystem ReduceWithIdentity(const PhDaeSystem& sys) {
  return Reduce(sys, SplittingPair{Matrix::Identity(sys.n(), sys.n()), Matrix(sys.n(), 0)});
}

TEST(TimeGrid, Validation) {
  EXPECT_THROW(TimeGrid({0.0}), Error);
  EXPECT_THROW(TimeGrid({0.1, 1.0}), Error);
  EXPECT_THROW(TimeGrid({0.0, 0.5, 0.5, 1.0}), Error);
  EXPECT_THROW(TimeGrid({0.0, 1e-16, 1.0}), Error);
  const TimeGrid g = TimeGrid::Uniform(2.0, 4);
  EXPECT_EQ(g.size(), 4);
  EXPECT_DOUBLE_EQ(g.step(2), 0.5);
  EXPECT_DOUBLE_EQ(g.midpoint(0), 0.25);
  EXPECT_DOUBLE_EQ(g.T(), 2.0);
}

TEST(Primal, ScalarImplicitEuler) {
  const ReducedSystem red = ReduceWithIdentity(ScalarOde(1.0));
  const TimeGrid g = TimeGrid::Uniform(1.0, 10);
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10);
  for (int j = 0; j < 10; ++j) {
    // Steps are cached at 44-bit resolution.
    EXPECT_NEAR(x.values[j](0), std::pow(1.0 / 1.1, j + 1), 1e-13);
  }
  const PiecewiseConstant zero = SolvePrimal(red, g, Vector::Zero(1));
  for (const auto& v : zero.values) EXPECT_EQ(v(0), 0.0);
}

TEST(Primal, ConstantForcingReachesEquilibrium) {
  // x' = -2 x + 3 has x* = 1.5; starting there, every step stays there.
  const ReducedSystem red = ReduceWithIdentity(ScalarOde(2.0, PiecewiseLinearTable{{0.0}, {3.0}}));
  const TimeGrid g({0.0, 0.1, 0.35, 1.0});
  const PiecewiseConstant x = SolvePrimal(red, g, Vector::Constant(1, 1.5));
  for (const auto& v : x.values) EXPECT_NEAR(v(0), 1.5, 1e-13);
}

TEST(Primal, StepFactorCacheKeysDistinctSteps) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  StepFactorCache cache(red, false);
  cache.Prepare(TimeGrid({0.0, 0.25, 0.5, 0.625, 0.75, 1.0}));
  EXPECT_EQ(cache.size(), 2u);
  const Matrix m = cache.StepMatrix(0.25);
  EXPECT_TRUE(m.isApprox(red.E11 + 0.25 * red.S));
}

TEST(Goal, AcademicReferenceResolution) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const TimeGrid g = TimeGrid::Uniform(1.0, 20000);
  const GoalEvaluation goal = LocalResiduals(red, SolvePrimal(red, g, red.x10), 0.0);
  EXPECT_LE(goal.qoi, 1e-11);
  EXPECT_GT(goal.qoi, 0.0);
}

TEST(Goal, ZeroInputZeroStateGivesZeroResiduals) {
  std::mt19937 gen(5);
  PhDaeSystem sys = testing::RandomDissipativeSystem(gen, 3, 1);
  sys.input = InputSignal::Scalar(ZeroInput{});
  const ReducedSystem red = Reduce(sys);
  const TimeGrid g = TimeGrid::Uniform(1.0, 7);
  const GoalEvaluation goal = LocalResiduals(red, SolvePrimal(red, g, Vector::Zero(3)), 0.0);
  for (int j = 0; j < 7; ++j) {
    EXPECT_EQ(goal.G[j], 0.0);
    EXPECT_EQ(goal.sources[j].norm(), 0.0);
  }
}

TEST(Goal, LocalResidualsMatchQuadratureOfG) {
  std::mt19937 gen(77);
  const PhDaeSystem sys = testing::RandomDissipativeSystem(gen, 3, 2, 2);
  const ReducedSystem red = Reduce(sys);
  const TimeGrid g({0.0, 0.1, 0.35, 0.7, 0.85, 1.0});
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10);
  const GoalEvaluation goal = LocalResiduals(red, x, 0.0);
  double qoi = 0.0;
  for (int j = 0; j < g.size(); ++j) {
    // Composite Gauss on 400 pieces, split at the sine cutoff 0.7.
    const Vector& xj = x.values[j];
    double integral = 0.0;
    const int pieces = 400;
    for (int p = 0; p < pieces; ++p) {
      const double a = g.left(j) + g.step(j) * p / pieces;
      const double b = g.left(j) + g.step(j) * (p + 1) / pieces;
      integral += Gauss2Integrate(
          [&](double t) { return red.EvaluatePowerImbalance(t, xj).g; }, a, b,
          red.input.Kinks(a, b));
    }
    const double G = integral + red.Hamiltonian(xj) - red.Hamiltonian(x.nodal(j));
    EXPECT_NEAR(goal.G[j], G, 1e-9 * std::max(1.0, std::abs(G)));
    qoi += G * G;
  }
  EXPECT_LT(testing::RelDiff(goal.qoi, qoi), 1e-8);
}

TEST(Goal, LocalResidualsSecondOrderPerInterval) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  auto max_g = [&](int N) {
    const TimeGrid g = TimeGrid::Uniform(1.0, N);
    const GoalEvaluation goal = LocalResiduals(red, SolvePrimal(red, g, red.x10), 0.0);
    double m = 0.0;
    for (double v : goal.G) m = std::max(m, std::abs(v));
    return m;
  };
  const double r1 = max_g(400) / max_g(800);
  const double r2 = max_g(800) / max_g(1600);
  EXPECT_NEAR(r1, 4.0, 0.6);
  EXPECT_NEAR(r2, 4.0, 0.6);
}

TEST(Goal, AugmentedValue) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const TimeGrid g = TimeGrid::Uniform(1.0, 30);
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10);
  const GoalEvaluation g0 = LocalResiduals(red, x, 0.0);
  const GoalEvaluation g10 = LocalResiduals(red, x, 10.0);
  double norm = 0.0;
  for (int j = 0; j < 30; ++j) norm += g.step(j) * red.Hamiltonian(x.values[j]);
  EXPECT_DOUBLE_EQ(g0.augmented, g0.qoi);
  EXPECT_NEAR(g10.augmented, g0.qoi + 10.0 * norm, 1e-13 * g10.augmented);
  EXPECT_EQ(g10.qoi, g0.qoi);
}

TEST(Primal, DiscreteEnergyIdentity) {
  // With F = 0:  H(x^{j+1}) - H(x^j) + |x^{j+1} - x^j|^2_E11 / 2 = -k x^T S~ x.
  std::mt19937 gen(9);
  PhDaeSystem sys = testing::RandomDissipativeSystem(gen, 4, 2);
  sys.input = InputSignal::Scalar(ZeroInput{});
  const ReducedSystem red = Reduce(sys);
  const TimeGrid g({0.0, 0.05, 0.2, 0.21, 0.6, 1.0});
  const PiecewiseConstant x = SolvePrimal(red, g, Vector::Ones(4));
  const Matrix st = red.SymmetricPart();
  for (int j = 0; j < g.size(); ++j) {
    const Vector& b = x.values[j];
    const Vector d = x.Jump(j);
    const double lhs = red.Hamiltonian(b) - red.Hamiltonian(x.nodal(j)) +
                       0.5 * d.dot(red.E11 * d);
    const double rhs = -g.step(j) * b.dot(st * b);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Primal, FirstOrderStateConvergence) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const PiecewiseConstant ref = SolvePrimal(red, TimeGrid::Uniform(1.0, 25600), red.x10);
  std::vector<double> ns, errs;
  for (int N : {100, 200, 400, 800}) {
    const PiecewiseConstant x = SolvePrimal(red, TimeGrid::Uniform(1.0, N), red.x10);
    ns.push_back(N);
    errs.push_back(bench::StateEnergyError(red, x, ref));
  }
  EXPECT_NEAR(bench::FitLogLogSlope(ns, errs), -1.0, 0.15);
}

TEST(Stability, ScaledRecursionPair) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const TimeGrid g = TimeGrid::Uniform(1.0, 40);
  auto [a, b] = ScaledRecursionPair(red, g, red.x10, 0.0);
  for (int j = 0; j < 40; ++j) EXPECT_EQ((a.values[j] - b.values[j]).norm(), 0.0);

  const ReducedSystem scalar = ReduceWithIdentity(ScalarOde(0.5));
  auto [u, s] = ScaledRecursionPair(scalar, TimeGrid::Uniform(1.0, 5), scalar.x10, 0.3);
  double prev_u = 1.0, prev_s = 1.0;
  for (int j = 0; j < 5; ++j) {
    EXPECT_LT(s.values[j](0) / prev_s, u.values[j](0) / prev_u);
    prev_u = u.values[j](0);
    prev_s = s.values[j](0);
  }
}

TEST(Stability, IntegralEstimateWithClosedFormConstant) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  for (double mu : {0.1, 1.0}) {
    for (int N : {10, 50, 200}) {
      auto [x, xmu] = ScaledRecursionPair(red, TimeGrid::Uniform(1.0, N), red.x10, mu);
      EXPECT_LE(DiscreteStabilityNorm(x),
                ScalingConstant(mu, red.T) * DiscreteStabilityNorm(xmu))
          << "mu " << mu << " N " << N;
    }
  }
  EXPECT_DOUBLE_EQ(ScalingConstant(0.0, 3.0), 1.0);
  // mu T = 1: max{1 + 1/2, 4} = 4, c = 1 + 1 + 4.
  EXPECT_DOUBLE_EQ(ScalingConstant(1.0, 1.0), 6.0);
}

TEST(Stability, PrimalEstimateAcademic) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  for (int N : {10, 100, 1000}) {
    const TimeGrid g = TimeGrid::Uniform(1.0, N);
    const GridMoments mom = ComputeMoments(red.input, g);
    const PiecewiseConstant x = SolvePrimal(red, g, red.x10, mom);
    EXPECT_LE(DiscreteStabilityNorm(x), PrimalStabilityBound(red, mom, red.x10, 0.0));
  }
}

TEST(Forcing, IntervalIntegral) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const ForcingIntegral f = IntervalForcing(red, 0.0, 0.5);
  EXPECT_NEAR(std::abs(f.integral(0)), 1.0 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(std::abs(f.average(0)), 2.0 / std::numbers::pi, 1e-14);
}

}  // namespace
}  // namespace phdae
