#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "phdae/bench.h"
#include "phdae/error.h"
#include "phdae/estimator.h"
#include "support/test_support.h"

namespace phdae {
namespace {

PiecewiseConstant Constant(const TimeGrid& g, std::vector<Vector> values) {
  return PiecewiseConstant{g, Vector::Zero(values[0].size()), std::move(values)};
}

IndicatorSet Indicators(std::vector<double> eta) {
  IndicatorSet s;
  s.eta = std::move(eta);
  for (double e : s.eta) s.eta_sum += e;
  s.eta_tot = std::abs(s.eta_sum);
  return s;
}

TEST(Weight, ConstantAdjoint) {
  const TimeGrid g = TimeGrid::Uniform(1.0, 4);
  const Vector c{{2.0, -1.0}};
  const WeightFunction w = ReconstructWeight(Constant(g, std::vector<Vector>(4, c)));
  for (int j = 0; j < 4; ++j) {
    EXPECT_EQ(w.left[j].norm(), 0.0);
    if (j < 3) EXPECT_EQ(w.right[j].norm(), 0.0);
  }
  EXPECT_TRUE(w.right[3].isApprox(-c));
  const WeightFunction zero =
      ReconstructWeight(Constant(g, std::vector<Vector>(4, Vector::Zero(2))));
  for (int j = 0; j < 4; ++j) EXPECT_EQ(zero.left[j].norm() + zero.right[j].norm(), 0.0);
}

TEST(Weight, ThreeIntervalHandCase) {
  const TimeGrid g = TimeGrid::Uniform(3.0, 3);
  const double a = 1.0, b = 4.0, c = -2.0;
  const WeightFunction w = ReconstructWeight(
      Constant(g, {Vector::Constant(1, a), Vector::Constant(1, b), Vector::Constant(1, c)}));
  EXPECT_DOUBLE_EQ(w.nodal[0](0), a);
  EXPECT_DOUBLE_EQ(w.nodal[1](0), (a + b) / 2);
  EXPECT_DOUBLE_EQ(w.nodal[2](0), (b + c) / 2);
  EXPECT_DOUBLE_EQ(w.nodal[3](0), 0.0);
  // w(t_1^+) = (a + b)/2 - b = -(b - a)/2.
  EXPECT_DOUBLE_EQ(w.left[1](0), -(b - a) / 2);
  EXPECT_DOUBLE_EQ(w.right[0](0), (a + b) / 2 - a);
  EXPECT_DOUBLE_EQ(w.left[0](0), 0.0);
  EXPECT_DOUBLE_EQ(w.right[2](0), -c);
}

TEST(Indicators, ZeroAdjointAndEquilibrium) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const TimeGrid g = TimeGrid::Uniform(1.0, 10);
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10);
  const PiecewiseConstant z = Constant(g, std::vector<Vector>(10, Vector::Zero(2)));
  for (auto v : {IndicatorVariant::kFull, IndicatorVariant::kSimplified}) {
    const IndicatorSet s = ComputeIndicators(red, x, z, v);
    for (double e : s.eta) EXPECT_EQ(e, 0.0);
  }
  // Zero input, zero state: no residual at all, whatever the weight.
  PhDaeSystem sys = bench::BuildAcademic();
  sys.input = InputSignal::Scalar(ZeroInput{});
  const ReducedSystem quiet = Reduce(sys);
  const PiecewiseConstant x0 = SolvePrimal(quiet, g, Vector::Zero(2));
  std::vector<Vector> zv;
  for (int j = 0; j < 10; ++j) zv.push_back(Vector{{1.0 + j, 2.0 - j}});
  for (auto v : {IndicatorVariant::kFull, IndicatorVariant::kSimplified}) {
    const IndicatorSet s = ComputeIndicators(quiet, x0, Constant(g, zv), v);
    for (double e : s.eta) EXPECT_EQ(e, 0.0);
  }
}

TEST(Indicators, SimplifiedIgnoresFirstInterval) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const TimeGrid g = TimeGrid::Uniform(1.0, 12);
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10);
  const GoalEvaluation goal = LocalResiduals(red, x, 0.0);
  const AdjointSolve z = SolveAdjointDirect(red, g, goal.sources);
  const IndicatorSet s = ComputeIndicators(red, x, z.z, IndicatorVariant::kSimplified);
  EXPECT_EQ(s.eta[0], 0.0);
  double sum = 0.0;
  for (double e : s.eta) sum += e;
  EXPECT_DOUBLE_EQ(s.eta_sum, sum);
  EXPECT_DOUBLE_EQ(s.eta_tot, std::abs(sum));
  EXPECT_EQ(ParseIndicatorVariant("full"), IndicatorVariant::kFull);
  EXPECT_THROW(ParseIndicatorVariant("bogus"), Error);
}

TEST(DualResidual, GalerkinOrthogonality) {
  std::mt19937 gen(17);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    const PhDaeSystem sys = testing::RandomDissipativeSystem(gen, 3, 1);
    const ReducedSystem red = Reduce(sys);
    const TimeGrid g = TimeGrid::Uniform(1.0, 6);
    const PiecewiseConstant x = SolvePrimal(red, g, red.x10);
    const GoalEvaluation goal = LocalResiduals(red, x, 0.3);
    const AdjointSolve z = SolveAdjointDirect(red, g, goal.sources);
    std::vector<Vector> v;
    for (int j = 0; j < 6; ++j) {
      Vector e(3);
      for (int i = 0; i < 3; ++i) e(i) = nd(gen);
      v.push_back(e);
    }
    double scale = 0.0;
    for (int j = 0; j < 6; ++j) scale += std::abs(goal.sources[j].dot(v[j]));
    const double res = DualResidualDiagnostic(red, x, z.z, goal, PiecewiseLinearProbe::Constant(v));
    EXPECT_LE(std::abs(res), 1e-12 * std::max(scale, 1.0));
    // The primal residual vanishes against any piecewise constant test.
    const GridMoments mom = ComputeMoments(red.input, g);
    EXPECT_LE(std::abs(PrimalResidual(red, x, mom, v)), 1e-12 * std::max(scale, 1.0));
  }
}

TEST(DualResidual, LinearInProbe) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const TimeGrid g = TimeGrid::Uniform(1.0, 20);
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10);
  const GoalEvaluation goal = LocalResiduals(red, x, 0.0);
  const AdjointSolve z = SolveAdjointDirect(red, g, goal.sources);
  std::vector<Vector> a, b, ab;
  for (int i = 0; i <= 20; ++i) {
    const double t = g.node(i);
    a.push_back(Vector{{std::sin(3 * t), t}});
    b.push_back(Vector{{1.0 - t, t * t}});
    ab.push_back(2.0 * a.back() - 3.0 * b.back());
  }
  auto rho = [&](const std::vector<Vector>& n) {
    return DualResidualDiagnostic(red, x, z.z, goal, PiecewiseLinearProbe::Continuous(n));
  };
  EXPECT_NEAR(rho(ab), 2.0 * rho(a) - 3.0 * rho(b), 1e-12);
}

TEST(Dorfler, Examples) {
  EXPECT_EQ(DorflerMark(Indicators({4, 3, 2, 1}), 0.5), (std::vector<int>{0, 1}));
  EXPECT_EQ(DorflerMark(Indicators({-1, 3, -4, 2}), 0.5), (std::vector<int>{1, 2}));
  EXPECT_EQ(DorflerMark(Indicators({1, 0, 2, 3}), 0.999999), (std::vector<int>{0, 2, 3}));
  EXPECT_EQ(DorflerMark(Indicators({1, 1, 1, 1}), 0.5), (std::vector<int>{0, 1}));
  try {
    DorflerMark(Indicators({0, 0, 0}), 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllZero);
  }
}

TEST(Bisect, Examples) {
  const TimeGrid g({0.0, 0.5, 1.0});
  EXPECT_EQ(Bisect(g, {0}).nodes(), (std::vector<double>{0.0, 0.25, 0.5, 1.0}));
  EXPECT_EQ(Bisect(g, {1}).nodes(), (std::vector<double>{0.0, 0.5, 0.75, 1.0}));
  EXPECT_EQ(Bisect(g, {0, 1}).size(), 4);
  EXPECT_TRUE(Bisect(g, {}) == g);
  const TimeGrid tiny({0.0, 2e-14, 1.0});
  EXPECT_THROW(Bisect(tiny, {0}), Error);
}

TEST(AdaptiveLoop, InfiniteToleranceStopsImmediately) {
  AdaptiveConfig cfg;
  cfg.tol = std::numeric_limits<double>::infinity();
  cfg.initial_N = 17;
  const AdaptiveRun run = AdaptiveLoop(bench::BuildAcademic(), cfg);
  ASSERT_EQ(run.iterations.size(), 1u);
  EXPECT_EQ(run.reason, Termination::kTolReached);
  EXPECT_EQ(run.final_grid.size(), 17);
}

TEST(AdaptiveLoop, RejectsInvalidModel) {
  PhDaeSystem sys = bench::BuildAcademic();
  sys.R = -sys.R;
  try {
    AdaptiveLoop(sys, AdaptiveConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kModelError);
    EXPECT_NE(std::string(e.what()).find("r_symmetric_psd"), std::string::npos);
  }
}

TEST(AdaptiveLoop, AcademicRefinesEarlyTimes) {
  AdaptiveConfig cfg = bench::DefaultAdaptiveConfig("academic");
  cfg.max_iter = 11;
  int calls = 0;
  cfg.observer = [&](const IterationData& d) {
    EXPECT_EQ(d.iteration, calls++);
    EXPECT_EQ(d.indicators->size(), d.primal->grid.size());
  };
  const AdaptiveRun run = AdaptiveLoop(Reduce(bench::BuildAcademic()), cfg);
  EXPECT_EQ(calls, static_cast<int>(run.iterations.size()));
  const TimeGrid& g = run.iterations.at(10).grid;
  int early = 0, late = 0;
  for (double t : g.nodes()) {
    early += t <= 0.1;
    late += t >= 0.6;
  }
  EXPECT_GE((early / 0.1) / (late / 0.4), 3.0);
  for (std::size_t i = 1; i < run.iterations.size(); ++i) {
    EXPECT_GT(run.iterations[i].N, run.iterations[i - 1].N);
  }
}

TEST(AdaptiveLoop, JacobiWithFullSweepsMatchesDirect) {
  AdaptiveConfig cfg = bench::DefaultAdaptiveConfig("academic");
  cfg.max_iter = 6;
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const AdaptiveRun direct = AdaptiveLoop(red, cfg);
  cfg.adjoint = AdjointMethod::kJacobi;
  const AdaptiveRun jac = AdaptiveLoop(red, cfg);
  ASSERT_EQ(direct.iterations.size(), jac.iterations.size());
  for (std::size_t i = 0; i < jac.iterations.size(); ++i) {
    EXPECT_TRUE(direct.iterations[i].grid == jac.iterations[i].grid);
  }
}

TEST(AdaptiveLoop, MaxNLimit) {
  AdaptiveConfig cfg = bench::DefaultAdaptiveConfig("academic");
  cfg.max_N = 30;
  const AdaptiveRun run = AdaptiveLoop(Reduce(bench::BuildAcademic()), cfg);
  EXPECT_EQ(run.reason, Termination::kMaxN);
  EXPECT_LE(run.final_grid.size(), 30);
}

TEST(Effectivity, Formula) {
  EXPECT_NEAR(EffectivityIndex(-5.5261e2, 1.0013e3, 0.0), 0.552, 5e-4);
  EXPECT_DOUBLE_EQ(EffectivityIndex(0.25, 1.0, 0.75), 1.0);
  EXPECT_THROW(EffectivityIndex(1.0, 1.0, 1.0), Error);
  AdaptiveRun run;
  IterationRecord a, b;
  a.augmented = 2.0;
  a.eta_sum = -1.0;
  b.augmented = 1.0;
  b.eta_sum = 0.5;
  run.iterations = {a, b};
  const auto rows = Effectivity(run, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].ieff, 1.0);
  EXPECT_TRUE(rows[1].degenerate);
  EXPECT_TRUE(std::isnan(rows[1].ieff));
}

// A source on the first interval leaves z^2..z^N at zero, so a single sweep
// already reproduces the exact adjoint.
TEST(Stabilization, LocalSourceStabilizesAtOnce) {
  const ReducedSystem red = Reduce(bench::BuildAcademic());
  const TimeGrid g = TimeGrid::Uniform(1.0, 16);
  const GridMoments mom = ComputeMoments(red.input, g);
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10, mom);
  GoalEvaluation goal = LocalResiduals(red, x, 0.0, mom);
  for (int j = 0; j < 16; ++j) {
    if (j != 0) goal.sources[j].setZero();
  }
  const StabilizationResult s =
      MarkedSetStabilization(red, x, goal, mom, IndicatorVariant::kFull, 0.05);
  EXPECT_EQ(s.k_star, 1);
  EXPECT_EQ(s.exact_marked.size(), 1u);
}

TEST(Stabilization, NeverExceedsN) {
  const ReducedSystem red = Reduce(bench::BuildBuiltin("tline-reg"));
  const TimeGrid g = TimeGrid::Uniform(10.0, 50);
  const GridMoments mom = ComputeMoments(red.input, g);
  const PiecewiseConstant x = SolvePrimal(red, g, red.x10, mom);
  const GoalEvaluation goal = LocalResiduals(red, x, 0.0, mom);
  const StabilizationResult s =
      MarkedSetStabilization(red, x, goal, mom, IndicatorVariant::kFull, 0.5);
  EXPECT_EQ(s.k_star, 1);
  EXPECT_EQ(s.exact_marked.size(), 1u);
  const StabilizationResult simp =
      MarkedSetStabilization(red, x, goal, mom, IndicatorVariant::kSimplified, 0.5, 4, true);
  EXPECT_LE(simp.k_star, 50);
  EXPECT_EQ(simp.history.size(), 50u);
  EXPECT_NEAR(simp.history.back().adjoint_error, 0.0, 1e-12);
}

}  // namespace
}  // namespace phdae
