#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "phdae/adjoint.h"
#include "phdae/discretization.h"

namespace phdae {

/// Reconstructed adjoint z~ (continuous, piecewise linear) and the weight
/// w = z~ - z at both ends of every interval.
struct WeightFunction {
  TimeGrid grid;
  /// z~(t_0) = z^1, z~(t_j) = (z^j + z^{j+1}) / 2, z~(t_N) = 0.
  std::vector<Vector> nodal;
  /// w(t_j^+) and w(t_{j+1}^-) for interval j.
  std::vector<Vector> left;
  std::vector<Vector> right;
};
WeightFunction ReconstructWeight(const PiecewiseConstant& z);

enum class IndicatorVariant { kFull, kSimplified };
const char* IndicatorVariantName(IndicatorVariant v);
IndicatorVariant ParseIndicatorVariant(const std::string& name);

struct IndicatorSet {
  std::vector<double> eta;
  double eta_sum{0.0};
  /// |sum eta|.
  double eta_tot{0.0};
  IndicatorVariant variant{IndicatorVariant::kFull};

  int size() const { return static_cast<int>(eta.size()); }
  double AbsSum() const;
};

/// Signed DWR indicators. Full:
///   eta_j = <Fbar - S x, k (w_l + w_r) / 2> - <E11 [x]_j, w_l>;
/// Simplified:
///   eta_j = k/2 <Fbar - S x, dz_j> + <E11 [x]_j, dz_j>,  dz_j = z^j - z^{j-1}, dz_1 = 0.
IndicatorSet ComputeIndicators(const ReducedSystem& red,
                               const PiecewiseConstant& xk,
                               const PiecewiseConstant& z,
                               IndicatorVariant variant,
                               const GridMoments& moments);
IndicatorSet ComputeIndicators(const ReducedSystem& red,
                               const PiecewiseConstant& xk,
                               const PiecewiseConstant& z,
                               IndicatorVariant variant);

/// Discontinuous piecewise-linear test function: values at t_j^+ and t_{j+1}^-.
struct PiecewiseLinearProbe {
  std::vector<Vector> left;
  std::vector<Vector> right;

  static PiecewiseLinearProbe Constant(const std::vector<Vector>& values);
  /// Continuous interpolant of nodal values v(t_0..t_N).
  static PiecewiseLinearProbe Continuous(const std::vector<Vector>& nodal);
};

/// Primal residual  sum_j <int F - k S x^j - E11 [x]_j, phi_j> for a
/// piecewise-constant phi.
double PrimalResidual(const ReducedSystem& red, const PiecewiseConstant& xk,
                      const GridMoments& moments,
                      const std::vector<Vector>& phi);

/// Dual residual: derivative of the goal functional in direction v minus the
/// adjoint bilinear form A'(v, z). The initial value is fixed, so v(0^-) = 0.
/// Vanishes for piecewise-constant v when z is the exact discrete adjoint.
double DualResidualDiagnostic(const ReducedSystem& red,
                              const PiecewiseConstant& xk,
                              const PiecewiseConstant& z,
                              const GoalEvaluation& goal,
                              const PiecewiseLinearProbe& v);

/// int_a^b u(t) (t - a) / (b - a) dt by 2-point Gauss with kink splitting.
Vector WeightedFirstMoment(const InputSignal& input, double a, double b);

/// Minimal prefix of intervals sorted by |eta| (descending, ties by lower
/// index) whose mass reaches theta * sum |eta|. Returned sorted ascending.
/// Throws AllZero if every |eta| vanishes.
std::vector<int> DorflerMark(const IndicatorSet& ind, double theta);

/// Splits every marked interval at its midpoint. Throws StepUnderflow.
TimeGrid Bisect(const TimeGrid& grid, const std::vector<int>& marked);

struct IterationData {
  int iteration;
  const ReducedSystem* red;
  const GridMoments* moments;
  const PiecewiseConstant* primal;
  const GoalEvaluation* goal;
  const AdjointSolve* adjoint;
  const IndicatorSet* indicators;
};

struct AdaptiveConfig {
  double tol{1e-10};
  double theta{0.5};
  double rho{0.0};
  int max_iter{60};
  int max_N{1000000};
  IndicatorVariant variant{IndicatorVariant::kFull};
  AdjointMethod adjoint{AdjointMethod::kDirect};
  /// Jacobi sweeps per solve; 0 means N (exact).
  int jacobi_sweeps{0};
  int initial_N{50};
  std::optional<TimeGrid> initial_grid;
  /// Called once per iteration after the indicators are known.
  std::function<void(const IterationData&)> observer;
};

struct IterationRecord {
  int iteration{0};
  int N{0};
  TimeGrid grid;
  double qoi{0.0};
  double augmented{0.0};
  double eta_sum{0.0};
  double eta_tot{0.0};
  std::vector<int> marked;
  double seconds{0.0};
};

enum class Termination { kTolReached, kMaxIter, kMaxN, kAllZero };
const char* TerminationName(Termination t);

struct AdaptiveRun {
  std::vector<IterationRecord> iterations;
  TimeGrid final_grid;
  Termination reason{Termination::kMaxIter};
};

/// Goal-oriented loop: primal, sources, adjoint, indicators, then stop when
/// |sum eta| <= tol or mark and bisect. Validates the system first and throws
/// ModelError listing failed checks.
AdaptiveRun AdaptiveLoop(const PhDaeSystem& sys, const AdaptiveConfig& config);
AdaptiveRun AdaptiveLoop(const ReducedSystem& red, const AdaptiveConfig& config);

struct EffectivityRow {
  int iteration{0};
  int N{0};
  double error{0.0};
  double eta_sum{0.0};
  /// NaN when the error is degenerate.
  double ieff{std::numeric_limits<double>::quiet_NaN()};
  bool degenerate{false};
};

/// I_eff = |sum eta| / |J_ref - J_k| per iteration (J is the augmented value).
/// Rows whose error falls below 1e2 eps |J_ref| are flagged degenerate.
std::vector<EffectivityRow> Effectivity(const AdaptiveRun& run, double j_ref);

/// Throws DegenerateError instead of flagging.
double EffectivityIndex(double eta_sum, double j_ref, double j_k);

struct StabilizationSweep {
  int sweep{0};
  bool matches{false};
  double adjoint_error{0.0};
  double indicator_error{0.0};
};

struct StabilizationResult {
  int k_star{0};
  std::vector<int> exact_marked;
  std::vector<StabilizationSweep> history;
};

/// Smallest k* such that the Dorfler set from the l-sweep Jacobi adjoint
/// equals the exact set for l = k*..k*+window-1. Sweeps beyond N are exact,
/// so k* <= N always.
StabilizationResult MarkedSetStabilization(
    const ReducedSystem& red, const PiecewiseConstant& xk,
    const GoalEvaluation& goal, const GridMoments& moments,
    IndicatorVariant variant, double theta, int window = 4,
    bool full_history = false);

}  // namespace phdae
