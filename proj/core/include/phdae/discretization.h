#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "phdae/model.h"
#include "phdae/numerics.h"

namespace phdae {

/// Partition 0 = t_0 < t_1 < ... < t_N = T. Interval j (0-based) is
/// (t_j, t_{j+1}] with step k_j = t_{j+1} - t_j.
class TimeGrid {
 public:
  TimeGrid() = default;
  /// Throws InvalidArgument unless nodes start at 0, increase strictly, have
  /// N >= 1 and every step exceeds 1e-14 T.
  explicit TimeGrid(std::vector<double> nodes);

  static TimeGrid Uniform(double T, int N);

  int size() const { return static_cast<int>(nodes_.size()) - 1; }
  double T() const { return nodes_.back(); }
  double node(int i) const { return nodes_[i]; }
  double left(int j) const { return nodes_[j]; }
  double right(int j) const { return nodes_[j + 1]; }
  double step(int j) const { return nodes_[j + 1] - nodes_[j]; }
  double midpoint(int j) const { return 0.5 * (nodes_[j] + nodes_[j + 1]); }
  double MinStep() const;
  const std::vector<double>& nodes() const { return nodes_; }

  bool operator==(const TimeGrid& other) const {
    return nodes_ == other.nodes_;
  }

 private:
  std::vector<double> nodes_{0.0, 1.0};
};

/// Values x^1..x^N (stored 0-based) on a grid plus the left datum x^0.
struct PiecewiseConstant {
  TimeGrid grid;
  Vector initial;
  std::vector<Vector> values;

  int size() const { return static_cast<int>(values.size()); }
  /// x^{j}, j = 0..N, with x^0 the left datum.
  const Vector& nodal(int j) const { return j == 0 ? initial : values[j - 1]; }
  /// Jump x^{j+1} - x^j across the left end of interval j.
  Vector Jump(int j) const { return values[j] - nodal(j); }
};

/// Input moments for every interval of a grid.
struct GridMoments {
  std::vector<InputMoments> intervals;
};
GridMoments ComputeMoments(const InputSignal& input, const TimeGrid& grid);

struct ForcingIntegral {
  Vector integral;
  Vector average;
};
/// int_a^b F dt and its mean.
ForcingIntegral IntervalForcing(const ReducedSystem& red, double a, double b);

/// Cached LU factors of E11 + k S (or E11 + k S^T), keyed by k.
class StepFactorCache {
 public:
  StepFactorCache(const ReducedSystem& red, bool transpose, double shift = 0.0);

  /// Factors every distinct step of the grid. After this call Get is
  /// read-only for those steps and safe to use concurrently.
  void Prepare(const TimeGrid& grid);
  const LuFactor& Get(double k);
  /// Step matrix E11 + k (S + shift E11) or its transposed drift variant.
  Matrix StepMatrix(double k) const;
  std::size_t size() const { return cache_.size(); }

 private:
  const ReducedSystem* red_;
  bool transpose_;
  double shift_;
  std::mutex mutex_;
  std::map<double, std::unique_ptr<LuFactor>> cache_;
};

/// dG(0) primal:  (E11 + k_j S) x^{j+1} = E11 x^j + int_{I_j} F dt.
PiecewiseConstant SolvePrimal(const ReducedSystem& red, const TimeGrid& grid,
                              const Vector& x10);
PiecewiseConstant SolvePrimal(const ReducedSystem& red, const TimeGrid& grid,
                              const Vector& x10, const GridMoments& moments);

struct GoalEvaluation {
  /// G_j = int_{I_j} g(t, x^{j+1}) dt + H(x^{j+1}) - H(x^j).
  std::vector<double> G;
  double qoi{0.0};
  double rho{0.0};
  /// qoi + rho * sum_j k_j H(x^{j+1}).
  double augmented{0.0};
  /// Gradient of the augmented functional with respect to x^{j+1}.
  std::vector<Vector> sources;
};

GoalEvaluation LocalResiduals(const ReducedSystem& red,
                              const PiecewiseConstant& xk, double rho);
GoalEvaluation LocalResiduals(const ReducedSystem& red,
                              const PiecewiseConstant& xk, double rho,
                              const GridMoments& moments);

/// Unshifted and shifted recursions with drift S and S + mu E11, same data.
std::pair<PiecewiseConstant, PiecewiseConstant> ScaledRecursionPair(
    const ReducedSystem& red, const TimeGrid& grid, const Vector& x10,
    double mu);

/// ||x^N||^2 + sum_{j=1}^{N-1} ||x^{j+1} - x^j||^2 + sum_j k_j ||x^j||^2.
double DiscreteStabilityNorm(const PiecewiseConstant& x);

/// int_0^T ||F||^2 dt from the input moments.
double ForcingSquaredIntegral(const ReducedSystem& red,
                              const GridMoments& moments);

/// Right-hand side of the primal stability estimate with c(mu, T) = c.
double PrimalStabilityBound(const ReducedSystem& red,
                            const GridMoments& moments, const Vector& x10,
                            double mu, double c = 1.0);

/// c(mu, T) = 1 + mu T + mu max{mu T + mu T^2 / 2, 2 mu T + 2}.
double ScalingConstant(double mu, double T);

}  // namespace phdae
