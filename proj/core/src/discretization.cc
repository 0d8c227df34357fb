#include "phdae/discretization.h"

#include <cmath>
#include <limits>

#include "phdae/error.h"
#include "phdae/parallel.h"

namespace phdae {
namespace {

// Steps that differ only by rounding (uniform grids, bisected children)
// share one factorization: the key keeps 44 mantissa bits.
double QuantizeStep(double k) {
  int exp = 0;
  const double mant = std::frexp(k, &exp);
  return std::ldexp(std::round(std::ldexp(mant, 44)), exp - 44);
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs at least one interval");
  }
  if (nodes_.front() != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "grid must start at 0");
  }
  const double T = nodes_.back();
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw Error(ErrorCode::kInvalidArgument, "grid end must be positive");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] - nodes_[i - 1] > 1e-14 * T)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "grid nodes must increase with steps above 1e-14 T");
    }
  }
}

TimeGrid TimeGrid::Uniform(double T, int N) {
  if (N < 1) throw Error(ErrorCode::kInvalidArgument, "N must be >= 1");
  std::vector<double> nodes(N + 1);
  for (int i = 0; i <= N; ++i) nodes[i] = T * static_cast<double>(i) / N;
  nodes[N] = T;
  return TimeGrid(std::move(nodes));
}

double TimeGrid::MinStep() const {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < size(); ++j) m = std::min(m, step(j));
  return m;
}

GridMoments ComputeMoments(const InputSignal& input, const TimeGrid& grid) {
  GridMoments out;
  out.intervals.resize(grid.size());
  ParallelFor(grid.size(), [&](std::size_t j) {
    const int i = static_cast<int>(j);
    out.intervals[j] = input.Moments(grid.left(i), grid.right(i));
  }, 256);
  return out;
}

ForcingIntegral IntervalForcing(const ReducedSystem& red, double a, double b) {
  if (!(b > a)) {
    throw Error(ErrorCode::kInvalidArgument, "IntervalForcing needs a < b");
  }
  const InputMoments mom = red.input.Moments(a, b);
  ForcingIntegral f;
  f.integral = red.forcing_matrix * mom.first;
  f.average = f.integral / (b - a);
  return f;
}

StepFactorCache::StepFactorCache(const ReducedSystem& red, bool transpose,
                                 double shift)
    : red_(&red), transpose_(transpose), shift_(shift) {}

Matrix StepFactorCache::StepMatrix(double k) const {
  const Matrix drift = transpose_ ? Matrix(red_->S.transpose()) : red_->S;
  return red_->E11 + k * (drift + shift_ * red_->E11);
}

void StepFactorCache::Prepare(const TimeGrid& grid) {
  for (int j = 0; j < grid.size(); ++j) Get(grid.step(j));
}

const LuFactor& StepFactorCache::Get(double k) {
  const double key = QuantizeStep(k);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(key, std::make_unique<LuFactor>(StepMatrix(key))).first;
  }
  return *it->second;
}

PiecewiseConstant SolvePrimal(const ReducedSystem& red, const TimeGrid& grid,
                              const Vector& x10) {
  return SolvePrimal(red, grid, x10, ComputeMoments(red.input, grid));
}

namespace {

PiecewiseConstant RunRecursion(const ReducedSystem& red, const TimeGrid& grid,
                               const Vector& x10, const GridMoments& moments,
                               double shift) {
  if (x10.size() != red.r() || !x10.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "initial value has wrong size");
  }
  if (static_cast<int>(moments.intervals.size()) != grid.size()) {
    throw Error(ErrorCode::kGridMismatch, "moments do not match grid");
  }
  StepFactorCache cache(red, false, shift);
  PiecewiseConstant x{grid, x10, {}};
  x.values.reserve(grid.size());
  Vector prev = x10;
  for (int j = 0; j < grid.size(); ++j) {
    const Vector rhs =
        red.E11 * prev + red.forcing_matrix * moments.intervals[j].first;
    prev = cache.Get(grid.step(j)).Solve(rhs);
    x.values.push_back(prev);
  }
  return x;
}

}  // namespace

PiecewiseConstant SolvePrimal(const ReducedSystem& red, const TimeGrid& grid,
                              const Vector& x10, const GridMoments& moments) {
  return RunRecursion(red, grid, x10, moments, 0.0);
}

GoalEvaluation LocalResiduals(const ReducedSystem& red,
                              const PiecewiseConstant& xk, double rho) {
  return LocalResiduals(red, xk, rho, ComputeMoments(red.input, xk.grid));
}

GoalEvaluation LocalResiduals(const ReducedSystem& red,
                              const PiecewiseConstant& xk, double rho,
                              const GridMoments& moments) {
  if (rho < 0.0) throw Error(ErrorCode::kInvalidArgument, "rho must be >= 0");
  const int N = xk.grid.size();
  if (xk.size() != N || static_cast<int>(moments.intervals.size()) != N) {
    throw Error(ErrorCode::kGridMismatch, "LocalResiduals: size mismatch");
  }
  GoalEvaluation goal;
  goal.rho = rho;
  goal.G.assign(N, 0.0);
  goal.sources.assign(N, Vector());
  const Matrix k_uu = red.Duu - red.Yu;
  const Matrix grad_u = 2.0 * red.Dxu - red.Yx.transpose();
  std::vector<double> energy(N);
  std::vector<Vector> e11x(N);
  std::vector<Vector> int_grad(N);
  ParallelFor(N, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double k = xk.grid.step(j);
    const Vector& x = xk.values[j];
    const InputMoments& mom = moments.intervals[j];
    const Vector dxx_x = red.Dxx * x;
    const Vector lin = 2.0 * red.Dxu.transpose() * x - red.Yx * x;
    const double int_g =
        k * x.dot(dxx_x) + lin.dot(mom.first) + (k_uu.cwiseProduct(mom.second)).sum();
    e11x[j] = red.E11 * x;
    const Vector& xp = xk.nodal(j);
    goal.G[j] = int_g + 0.5 * x.dot(e11x[j]) - 0.5 * xp.dot(red.E11 * xp);
    energy[j] = k * 0.5 * x.dot(e11x[j]);
    int_grad[j] = 2.0 * k * dxx_x + grad_u * mom.first;
  }, 64);
  ParallelFor(N, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double g_next = j + 1 < N ? goal.G[j + 1] : 0.0;
    goal.sources[j] = 2.0 * goal.G[j] * int_grad[j] +
                      (2.0 * (goal.G[j] - g_next) + rho * xk.grid.step(j)) *
                          e11x[j];
  }, 64);
  double qoi = 0.0;
  double aug = 0.0;
  for (int j = 0; j < N; ++j) {
    qoi += goal.G[j] * goal.G[j];
    aug += energy[j];
  }
  goal.qoi = qoi;
  goal.augmented = qoi + rho * aug;
  return goal;
}

std::pair<PiecewiseConstant, PiecewiseConstant> ScaledRecursionPair(
    const ReducedSystem& red, const TimeGrid& grid, const Vector& x10,
    double mu) {
  if (mu < 0.0) throw Error(ErrorCode::kInvalidArgument, "mu must be >= 0");
  const GridMoments mom = ComputeMoments(red.input, grid);
  return {RunRecursion(red, grid, x10, mom, 0.0),
          RunRecursion(red, grid, x10, mom, mu)};
}

double DiscreteStabilityNorm(const PiecewiseConstant& x) {
  const int N = x.size();
  double s = x.values[N - 1].squaredNorm();
  for (int j = 1; j < N; ++j) s += (x.values[j] - x.values[j - 1]).squaredNorm();
  for (int j = 0; j < N; ++j) s += x.grid.step(j) * x.values[j].squaredNorm();
  return s;
}

double ForcingSquaredIntegral(const ReducedSystem& red,
                              const GridMoments& moments) {
  const Matrix ftf = red.forcing_matrix.transpose() * red.forcing_matrix;
  double s = 0.0;
  for (const auto& mom : moments.intervals) s += ftf.cwiseProduct(mom.second).sum();
  return s;
}

double PrimalStabilityBound(const ReducedSystem& red,
                            const GridMoments& moments, const Vector& x10,
                            double mu, double c) {
  const double am = red.alpha + mu;
  if (!(am > 0.0)) return std::numeric_limits<double>::infinity();
  const double lmin = LambdaMinSym(red.E11);
  return c / std::min(am, lmin) *
         (ForcingSquaredIntegral(red, moments) / am + x10.dot(red.E11 * x10));
}

double ScalingConstant(double mu, double T) {
  return 1.0 + mu * T +
         mu * std::max(mu * T + 0.5 * mu * T * T, 2.0 * mu * T + 2.0);
}

}  // namespace phdae
