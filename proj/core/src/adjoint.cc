#include "phdae/adjoint.h"

#include <cmath>
#include <limits>
#include <map>

#include "phdae/error.h"
#include "phdae/parallel.h"

namespace phdae {
namespace {

void CheckSources(const TimeGrid& grid, const std::vector<Vector>& sources,
                  int r) {
  if (static_cast<int>(sources.size()) != grid.size()) {
    throw Error(ErrorCode::kGridMismatch, "sources do not match grid");
  }
  for (const auto& s : sources) {
    if (s.size() != r) {
      throw Error(ErrorCode::kGridMismatch, "source has wrong dimension");
    }
  }
}

double StackedNorm(const std::vector<Vector>& v) {
  double s = 0.0;
  for (const auto& x : v) s += x.squaredNorm();
  return std::sqrt(s);
}

double RelativeResidual(const ReducedSystem& red, const TimeGrid& grid,
                        const std::vector<Vector>& z,
                        const std::vector<Vector>& sources) {
  const double res = AdjointBlockResidual(red, grid, z, sources);
  const double ref = StackedNorm(sources);
  return ref > 0.0 ? res / ref : res;
}

}  // namespace

AdjointSolve SolveAdjointDirect(const ReducedSystem& red, const TimeGrid& grid,
                                const std::vector<Vector>& sources,
                                StepFactorCache* cache) {
  CheckSources(grid, sources, red.r());
  StepFactorCache local(red, true);
  StepFactorCache& c = cache ? *cache : local;
  const int N = grid.size();
  AdjointSolve out;
  out.method = AdjointMethod::kDirect;
  out.z.grid = grid;
  out.z.initial = Vector::Zero(red.r());
  out.z.values.assign(N, Vector());
  Vector next = Vector::Zero(red.r());
  for (int j = N - 1; j >= 0; --j) {
    next = c.Get(grid.step(j)).Solve(Vector(red.E11 * next + sources[j]));
    out.z.values[j] = next;
  }
  out.residual_norm = RelativeResidual(red, grid, out.z.values, sources);
  return out;
}

JacobiIteration::JacobiIteration(const ReducedSystem& red, const TimeGrid& grid,
                                 const std::vector<Vector>& sources,
                                 StepFactorCache* cache)
    : red_(&red),
      grid_(grid),
      sources_(&sources),
      own_cache_(red, true),
      cache_(cache ? cache : &own_cache_) {
  CheckSources(grid, sources, red.r());
  cache_->Prepare(grid_);
  factors_.resize(grid_.size());
  for (int j = 0; j < grid_.size(); ++j) factors_[j] = &cache_->Get(grid_.step(j));
  z_.assign(grid_.size(), Vector::Zero(red.r()));
}

void JacobiIteration::Sweep() {
  const int N = grid_.size();
  std::vector<Vector> next(N);
  const Matrix& e11 = red_->E11;
  ParallelFor(N, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    // Same arithmetic as the direct recursion, so N sweeps reproduce it.
    const Vector upper = j + 1 < N ? z_[j + 1] : Vector::Zero(red_->r());
    next[j] = factors_[j]->Solve(Vector(e11 * upper + (*sources_)[j]));
  }, 8);
  double diff = 0.0;
  double norm = 0.0;
  for (int j = 0; j < N; ++j) {
    const Vector d = next[j] - z_[j];
    diff += d.dot(e11 * d);
    norm += next[j].dot(e11 * next[j]);
  }
  last_update_ = norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
  z_ = std::move(next);
  ++sweeps_;
}

AdjointSolve JacobiIteration::Result() const {
  AdjointSolve out;
  out.method = AdjointMethod::kJacobi;
  out.sweeps = sweeps_;
  out.z.grid = grid_;
  out.z.initial = Vector::Zero(red_->r());
  out.z.values = z_;
  out.residual_norm = RelativeResidual(*red_, grid_, z_, *sources_);
  return out;
}

AdjointSolve JacobiSolve(const ReducedSystem& red, const TimeGrid& grid,
                         const std::vector<Vector>& sources, int sweeps,
                         StepFactorCache* cache) {
  if (sweeps < 1) throw Error(ErrorCode::kInvalidArgument, "sweeps must be >= 1");
  JacobiIteration it(red, grid, sources, cache);
  const int n = std::min(sweeps, grid.size());
  for (int l = 0; l < n; ++l) it.Sweep();
  return it.Result();
}

AdjointSolve JacobiSolveToTolerance(const ReducedSystem& red,
                                    const TimeGrid& grid,
                                    const std::vector<Vector>& sources,
                                    double tol) {
  JacobiIteration it(red, grid, sources);
  do {
    it.Sweep();
  } while (it.sweeps() < grid.size() && it.last_update() >= tol);
  return it.Result();
}

double AdjointBlockResidual(const ReducedSystem& red, const TimeGrid& grid,
                            const std::vector<Vector>& z,
                            const std::vector<Vector>& sources) {
  const int N = grid.size();
  if (static_cast<int>(z.size()) != N) {
    throw Error(ErrorCode::kGridMismatch, "adjoint does not match grid");
  }
  const Matrix st = red.S.transpose();
  double s = 0.0;
  for (int j = 0; j < N; ++j) {
    Vector row = red.E11 * z[j] + grid.step(j) * (st * z[j]) - sources[j];
    if (j + 1 < N) row -= red.E11 * z[j + 1];
    s += row.squaredNorm();
  }
  return std::sqrt(s);
}

Matrix AmplificationMatrix(const ReducedSystem& red, double k) {
  const Matrix m = red.E11 + k * red.S.transpose();
  return LuFactor(m).Solve(red.E11);
}

ContractionReport ComputeContractionReport(const ReducedSystem& red,
                                           const TimeGrid& grid) {
  ContractionReport rep;
  rep.mu_min = red.mu_min;
  rep.coercive = red.alpha > 0.0;
  const int N = grid.size();
  // Distinct steps only; uniform and bisected grids repeat them heavily.
  std::map<double, double> radius;
  for (int j = 0; j < N; ++j) radius.emplace(grid.step(j), 0.0);
  std::vector<double> keys;
  for (const auto& [k, v] : radius) keys.push_back(k);
  std::vector<double> values(keys.size());
  ParallelFor(keys.size(), [&](std::size_t i) {
    values[i] = SpectralRadius(AmplificationMatrix(red, keys[i]));
  }, 1);
  for (std::size_t i = 0; i < keys.size(); ++i) radius[keys[i]] = values[i];
  rep.rho.resize(N);
  rep.bound.resize(N);
  for (int j = 0; j < N; ++j) {
    const double k = grid.step(j);
    rep.rho[j] = radius[k];
    rep.bound[j] = 1.0 / (1.0 + k * std::max(rep.mu_min, 0.0));
    rep.worst = std::max(rep.worst, rep.rho[j]);
  }
  return rep;
}

double AdjointStabilityNorm(const PiecewiseConstant& z) {
  const int N = z.size();
  double s = z.values[0].squaredNorm();
  for (int j = 1; j < N; ++j) s += (z.values[j] - z.values[j - 1]).squaredNorm();
  for (int j = 0; j + 1 < N; ++j) s += z.grid.step(j) * z.values[j].squaredNorm();
  return s;
}

double AdjointStabilityBound(const ReducedSystem& red, const TimeGrid& grid,
                             const std::vector<Vector>& sources, double mu,
                             double c) {
  const double am = red.alpha + mu;
  if (!(am > 0.0)) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (int j = 0; j < grid.size(); ++j) s += sources[j].squaredNorm() / grid.step(j);
  return c / (std::min(0.5 * am, LambdaMinSym(red.E11)) * am) * s;
}

}  // namespace phdae
