#include "phdae/estimator.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "phdae/error.h"
#include "phdae/parallel.h"

namespace phdae {
namespace {

void CheckSameGrid(const PiecewiseConstant& a, const PiecewiseConstant& b) {
  if (!(a.grid == b.grid) || a.size() != b.size()) {
    throw Error(ErrorCode::kGridMismatch, "primal and adjoint grids differ");
  }
}

double StackedNorm(const std::vector<Vector>& v) {
  double s = 0.0;
  for (const auto& x : v) s += x.squaredNorm();
  return std::sqrt(s);
}

}  // namespace

WeightFunction ReconstructWeight(const PiecewiseConstant& z) {
  const int N = z.size();
  WeightFunction w;
  w.grid = z.grid;
  const auto r = z.values.at(0).size();
  w.nodal.resize(N + 1);
  w.nodal[0] = z.values[0];
  for (int i = 1; i < N; ++i) w.nodal[i] = 0.5 * (z.values[i - 1] + z.values[i]);
  w.nodal[N] = Vector::Zero(r);
  w.left.resize(N);
  w.right.resize(N);
  for (int j = 0; j < N; ++j) {
    w.left[j] = w.nodal[j] - z.values[j];
    w.right[j] = w.nodal[j + 1] - z.values[j];
  }
  return w;
}

const char* IndicatorVariantName(IndicatorVariant v) {
  return v == IndicatorVariant::kFull ? "full" : "simplified";
}

IndicatorVariant ParseIndicatorVariant(const std::string& name) {
  if (name == "full") return IndicatorVariant::kFull;
  if (name == "simplified") return IndicatorVariant::kSimplified;
  throw Error(ErrorCode::kConfigError, "unknown indicator variant " + name);
}

double IndicatorSet::AbsSum() const {
  double s = 0.0;
  for (double e : eta) s += std::abs(e);
  return s;
}

IndicatorSet ComputeIndicators(const ReducedSystem& red,
                               const PiecewiseConstant& xk,
                               const PiecewiseConstant& z,
                               IndicatorVariant variant) {
  return ComputeIndicators(red, xk, z, variant,
                           ComputeMoments(red.input, xk.grid));
}

IndicatorSet ComputeIndicators(const ReducedSystem& red,
                               const PiecewiseConstant& xk,
                               const PiecewiseConstant& z,
                               IndicatorVariant variant,
                               const GridMoments& moments) {
  CheckSameGrid(xk, z);
  const int N = xk.size();
  if (static_cast<int>(moments.intervals.size()) != N) {
    throw Error(ErrorCode::kGridMismatch, "moments do not match grid");
  }
  IndicatorSet ind;
  ind.variant = variant;
  ind.eta.assign(N, 0.0);
  std::optional<WeightFunction> w;
  if (variant == IndicatorVariant::kFull) w = ReconstructWeight(z);
  ParallelFor(N, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double k = xk.grid.step(j);
    const Vector res =
        red.forcing_matrix * moments.intervals[j].first / k - red.S * xk.values[j];
    const Vector jump = red.E11 * xk.Jump(j);
    if (variant == IndicatorVariant::kFull) {
      ind.eta[j] = res.dot(0.5 * k * (w->left[j] + w->right[j])) -
                   jump.dot(w->left[j]);
    } else {
      if (j == 0) return;
      const Vector dz = z.values[j] - z.values[j - 1];
      ind.eta[j] = 0.5 * k * res.dot(dz) + jump.dot(dz);
    }
  }, 64);
  ind.eta_sum = std::accumulate(ind.eta.begin(), ind.eta.end(), 0.0);
  ind.eta_tot = std::abs(ind.eta_sum);
  return ind;
}

PiecewiseLinearProbe PiecewiseLinearProbe::Constant(
    const std::vector<Vector>& values) {
  return {values, values};
}

PiecewiseLinearProbe PiecewiseLinearProbe::Continuous(
    const std::vector<Vector>& nodal) {
  PiecewiseLinearProbe p;
  for (std::size_t j = 0; j + 1 < nodal.size(); ++j) {
    p.left.push_back(nodal[j]);
    p.right.push_back(nodal[j + 1]);
  }
  return p;
}

double PrimalResidual(const ReducedSystem& red, const PiecewiseConstant& xk,
                      const GridMoments& moments,
                      const std::vector<Vector>& phi) {
  double s = 0.0;
  for (int j = 0; j < xk.size(); ++j) {
    const Vector res = red.forcing_matrix * moments.intervals[j].first -
                       xk.grid.step(j) * (red.S * xk.values[j]) -
                       red.E11 * xk.Jump(j);
    s += res.dot(phi[j]);
  }
  return s;
}

Vector WeightedFirstMoment(const InputSignal& input, double a, double b) {
  const double k = b - a;
  return Gauss2Integrate(
      [&](double t) -> Vector { return input.Evaluate(t) * ((t - a) / k); }, a,
      b, input.Kinks(a, b));
}

double DualResidualDiagnostic(const ReducedSystem& red,
                              const PiecewiseConstant& xk,
                              const PiecewiseConstant& z,
                              const GoalEvaluation& goal,
                              const PiecewiseLinearProbe& v) {
  CheckSameGrid(xk, z);
  const int N = xk.size();
  if (static_cast<int>(v.left.size()) != N ||
      static_cast<int>(v.right.size()) != N ||
      static_cast<int>(goal.G.size()) != N) {
    throw Error(ErrorCode::kGridMismatch, "probe does not match grid");
  }
  const Matrix grad_u = 2.0 * red.Dxu - red.Yx.transpose();
  std::vector<double> terms(N);
  ParallelFor(N, [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double a = xk.grid.left(j);
    const double b = xk.grid.right(j);
    const double k = b - a;
    const Vector& x = xk.values[j];
    const InputMoments mom = red.input.Moments(a, b);
    const Vector vbar = 0.5 * (v.left[j] + v.right[j]);
    const Vector slope = v.right[j] - v.left[j];
    double int_grad_v = (2.0 * k * (red.Dxx * x) + grad_u * mom.first).dot(vbar);
    if (slope.squaredNorm() > 0.0) {
      const Vector centered =
          WeightedFirstMoment(red.input, a, b) - 0.5 * mom.first;
      int_grad_v += (grad_u * centered).dot(slope);
    }
    const Vector e11x = red.E11 * x;
    const Vector prev_end =
        j == 0 ? Vector(Vector::Zero(red.r())) : Vector(v.right[j - 1]);
    const double dH = e11x.dot(v.right[j]) -
                      (red.E11 * xk.nodal(j)).dot(prev_end);
    const double goal_part =
        2.0 * goal.G[j] * (int_grad_v + dH) + goal.rho * k * e11x.dot(vbar);
    const double form_part =
        (red.E11 * (v.right[j] - prev_end)).dot(z.values[j]) +
        k * (red.S * vbar).dot(z.values[j]);
    terms[j] = goal_part - form_part;
  }, 64);
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

std::vector<int> DorflerMark(const IndicatorSet& ind, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must lie in (0, 1)");
  }
  const int N = ind.size();
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(ind.eta[a]) > std::abs(ind.eta[b]);
  });
  const double total = ind.AbsSum();
  if (!(total > 0.0)) throw Error(ErrorCode::kAllZero, "all indicators vanish");
  std::vector<int> marked;
  double acc = 0.0;
  for (int j : order) {
    if (std::abs(ind.eta[j]) == 0.0) break;
    marked.push_back(j);
    acc += std::abs(ind.eta[j]);
    if (acc >= theta * total) break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

TimeGrid Bisect(const TimeGrid& grid, const std::vector<int>& marked) {
  const int N = grid.size();
  std::vector<char> flag(N, 0);
  for (int j : marked) {
    if (j < 0 || j >= N) {
      throw Error(ErrorCode::kInvalidArgument, "marked interval out of range");
    }
    flag[j] = 1;
  }
  std::vector<double> nodes;
  nodes.reserve(N + 1 + marked.size());
  const double floor = 1e-14 * grid.T();
  for (int j = 0; j < N; ++j) {
    nodes.push_back(grid.left(j));
    if (flag[j]) {
      const double mid = grid.midpoint(j);
      if (!(mid - grid.left(j) > floor && grid.right(j) - mid > floor)) {
        throw Error(ErrorCode::kStepUnderflow, "bisection step below 1e-14 T");
      }
      nodes.push_back(mid);
    }
  }
  nodes.push_back(grid.T());
  return TimeGrid(std::move(nodes));
}

const char* TerminationName(Termination t) {
  switch (t) {
    case Termination::kTolReached: return "TolReached";
    case Termination::kMaxIter: return "MaxIter";
    case Termination::kMaxN: return "MaxN";
    case Termination::kAllZero: return "AllZero";
  }
  return "Unknown";
}

AdaptiveRun AdaptiveLoop(const PhDaeSystem& sys, const AdaptiveConfig& config) {
  const ValidationReport rep = ValidateStructure(sys);
  if (!rep.ok()) throw Error(ErrorCode::kModelError, rep.FailureSummary());
  return AdaptiveLoop(Reduce(sys), config);
}

AdaptiveRun AdaptiveLoop(const ReducedSystem& red, const AdaptiveConfig& config) {
  if (!(config.tol > 0.0)) {
    throw Error(ErrorCode::kConfigError, "TOL must be positive");
  }
  if (config.rho < 0.0) throw Error(ErrorCode::kConfigError, "rho must be >= 0");
  if (config.max_iter < 1) {
    throw Error(ErrorCode::kConfigError, "max_iter must be >= 1");
  }
  TimeGrid grid = config.initial_grid ? *config.initial_grid
                                      : TimeGrid::Uniform(red.T, config.initial_N);
  if (std::abs(grid.T() - red.T) > 1e-12 * red.T) {
    throw Error(ErrorCode::kGridMismatch, "initial grid does not end at T");
  }
  AdaptiveRun run;
  StepFactorCache adjoint_cache(red, true);
  for (int it = 0;; ++it) {
    const auto start = std::chrono::steady_clock::now();
    const GridMoments moments = ComputeMoments(red.input, grid);
    const PiecewiseConstant xk = SolvePrimal(red, grid, red.x10, moments);
    const GoalEvaluation goal = LocalResiduals(red, xk, config.rho, moments);
    const AdjointSolve z =
        config.adjoint == AdjointMethod::kDirect
            ? SolveAdjointDirect(red, grid, goal.sources, &adjoint_cache)
            : JacobiSolve(red, grid, goal.sources,
                          config.jacobi_sweeps > 0 ? config.jacobi_sweeps
                                                   : grid.size(),
                          &adjoint_cache);
    const IndicatorSet ind =
        ComputeIndicators(red, xk, z.z, config.variant, moments);

    IterationRecord rec;
    rec.iteration = it;
    rec.N = grid.size();
    rec.grid = grid;
    rec.qoi = goal.qoi;
    rec.augmented = goal.augmented;
    rec.eta_sum = ind.eta_sum;
    rec.eta_tot = ind.eta_tot;
    if (config.observer) {
      config.observer({it, &red, &moments, &xk, &goal, &z, &ind});
    }

    std::optional<Termination> stop;
    std::optional<TimeGrid> next;
    if (ind.eta_tot <= config.tol) {
      stop = Termination::kTolReached;
    } else if (it + 1 >= config.max_iter) {
      stop = Termination::kMaxIter;
    } else {
      try {
        rec.marked = DorflerMark(ind, config.theta);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kAllZero) throw;
        stop = Termination::kAllZero;
      }
      if (!stop) {
        if (grid.size() + static_cast<int>(rec.marked.size()) > config.max_N) {
          stop = Termination::kMaxN;
        } else {
          next = Bisect(grid, rec.marked);
        }
      }
    }
    rec.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    run.iterations.push_back(std::move(rec));
    if (stop) {
      run.reason = *stop;
      run.final_grid = grid;
      return run;
    }
    grid = std::move(*next);
  }
}

double EffectivityIndex(double eta_sum, double j_ref, double j_k) {
  const double err = std::abs(j_ref - j_k);
  if (err < 1e2 * std::numeric_limits<double>::epsilon() * std::abs(j_ref) ||
      err == 0.0) {
    throw Error(ErrorCode::kDegenerateError, "reference and iterate coincide");
  }
  return std::abs(eta_sum) / err;
}

std::vector<EffectivityRow> Effectivity(const AdaptiveRun& run, double j_ref) {
  std::vector<EffectivityRow> rows;
  for (const auto& rec : run.iterations) {
    EffectivityRow row;
    row.iteration = rec.iteration;
    row.N = rec.N;
    row.error = std::abs(j_ref - rec.augmented);
    row.eta_sum = rec.eta_sum;
    try {
      row.ieff = EffectivityIndex(rec.eta_sum, j_ref, rec.augmented);
    } catch (const Error&) {
      row.degenerate = true;
    }
    rows.push_back(row);
  }
  return rows;
}

StabilizationResult MarkedSetStabilization(
    const ReducedSystem& red, const PiecewiseConstant& xk,
    const GoalEvaluation& goal, const GridMoments& moments,
    IndicatorVariant variant, double theta, int window, bool full_history) {
  if (window < 1) throw Error(ErrorCode::kInvalidArgument, "window must be >= 1");
  const TimeGrid& grid = xk.grid;
  const int N = grid.size();
  StepFactorCache cache(red, true);
  const AdjointSolve exact = SolveAdjointDirect(red, grid, goal.sources, &cache);
  const IndicatorSet ind_ex =
      ComputeIndicators(red, xk, exact.z, variant, moments);
  StabilizationResult out;
  out.exact_marked = DorflerMark(ind_ex, theta);
  const double z_norm = StackedNorm(exact.z.values);
  double eta_norm = 0.0;
  for (double e : ind_ex.eta) eta_norm += e * e;
  eta_norm = std::sqrt(eta_norm);

  JacobiIteration jac(red, grid, goal.sources, &cache);
  PiecewiseConstant zl = exact.z;
  int run_start = 0;  // first sweep of the current matching run
  int k_star = 0;
  for (int l = 1; l <= N; ++l) {
    jac.Sweep();
    zl.values = jac.iterate();
    const IndicatorSet ind = ComputeIndicators(red, xk, zl, variant, moments);
    StabilizationSweep s;
    s.sweep = l;
    s.matches = DorflerMark(ind, theta) == out.exact_marked;
    double dz = 0.0;
    for (int j = 0; j < N; ++j) dz += (zl.values[j] - exact.z.values[j]).squaredNorm();
    s.adjoint_error = z_norm > 0.0 ? std::sqrt(dz) / z_norm : std::sqrt(dz);
    double de = 0.0;
    for (int j = 0; j < N; ++j) de += std::pow(ind.eta[j] - ind_ex.eta[j], 2);
    s.indicator_error = eta_norm > 0.0 ? std::sqrt(de) / eta_norm : std::sqrt(de);
    out.history.push_back(s);
    if (s.matches) {
      if (run_start == 0) run_start = l;
    } else {
      run_start = 0;
    }
    // Sweeps past N reproduce the exact adjoint, so a run that reaches N
    // extends indefinitely.
    if (k_star == 0 && run_start > 0 &&
        (l - run_start + 1 >= window || l == N)) {
      k_star = run_start;
      if (!full_history) break;
    }
  }
  out.k_star = k_star > 0 ? k_star : N;
  return out;
}

}  // namespace phdae
