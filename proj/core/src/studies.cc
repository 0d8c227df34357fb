#include <algorithm>
#include <cmath>
#include <limits>

#include "phdae/bench.h"
#include "phdae/error.h"
#include "phdae/parallel.h"

namespace phdae::bench {

double FitLogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kStudyError, "slope fit needs two or more points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

UniformRow UniformRun(const ReducedSystem& red, int N, double rho) {
  const TimeGrid grid = TimeGrid::Uniform(red.T, N);
  const GridMoments mom = ComputeMoments(red.input, grid);
  const PiecewiseConstant x = SolvePrimal(red, grid, red.x10, mom);
  const GoalEvaluation goal = LocalResiduals(red, x, rho, mom);
  return {N, goal.qoi, goal.augmented};
}

namespace {

double TailSlope(const std::vector<UniformRow>& rows) {
  const std::size_t start = rows.size() > 4 ? rows.size() - 4 : 0;
  std::vector<double> x, y;
  for (std::size_t i = start; i < rows.size(); ++i) {
    x.push_back(rows[i].N);
    y.push_back(rows[i].qoi);
  }
  return FitLogLogSlope(x, y);
}

}  // namespace

ConvergenceResult ConvergenceStudy(const ReducedSystem& red,
                                   const std::vector<int>& N_list,
                                   AdaptiveConfig config) {
  if (N_list.size() < 2 || !std::is_sorted(N_list.begin(), N_list.end())) {
    throw Error(ErrorCode::kStudyError, "N list must be increasing");
  }
  ConvergenceResult out;
  out.uniform.resize(N_list.size());
  ParallelFor(N_list.size(), [&](std::size_t i) {
    out.uniform[i] = UniformRun(red, N_list[i], config.rho);
  }, 1);
  out.uniform_slope = TailSlope(out.uniform);

  config.max_N = std::min(config.max_N, N_list.back());
  config.tol = std::numeric_limits<double>::min();
  config.max_iter = std::max(config.max_iter, 1000);
  const AdaptiveRun run = AdaptiveLoop(red, config);
  for (const auto& rec : run.iterations) {
    out.dwr.push_back({rec.N, rec.qoi, rec.augmented});
  }
  if (out.dwr.size() >= 2) out.dwr_slope = TailSlope(out.dwr);
  return out;
}

std::vector<CostRow> CostToTarget(const ReducedSystem& red,
                                  const std::vector<double>& targets,
                                  AdaptiveConfig config) {
  if (targets.empty()) throw Error(ErrorCode::kStudyError, "no targets");
  for (std::size_t i = 1; i < targets.size(); ++i) {
    if (!(targets[i] < targets[i - 1])) {
      throw Error(ErrorCode::kStudyError, "targets must be decreasing");
    }
  }
  const int n0 = config.initial_grid ? config.initial_grid->size() : config.initial_N;
  std::vector<CostRow> rows(targets.size());
  // Uniform thresholds are independent of one another.
  ParallelFor(targets.size(), [&](std::size_t t) {
    const double target = targets[t];
    int lo = 0;
    int hi = n0;
    while (UniformRun(red, hi, config.rho).qoi > target) {
      lo = hi;
      hi *= 2;
      if (hi > config.max_N) {
        throw Error(ErrorCode::kTargetUnreachable,
                    "uniform grid cannot reach target within max_N");
      }
    }
    if (lo > 0) {
      while (hi - lo > std::max(1, static_cast<int>(0.02 * hi))) {
        const int mid = lo + (hi - lo) / 2;
        if (UniformRun(red, mid, config.rho).qoi <= target) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
    }
    rows[t].target = target;
    rows[t].N_uniform = hi;
  }, 1);

  std::size_t next = 0;
  config.tol = std::numeric_limits<double>::min();
  config.max_iter = std::max(config.max_iter, 10000);
  auto user_observer = config.observer;
  // The loop runs until the tightest target is met; stop early via max_N
  // is reported as unreachable.
  struct Done {};
  config.observer = [&](const IterationData& d) {
    if (user_observer) user_observer(d);
    while (next < targets.size() && d.goal->qoi <= targets[next]) {
      rows[next].N_dwr = d.primal->grid.size();
      ++next;
    }
    if (next == targets.size()) throw Done{};
  };
  try {
    AdaptiveLoop(red, config);
  } catch (const Done&) {
  }
  if (next < targets.size()) {
    throw Error(ErrorCode::kTargetUnreachable,
                "adaptive run stopped before reaching target");
  }
  for (auto& row : rows) {
    row.savings = 1.0 - static_cast<double>(row.N_dwr) / row.N_uniform;
  }
  return rows;
}

double StateEnergyError(const ReducedSystem& red, const PiecewiseConstant& xk,
                        const PiecewiseConstant& reference) {
  const auto& a = xk.grid.nodes();
  const auto& b = reference.grid.nodes();
  if (std::abs(a.back() - b.back()) > 1e-12 * b.back()) {
    throw Error(ErrorCode::kGridMismatch, "grids cover different horizons");
  }
  std::vector<double> u;
  u.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  u.erase(std::unique(u.begin(), u.end()), u.end());
  u.back() = std::max(a.back(), b.back());
  double s = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    const double lo = u[i];
    const double hi = u[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    while (ia + 1 < a.size() - 1 && a[ia + 1] < mid) ++ia;
    while (ib + 1 < b.size() - 1 && b[ib + 1] < mid) ++ib;
    const Vector d = reference.values[ib] - xk.values[ia];
    s += (hi - lo) * 0.5 * d.dot(red.E11 * d);
  }
  return std::sqrt(s);
}

EffectivityStudyResult EffectivityStudy(const ReducedSystem& red,
                                        AdaptiveConfig config, int N_ref) {
  EffectivityStudyResult out;
  out.N_ref = N_ref;
  out.j_ref = UniformRun(red, N_ref, config.rho).augmented;
  config.tol = std::numeric_limits<double>::min();
  config.max_iter = std::max(config.max_iter, 10000);
  const AdaptiveRun run = AdaptiveLoop(red, config);
  out.rows = Effectivity(run, out.j_ref);
  return out;
}

std::vector<JacobiStudyRow> JacobiStudy(const ReducedSystem& red,
                                        AdaptiveConfig config) {
  std::vector<JacobiStudyRow> rows;
  auto user_observer = config.observer;
  config.observer = [&](const IterationData& d) {
    if (user_observer) user_observer(d);
    const StabilizationResult st =
        MarkedSetStabilization(red, *d.primal, *d.goal, *d.moments,
                               d.indicators->variant, config.theta);
    JacobiStudyRow row;
    row.iteration = d.iteration;
    row.N = d.primal->grid.size();
    row.exact_marked = static_cast<int>(st.exact_marked.size());
    row.k_star = st.k_star;
    row.speedup = static_cast<double>(row.N) / st.k_star;
    row.rho_worst = ComputeContractionReport(red, d.primal->grid).worst;
    rows.push_back(row);
  };
  config.tol = std::numeric_limits<double>::min();
  AdaptiveLoop(red, config);
  return rows;
}

std::vector<TradeoffPoint> AugmentedTradeoffRun(
    const ReducedSystem& red, AdaptiveConfig config,
    const PiecewiseConstant& reference) {
  std::vector<TradeoffPoint> pts;
  auto user_observer = config.observer;
  config.observer = [&](const IterationData& d) {
    if (user_observer) user_observer(d);
    pts.push_back({d.iteration, d.primal->grid.size(), d.goal->qoi,
                   StateEnergyError(red, *d.primal, reference)});
  };
  config.tol = std::numeric_limits<double>::min();
  config.max_iter = std::max(config.max_iter, 10000);
  AdaptiveLoop(red, config);
  return pts;
}

double InterpolateLogLog(const std::vector<TradeoffPoint>& run, double N_query,
                         bool state_error) {
  auto value = [&](const TradeoffPoint& p) {
    return state_error ? p.state_error : p.qoi;
  };
  for (std::size_t i = 1; i < run.size(); ++i) {
    if (run[i - 1].N <= N_query && N_query <= run[i].N) {
      if (run[i].N == run[i - 1].N) return value(run[i]);
      const double s = (std::log(N_query) - std::log(run[i - 1].N)) /
                       (std::log(run[i].N) - std::log(run[i - 1].N));
      return std::exp((1.0 - s) * std::log(value(run[i - 1])) +
                      s * std::log(value(run[i])));
    }
  }
  throw Error(ErrorCode::kStudyError, "query N outside the run");
}

WaveformTable NodeVoltages(const ReducedSystem& red, int N,
                           const std::vector<int>& nodes) {
  for (int node : nodes) {
    if (node < 0 || node >= red.n()) {
      throw Error(ErrorCode::kConfigError, "node index out of range");
    }
  }
  const TimeGrid grid = TimeGrid::Uniform(red.T, N);
  const PiecewiseConstant x = SolvePrimal(red, grid, red.x10);
  WaveformTable tab;
  tab.nodes = nodes;
  tab.t = grid.nodes();
  tab.values.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    const Vector full = red.FullState(x.nodal(i), grid.node(i));
    for (int node : nodes) tab.values[i].push_back(full(node));
  }
  return tab;
}

}  // namespace phdae::bench
