#include "phdae_cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "phdae/bench.h"
#include "phdae/error.h"
#include "phdae/parallel.h"
#include "phdae_cli/artifacts.h"
#include "phdae_cli/model_io.h"

namespace phdae::cli {
namespace {

using nlohmann::json;

bool IsBuiltin(const std::string& name) {
  return name == "academic" || name == "tline" || name == "tline-reg";
}

struct Context {
  const RunConfig* config;
  PhDaeSystem sys;
  ReducedSystem red;
  AdaptiveConfig adaptive;
  ArtifactWriter* out;
  std::ostream* log;
};

AdaptiveConfig MakeAdaptiveConfig(const RunConfig& c) {
  AdaptiveConfig a = bench::DefaultAdaptiveConfig(IsBuiltin(c.model) ? c.model : "");
  if (!IsBuiltin(c.model)) a.variant = IndicatorVariant::kFull;
  if (c.N) a.initial_N = *c.N;
  if (c.tol) a.tol = *c.tol;
  if (c.theta) a.theta = *c.theta;
  if (c.rho) a.rho = *c.rho;
  if (c.max_iter) a.max_iter = *c.max_iter;
  if (c.max_N) a.max_N = *c.max_N;
  if (c.indicator) a.variant = ParseIndicatorVariant(*c.indicator);
  if (c.adjoint) {
    if (*c.adjoint == "direct") {
      a.adjoint = AdjointMethod::kDirect;
    } else if (*c.adjoint == "jacobi") {
      a.adjoint = AdjointMethod::kJacobi;
    } else {
      throw Error(ErrorCode::kConfigError, "unknown adjoint method " + *c.adjoint);
    }
  }
  if (c.sweeps) a.jacobi_sweeps = *c.sweeps;
  if (a.initial_N < 1) throw Error(ErrorCode::kConfigError, "N must be >= 1");
  if (!(a.theta > 0.0 && a.theta < 1.0)) {
    throw Error(ErrorCode::kConfigError, "theta must lie in (0, 1)");
  }
  if (!(a.tol > 0.0)) throw Error(ErrorCode::kConfigError, "tol must be positive");
  if (a.rho < 0.0) throw Error(ErrorCode::kConfigError, "rho must be >= 0");
  if (a.max_iter < 1 || a.max_N < 1) {
    throw Error(ErrorCode::kConfigError, "safety limits must be positive");
  }
  if (a.jacobi_sweeps < 0) throw Error(ErrorCode::kConfigError, "sweeps must be >= 0");
  return a;
}

json Summary(const Context& ctx) {
  return {{"command", ctx.config->command},
          {"model", ctx.config->model},
          {"r", ctx.red.r()},
          {"n", ctx.red.n()},
          {"alpha", ctx.red.alpha},
          {"mu_min", ctx.red.mu_min}};
}

std::string IterationFile(int it) {
  std::ostringstream os;
  os << "indicators_" << std::setw(3) << std::setfill('0') << it << ".csv";
  return os.str();
}

void WriteIndicatorCsv(ArtifactWriter& out, const IterationData& d) {
  std::vector<std::vector<double>> rows;
  const TimeGrid& grid = d.primal->grid;
  for (int j = 0; j < grid.size(); ++j) {
    const double g = std::abs(d.goal->G[j]);
    const double zn = d.adjoint->z.values[j].norm();
    rows.push_back({grid.midpoint(j), grid.step(j), d.indicators->eta[j], g, zn,
                    g * zn});
  }
  out.WriteCsv(IterationFile(d.iteration),
               {"t_mid", "k", "eta", "abs_G", "z_norm", "abs_G_z_norm"}, rows);
}

json RunJson(const Context& ctx, const AdaptiveRun& run,
             const std::vector<EffectivityRow>* eff) {
  json iters = json::array();
  for (std::size_t i = 0; i < run.iterations.size(); ++i) {
    const auto& rec = run.iterations[i];
    json r = {{"iteration", rec.iteration}, {"N", rec.N},
              {"qoi", rec.qoi},             {"augmented", rec.augmented},
              {"eta_sum", rec.eta_sum},     {"eta_tot", rec.eta_tot},
              {"marked", rec.marked},       {"seconds", rec.seconds}};
    if (eff && !(*eff)[i].degenerate) r["I_eff"] = (*eff)[i].ieff;
    iters.push_back(std::move(r));
  }
  const AdaptiveConfig& a = ctx.adaptive;
  return {{"model", ctx.config->model},
          {"config",
           {{"tol", a.tol},
            {"theta", a.theta},
            {"rho", a.rho},
            {"max_iter", a.max_iter},
            {"max_N", a.max_N},
            {"indicator", IndicatorVariantName(a.variant)},
            {"adjoint", a.adjoint == AdjointMethod::kDirect ? "direct" : "jacobi"},
            {"initial_N", a.initial_N}}},
          {"termination", TerminationName(run.reason)},
          {"iterations", iters}};
}

void Solve(Context& ctx) {
  const int N = ctx.adaptive.initial_N;
  const TimeGrid grid = TimeGrid::Uniform(ctx.red.T, N);
  const GridMoments mom = ComputeMoments(ctx.red.input, grid);
  const PiecewiseConstant x = SolvePrimal(ctx.red, grid, ctx.red.x10, mom);
  const GoalEvaluation goal = LocalResiduals(ctx.red, x, ctx.adaptive.rho, mom);
  std::vector<std::string> header{"t", "k"};
  for (int c = 0; c < ctx.red.r(); ++c) header.push_back("x" + std::to_string(c));
  header.push_back("G");
  std::vector<std::vector<double>> rows;
  for (int j = 0; j < N; ++j) {
    std::vector<double> row{grid.right(j), grid.step(j)};
    for (int c = 0; c < ctx.red.r(); ++c) row.push_back(x.values[j](c));
    row.push_back(goal.G[j]);
    rows.push_back(std::move(row));
  }
  ctx.out->WriteCsv("trajectory.csv", header, rows);
  json s = Summary(ctx);
  s["N"] = N;
  s["qoi"] = goal.qoi;
  s["augmented"] = goal.augmented;
  ctx.out->WriteJson("summary.json", s);
  *ctx.log << "N=" << N << " qoi=" << FormatDouble(goal.qoi) << "\n";
}

void Adapt(Context& ctx) {
  AdaptiveConfig a = ctx.adaptive;
  a.observer = [&](const IterationData& d) {
    WriteIndicatorCsv(*ctx.out, d);
    *ctx.log << "iter " << d.iteration << " N=" << d.primal->grid.size()
             << " qoi=" << FormatDouble(d.goal->qoi)
             << " eta_tot=" << FormatDouble(d.indicators->eta_tot) << "\n";
  };
  const AdaptiveRun run = AdaptiveLoop(ctx.red, a);
  ctx.out->WriteJson("run.json", RunJson(ctx, run, nullptr));
  std::vector<std::vector<double>> rows;
  for (double t : run.final_grid.nodes()) rows.push_back({t});
  ctx.out->WriteCsv("final_grid.csv", {"t"}, rows);
}

void Converge(Context& ctx) {
  std::vector<int> list = ctx.config->N_list;
  if (list.empty()) {
    list = ctx.config->model == "academic"
               ? std::vector<int>{100, 200, 400, 800, 1600, 3200}
               : std::vector<int>{50, 100, 200, 400, 800, 1600};
  }
  const bench::ConvergenceResult res =
      bench::ConvergenceStudy(ctx.red, list, ctx.adaptive);
  auto table = [](const std::vector<bench::UniformRow>& rows) {
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) out.push_back({double(r.N), r.qoi, r.augmented});
    return out;
  };
  ctx.out->WriteCsv("convergence_uniform.csv", {"N", "qoi", "augmented"},
                    table(res.uniform));
  ctx.out->WriteCsv("convergence_dwr.csv", {"N", "qoi", "augmented"},
                    table(res.dwr));
  json s = Summary(ctx);
  s["uniform_slope"] = res.uniform_slope;
  s["dwr_slope"] = res.dwr_slope;
  ctx.out->WriteJson("summary.json", s);
  *ctx.log << "uniform slope " << res.uniform_slope << ", dwr slope "
           << res.dwr_slope << "\n";
}

void Cost(Context& ctx) {
  std::vector<double> targets = ctx.config->targets;
  if (targets.empty()) targets = {1e2, 1e1, 1e0, 1e-1, 1e-2};
  AdaptiveConfig a = ctx.adaptive;
  if (!ctx.config->max_N) a.max_N = 100000;
  const auto rows = bench::CostToTarget(ctx.red, targets, a);
  std::vector<std::vector<double>> table;
  for (const auto& r : rows) {
    table.push_back({r.target, double(r.N_uniform), double(r.N_dwr), r.savings});
    *ctx.log << "target " << r.target << ": uniform " << r.N_uniform << ", dwr "
             << r.N_dwr << ", savings " << r.savings << "\n";
  }
  ctx.out->WriteCsv("cost.csv", {"target", "N_uniform", "N_dwr", "savings"}, table);
  ctx.out->WriteJson("summary.json", Summary(ctx));
}

void EffectivityCommand(Context& ctx) {
  AdaptiveConfig a = ctx.adaptive;
  if (!ctx.config->max_N) a.max_N = 300;
  if (!ctx.config->max_iter) a.max_iter = 10000;
  a.tol = std::numeric_limits<double>::min();
  const int n_ref = ctx.config->N_ref.value_or(50000);
  const double j_ref = bench::UniformRun(ctx.red, n_ref, a.rho).augmented;
  const AdaptiveRun run = AdaptiveLoop(ctx.red, a);
  const auto rows = Effectivity(run, j_ref);
  std::vector<std::vector<double>> table;
  for (const auto& r : rows) {
    table.push_back({double(r.iteration), double(r.N), r.error, r.eta_sum, r.ieff});
  }
  ctx.out->WriteCsv("effectivity.csv", {"l", "N", "error", "eta_sum", "I_eff"},
                    table);
  ctx.out->WriteJson("run.json", RunJson(ctx, run, &rows));
  json s = Summary(ctx);
  s["J_ref"] = j_ref;
  s["N_ref"] = n_ref;
  ctx.out->WriteJson("summary.json", s);
}

void JacobiStudyCommand(Context& ctx) {
  AdaptiveConfig a = ctx.adaptive;
  if (!ctx.config->indicator) a.variant = IndicatorVariant::kFull;
  if (!ctx.config->max_iter) a.max_iter = 16;
  if (!ctx.config->max_N) a.max_N = 300;
  const auto rows = bench::JacobiStudy(ctx.red, a);
  std::vector<std::vector<double>> table;
  for (const auto& r : rows) {
    table.push_back({double(r.iteration), double(r.N), double(r.exact_marked),
                     double(r.k_star), r.speedup, r.rho_worst});
  }
  ctx.out->WriteCsv("jacobi.csv",
                    {"l", "N", "M_ex", "k_star", "speedup", "rho_worst"}, table);
  ctx.out->WriteJson("summary.json", Summary(ctx));
}

void Contraction(Context& ctx) {
  TimeGrid grid = TimeGrid::Uniform(ctx.red.T, ctx.adaptive.initial_N);
  if (ctx.config->adapt_iter > 0) {
    AdaptiveConfig a = ctx.adaptive;
    a.max_iter = ctx.config->adapt_iter + 1;
    a.tol = std::numeric_limits<double>::min();
    const AdaptiveRun run = AdaptiveLoop(ctx.red, a);
    grid = run.final_grid;
  }
  const ContractionReport rep = ComputeContractionReport(ctx.red, grid);
  std::vector<std::vector<double>> table;
  for (int j = 0; j < grid.size(); ++j) {
    table.push_back({grid.midpoint(j), grid.step(j), rep.rho[j], rep.bound[j]});
  }
  ctx.out->WriteCsv("contraction.csv", {"t_mid", "k", "rho", "bound"}, table);
  json s = Summary(ctx);
  s["N"] = grid.size();
  s["worst_rho"] = rep.worst;
  s["coercive"] = rep.coercive;
  ctx.out->WriteJson("summary.json", s);
  *ctx.log << "N=" << grid.size() << " worst rho " << rep.worst << "\n";
}

void Waveform(Context& ctx) {
  std::vector<int> nodes = ctx.config->nodes;
  if (nodes.empty()) {
    for (int j = 2; j <= 26 && j < ctx.red.n(); j += 2) nodes.push_back(j);
  }
  const int N = ctx.config->N.value_or(2000);
  const auto tab = bench::NodeVoltages(ctx.red, N, nodes);
  std::vector<std::string> header{"t"};
  for (int node : nodes) header.push_back("e" + std::to_string(node));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tab.t.size(); ++i) {
    std::vector<double> row{tab.t[i]};
    row.insert(row.end(), tab.values[i].begin(), tab.values[i].end());
    rows.push_back(std::move(row));
  }
  ctx.out->WriteCsv("waveform.csv", header, rows);
  ctx.out->WriteJson("summary.json", Summary(ctx));
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kModelError:
    case ErrorCode::kTopologyError:
    case ErrorCode::kIndexTooHigh:
    case ErrorCode::kNotSymmetric:
    case ErrorCode::kNotSPD:
    case ErrorCode::kInvalidArgument:
      return kExitValidation;
    default:
      return kExitStudy;
  }
}

}  // namespace

const std::vector<std::string>& Commands() {
  static const std::vector<std::string> kCommands{
      "solve", "adapt", "converge", "cost", "effectivity", "jacobi-study",
      "contraction", "waveform"};
  return kCommands;
}

int Run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    const auto& cmds = Commands();
    if (std::find(cmds.begin(), cmds.end(), config.command) == cmds.end()) {
      throw Error(ErrorCode::kConfigError, "unknown command " + config.command);
    }
    if (config.threads < 0) throw Error(ErrorCode::kConfigError, "threads must be >= 0");
    if (config.threads > 0) SetMaxThreads(config.threads);
    Context ctx;
    ctx.config = &config;
    ctx.log = &log;
    ctx.adaptive = MakeAdaptiveConfig(config);
    ctx.sys = IsBuiltin(config.model) ? bench::BuildBuiltin(config.model)
                                      : LoadModelFile(config.model);
    const ValidationReport rep = ValidateStructure(ctx.sys, config.seed);
    if (!rep.ok()) throw Error(ErrorCode::kModelError, rep.FailureSummary());
    ctx.red = Reduce(ctx.sys);
    ArtifactWriter out(config.out_dir);
    ctx.out = &out;
    const std::string& c = config.command;
    if (c == "solve") Solve(ctx);
    else if (c == "adapt") Adapt(ctx);
    else if (c == "converge") Converge(ctx);
    else if (c == "cost") Cost(ctx);
    else if (c == "effectivity") EffectivityCommand(ctx);
    else if (c == "jacobi-study") JacobiStudyCommand(ctx);
    else if (c == "contraction") Contraction(ctx);
    else Waveform(ctx);
    out.WriteManifest(config.command, config.model);
    return kExitOk;
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return kExitStudy;
  }
}

}  // namespace phdae::cli
