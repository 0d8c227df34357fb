#pragma once

#include <string>
#include <vector>

#include "phdae/estimator.h"
#include "phdae/model.h"

namespace phdae::bench {

/// Three-state academic DAE on [0, 1] driven by a sine burst with cutoff 0.5.
/// x0 = (1, 0, 0) is projected onto the consistency manifold, giving
/// x0 = (1, 0, 10).
PhDaeSystem BuildAcademic();

/// RCL ladder of n_s blocks: source node 0, resistor/inductor junctions at odd
/// nodes, capacitors at even nodes 2..2n_s-2 and a load resistor at node 2n_s.
struct TransmissionLineSpec {
  int ns{100};
  /// Capacitances C_1..C_{ns-1}, inductances and series resistances for
  /// k = 1..ns.
  std::vector<double> C, L, R;
  double R0{1.0};
  double R_load{1.0};
  /// Leakage conductance added on the even nodes 0, 2, ..., 2 n_s.
  double epsilon{0.0};
  double T{10.0};
  InputSignal input;

  /// All C = L = 1, all resistors (including R0 and the load) equal.
  static TransmissionLineSpec Uniform(int ns, double resistance,
                                      double epsilon, double T,
                                      InputSignal input);
  /// n_s = 50, R = 2, T = 10, no leakage.
  static TransmissionLineSpec Waveform();
  /// n_s = 100, R = 0.35, leakage 1, T = 10.
  static TransmissionLineSpec Convergence();
};

/// 50 exp(-(t - 0.5)^2 / (2 0.05^2)).
InputSignal GaussianPulseInput();

/// MNA assembly with Q = I. x0 = e_0 projected onto the consistency
/// manifold. Throws TopologyError on non-positive elements.
PhDaeSystem BuildTransmissionLine(const TransmissionLineSpec& spec);

/// Builtin models: "academic", "tline" (TransmissionLineSpec::Waveform), "tline-reg"
/// (TransmissionLineSpec::Convergence).
PhDaeSystem BuildBuiltin(const std::string& name);

/// Per-model defaults used by the CLI and the studies.
AdaptiveConfig DefaultAdaptiveConfig(const std::string& builtin);

struct UniformRow {
  int N{0};
  double qoi{0.0};
  double augmented{0.0};
};

/// Least-squares slope of log y against log x.
double FitLogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

/// qoi / augmented value of the uniform solve with N intervals.
UniformRow UniformRun(const ReducedSystem& red, int N, double rho = 0.0);

struct ConvergenceResult {
  std::vector<UniformRow> uniform;
  std::vector<UniformRow> dwr;
  /// Fitted over the last four points of each series.
  double uniform_slope{0.0};
  double dwr_slope{0.0};
};

/// Uniform runs for N_list in parallel, and one adaptive trajectory whose
/// final N does not exceed the largest uniform N.
ConvergenceResult ConvergenceStudy(const ReducedSystem& red,
                                   const std::vector<int>& N_list,
                                   AdaptiveConfig config);

struct CostRow {
  double target{0.0};
  int N_uniform{0};
  int N_dwr{0};
  double savings{0.0};
};

/// Uniform: doubling sweep from config.initial_N, then bisection on N to 2%.
/// DWR: first adaptive iterate with qoi <= target. Throws TargetUnreachable.
std::vector<CostRow> CostToTarget(const ReducedSystem& red,
                                  const std::vector<double>& targets,
                                  AdaptiveConfig config);

/// Energy-norm error sqrt(int H(x_ref - x_k) dt) on the union grid.
double StateEnergyError(const ReducedSystem& red, const PiecewiseConstant& xk,
                        const PiecewiseConstant& reference);

struct EffectivityStudyResult {
  double j_ref{0.0};
  int N_ref{0};
  std::vector<EffectivityRow> rows;
};

/// Adaptive run stopped once N would exceed max_N, evaluated against a
/// uniform reference with N_ref intervals.
EffectivityStudyResult EffectivityStudy(const ReducedSystem& red,
                                        AdaptiveConfig config, int N_ref);

struct JacobiStudyRow {
  int iteration{0};
  int N{0};
  int exact_marked{0};
  int k_star{0};
  double speedup{0.0};
  double rho_worst{0.0};
};

/// Marked-set stabilization on every adaptive iterate of the run.
std::vector<JacobiStudyRow> JacobiStudy(const ReducedSystem& red,
                                        AdaptiveConfig config);

struct TradeoffPoint {
  int iteration{0};
  int N{0};
  double qoi{0.0};
  double state_error{0.0};
};

/// Adaptive run with weight rho, reporting qoi and energy-norm state error
/// against a fine uniform reference at every iterate.
std::vector<TradeoffPoint> AugmentedTradeoffRun(
    const ReducedSystem& red, AdaptiveConfig config,
    const PiecewiseConstant& reference);

/// Linear interpolation of log y against log N at N_query.
double InterpolateLogLog(const std::vector<TradeoffPoint>& run, double N_query,
                         bool state_error);

struct WaveformTable {
  std::vector<double> t;
  std::vector<int> nodes;
  /// values[i][c] = e_{nodes[c]}(t_i).
  std::vector<std::vector<double>> values;
};

/// Node voltages of the full state along a uniform solve, at t_0..t_N.
WaveformTable NodeVoltages(const ReducedSystem& red, int N,
                           const std::vector<int>& nodes);

}  // namespace phdae::bench
