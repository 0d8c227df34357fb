#include <cmath>
#include <string>

#include "phdae/bench.h"
#include "phdae/error.h"

namespace phdae::bench {

PhDaeSystem BuildAcademic() {
  PhDaeSystem sys;
  sys.E = Vector::Ones(3).asDiagonal();
  sys.E(2, 2) = 0.0;
  sys.J.resize(3, 3);
  sys.J << 0, 1, -1,
          -1, 0, 0,
           1, 0, 0;
  sys.R = Vector{{0.5, 0.5, 0.1}}.asDiagonal();
  sys.Q = Matrix::Identity(3, 3);
  sys.B = Matrix::Zero(3, 1);
  sys.B(0, 0) = 1.0;
  sys.input = InputSignal::Scalar(SineBurst{1.0, 1.0, 0.5});
  sys.T = 1.0;
  sys.x0 = Vector{{1.0, 0.0, 0.0}};
  sys.x0 = ConsistentInitialValue(sys);
  return sys;
}

InputSignal GaussianPulseInput() {
  return InputSignal::Scalar(GaussianPulse{50.0, 0.5, 0.05});
}

TransmissionLineSpec TransmissionLineSpec::Uniform(int ns, double resistance,
                                                   double epsilon, double T,
                                                   InputSignal input) {
  TransmissionLineSpec s;
  s.ns = ns;
  s.C.assign(ns > 0 ? ns - 1 : 0, 1.0);
  s.L.assign(ns, 1.0);
  s.R.assign(ns, resistance);
  s.R0 = resistance;
  s.R_load = resistance;
  s.epsilon = epsilon;
  s.T = T;
  s.input = std::move(input);
  return s;
}

TransmissionLineSpec TransmissionLineSpec::Waveform() {
  return Uniform(50, 2.0, 0.0, 10.0, GaussianPulseInput());
}

TransmissionLineSpec TransmissionLineSpec::Convergence() {
  return Uniform(100, 0.35, 1.0, 10.0, GaussianPulseInput());
}

PhDaeSystem BuildTransmissionLine(const TransmissionLineSpec& spec) {
  const int ns = spec.ns;
  if (ns < 1) throw Error(ErrorCode::kTopologyError, "need at least one block");
  if (static_cast<int>(spec.C.size()) != ns - 1 ||
      static_cast<int>(spec.L.size()) != ns ||
      static_cast<int>(spec.R.size()) != ns) {
    throw Error(ErrorCode::kTopologyError, "element vectors have wrong length");
  }
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  for (const auto* vec : {&spec.C, &spec.L, &spec.R}) {
    for (double v : *vec) {
      if (!positive(v)) {
        throw Error(ErrorCode::kTopologyError, "element values must be positive");
      }
    }
  }
  if (!positive(spec.R0) || !positive(spec.R_load) || !(spec.epsilon >= 0.0) ||
      !positive(spec.T)) {
    throw Error(ErrorCode::kTopologyError, "invalid resistor, leakage or horizon");
  }
  if (spec.input.channels() != 1) {
    throw Error(ErrorCode::kTopologyError, "line is driven by a single source");
  }

  const int nn = 2 * ns + 1;  // node voltages e_0..e_{2ns}
  Matrix ac = Matrix::Zero(nn, ns - 1);
  for (int k = 1; k < ns; ++k) ac(2 * k, k - 1) = 1.0;
  Matrix al = Matrix::Zero(nn, ns);
  for (int k = 1; k <= ns; ++k) {
    al(2 * k - 1, k - 1) = 1.0;
    al(2 * k, k - 1) = -1.0;
  }
  Matrix ar = Matrix::Zero(nn, ns + 2);
  ar(0, 0) = 1.0;
  for (int k = 1; k <= ns; ++k) {
    ar(2 * k - 2, k) = 1.0;
    ar(2 * k - 1, k) = -1.0;
  }
  ar(2 * ns, ns + 1) = 1.0;
  Matrix av = Matrix::Zero(nn, 1);
  av(0, 0) = -1.0;

  Vector g(ns + 2);
  g(0) = 1.0 / spec.R0;
  for (int k = 1; k <= ns; ++k) g(k) = 1.0 / spec.R[k - 1];
  g(ns + 1) = 1.0 / spec.R_load;
  Vector c(ns - 1);
  for (int k = 0; k < ns - 1; ++k) c(k) = spec.C[k];
  Vector l(ns);
  for (int k = 0; k < ns; ++k) l(k) = spec.L[k];

  const int n = 3 * ns + 2;
  PhDaeSystem sys;
  sys.E = Matrix::Zero(n, n);
  sys.E.topLeftCorner(nn, nn) = ac * c.asDiagonal() * ac.transpose();
  sys.E.block(nn, nn, ns, ns) = l.asDiagonal();
  sys.J = Matrix::Zero(n, n);
  sys.J.block(0, nn, nn, ns) = -al;
  sys.J.block(0, n - 1, nn, 1) = -av;
  sys.J.block(nn, 0, ns, nn) = al.transpose();
  sys.J.block(n - 1, 0, 1, nn) = av.transpose();
  sys.R = Matrix::Zero(n, n);
  sys.R.topLeftCorner(nn, nn) = ar * g.asDiagonal() * ar.transpose();
  for (int j = 0; j < nn; j += 2) sys.R(j, j) += spec.epsilon;
  sys.Q = Matrix::Identity(n, n);
  sys.B = Matrix::Zero(n, 1);
  sys.B(n - 1, 0) = 1.0;
  sys.input = spec.input;
  sys.T = spec.T;
  sys.x0 = Vector::Zero(n);
  sys.x0(0) = 1.0;
  sys.x0 = ConsistentInitialValue(sys);
  return sys;
}

PhDaeSystem BuildBuiltin(const std::string& name) {
  if (name == "academic") return BuildAcademic();
  if (name == "tline") return BuildTransmissionLine(TransmissionLineSpec::Waveform());
  if (name == "tline-reg") {
    return BuildTransmissionLine(TransmissionLineSpec::Convergence());
  }
  throw Error(ErrorCode::kConfigError, "unknown builtin model " + name);
}

AdaptiveConfig DefaultAdaptiveConfig(const std::string& builtin) {
  AdaptiveConfig cfg;
  cfg.theta = 0.5;
  if (builtin == "academic") {
    cfg.variant = IndicatorVariant::kFull;
    cfg.initial_N = 20;
    cfg.tol = 1e-10;
  } else {
    cfg.variant = IndicatorVariant::kSimplified;
    cfg.initial_N = 50;
    cfg.tol = 1e-3;
  }
  return cfg;
}

}  // namespace phdae::bench
