#pragma once

#include <type_traits>
#include <variant>
#include <vector>

#include "phdae/numerics.h"

namespace phdae {

/// u(t) = amplitude * sin(2 pi frequency t) for t < cutoff, 0 afterwards.
struct SineBurst {
  double amplitude{1.0};
  double frequency{1.0};
  double cutoff{0.5};
};

/// u(t) = amplitude * exp(-(t - center)^2 / (2 width^2)).
struct GaussianPulse {
  double amplitude{1.0};
  double center{0.0};
  double width{1.0};
};

/// Linear interpolation between (times, values), held constant outside.
struct PiecewiseLinearTable {
  std::vector<double> times;
  std::vector<double> values;
};

struct ZeroInput {};

using Waveform =
    std::variant<SineBurst, GaussianPulse, PiecewiseLinearTable, ZeroInput>;

/// Per-interval moments of the input: int u dt and int u u^T dt.
struct InputMoments {
  Vector first;
  Matrix second;
};

/// Vector-valued input u(t), one waveform per channel.
///
/// Every waveform kind has a closed-form antiderivative for u and u^2. When
/// `exact` is set, interval moments use it; otherwise (and for products of two
/// different non-zero channels) they use 2-point Gauss-Legendre on each piece
/// between kinks.
class InputSignal {
 public:
  InputSignal() = default;
  explicit InputSignal(std::vector<Waveform> channels, bool exact = true);

  static InputSignal Scalar(Waveform w) { return InputSignal({std::move(w)}); }

  int channels() const { return static_cast<int>(channels_.size()); }
  const Waveform& channel(int c) const { return channels_.at(c); }
  const std::vector<Waveform>& waveforms() const { return channels_; }
  bool exact() const { return exact_; }
  void set_exact(bool exact) { exact_ = exact; }

  Vector Evaluate(double t) const;

  /// Sorted kink locations strictly inside (a, b) over all channels.
  std::vector<double> Kinks(double a, double b) const;

  InputMoments Moments(double a, double b) const;

 private:
  std::vector<Waveform> channels_;
  bool exact_{true};
};

double EvaluateWaveform(const Waveform& w, double t);

/// Closed-form int_a^b u dt and int_a^b u^2 dt.
void ExactWaveformMoments(const Waveform& w, double a, double b, double* first,
                          double* second);

/// 2-point Gauss-Legendre on each sub-interval of [a, b] split at `kinks`.
/// Exact for piecewise cubics with breakpoints among the kinks.
template <typename F>
auto Gauss2Integrate(F&& f, double a, double b,
                     const std::vector<double>& kinks) {
  using Result = std::decay_t<decltype(f(a))>;
  constexpr double kNode = 0.57735026918962576451;  // 1/sqrt(3)
  auto piece = [&](double x0, double x1) -> Result {
    const double mid = 0.5 * (x0 + x1);
    const double half = 0.5 * (x1 - x0);
    Result lo_val = f(mid - half * kNode);
    Result hi_val = f(mid + half * kNode);
    return Result(half * (lo_val + hi_val));
  };
  double lo = a;
  Result total = piece(a, a);  // zero of the right shape
  for (double c : kinks) {
    if (c <= lo || c >= b) continue;
    total = Result(total + piece(lo, c));
    lo = c;
  }
  return Result(total + piece(lo, b));
}

}  // namespace phdae
