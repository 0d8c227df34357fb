#include "phdae/input_signal.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phdae/error.h"

namespace phdae {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// int_a^b exp(-(t-c)^2/(2 s^2)) dt, evaluated with erfc on the tail side so
// that far-off intervals keep full relative accuracy.
double GaussianIntegral(double a, double b, double c, double s) {
  const double x = (a - c) / (std::numbers::sqrt2 * s);
  const double y = (b - c) / (std::numbers::sqrt2 * s);
  double d;
  if (x > 0.0) {
    d = std::erfc(x) - std::erfc(y);
  } else if (y < 0.0) {
    d = std::erfc(-y) - std::erfc(-x);
  } else {
    d = std::erf(y) - std::erf(x);
  }
  return s * std::sqrt(std::numbers::pi / 2.0) * d;
}

void ValidateWaveform(const Waveform& w) {
  std::visit(Overloaded{
                 [](const SineBurst& s) {
                   if (!std::isfinite(s.amplitude) ||
                       !std::isfinite(s.frequency) || !(s.frequency > 0.0)) {
                     throw Error(ErrorCode::kModelError,
                                 "sine burst needs finite amplitude and "
                                 "positive frequency");
                   }
                 },
                 [](const GaussianPulse& g) {
                   if (!std::isfinite(g.amplitude) ||
                       !std::isfinite(g.center) || !(g.width > 0.0)) {
                     throw Error(ErrorCode::kModelError,
                                 "gaussian needs positive width");
                   }
                 },
                 [](const PiecewiseLinearTable& t) {
                   if (t.times.empty() || t.times.size() != t.values.size()) {
                     throw Error(ErrorCode::kModelError,
                                 "table needs matching non-empty times/values");
                   }
                   for (std::size_t i = 1; i < t.times.size(); ++i) {
                     if (!(t.times[i] > t.times[i - 1])) {
                       throw Error(ErrorCode::kModelError,
                                   "table times must be strictly increasing");
                     }
                   }
                 },
                 [](const ZeroInput&) {},
             },
             w);
}

}  // namespace

double EvaluateWaveform(const Waveform& w, double t) {
  return std::visit(
      Overloaded{
          [t](const SineBurst& s) {
            return t < s.cutoff
                       ? s.amplitude *
                             std::sin(2.0 * std::numbers::pi * s.frequency * t)
                       : 0.0;
          },
          [t](const GaussianPulse& g) {
            const double d = (t - g.center) / g.width;
            return g.amplitude * std::exp(-0.5 * d * d);
          },
          [t](const PiecewiseLinearTable& tab) {
            const auto& ts = tab.times;
            if (t <= ts.front()) return tab.values.front();
            if (t >= ts.back()) return tab.values.back();
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const std::size_t j = static_cast<std::size_t>(it - ts.begin());
            const double s = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
            return (1.0 - s) * tab.values[j - 1] + s * tab.values[j];
          },
          [](const ZeroInput&) { return 0.0; },
      },
      w);
}

void ExactWaveformMoments(const Waveform& w, double a, double b, double* first,
                          double* second) {
  *first = 0.0;
  *second = 0.0;
  if (!(b > a)) return;
  std::visit(
      Overloaded{
          [&](const SineBurst& s) {
            const double hi = std::min(b, s.cutoff);
            if (!(hi > a)) return;
            const double om = 2.0 * std::numbers::pi * s.frequency;
            const double h = hi - a;
            const double sum = hi + a;
            // Product forms avoid cancellation for short intervals.
            *first = s.amplitude * 2.0 * std::sin(0.5 * om * sum) *
                     std::sin(0.5 * om * h) / om;
            *second = s.amplitude * s.amplitude *
                      (0.5 * h - std::cos(om * sum) * std::sin(om * h) /
                                     (2.0 * om));
          },
          [&](const GaussianPulse& g) {
            *first = g.amplitude * GaussianIntegral(a, b, g.center, g.width);
            *second = g.amplitude * g.amplitude *
                      GaussianIntegral(a, b, g.center,
                                       g.width / std::numbers::sqrt2);
          },
          [&](const PiecewiseLinearTable& tab) {
            std::vector<double> pts{a};
            for (double t : tab.times) {
              if (t > a && t < b) pts.push_back(t);
            }
            pts.push_back(b);
            for (std::size_t j = 1; j < pts.size(); ++j) {
              const double h = pts[j] - pts[j - 1];
              const double ua = EvaluateWaveform(w, pts[j - 1]);
              const double ub = EvaluateWaveform(w, pts[j]);
              *first += 0.5 * h * (ua + ub);
              *second += h * (ua * ua + ua * ub + ub * ub) / 3.0;
            }
          },
          [](const ZeroInput&) {},
      },
      w);
}

InputSignal::InputSignal(std::vector<Waveform> channels, bool exact)
    : channels_(std::move(channels)), exact_(exact) {
  for (const auto& w : channels_) ValidateWaveform(w);
}

Vector InputSignal::Evaluate(double t) const {
  Vector u(channels());
  for (int c = 0; c < channels(); ++c) u(c) = EvaluateWaveform(channels_[c], t);
  return u;
}

std::vector<double> InputSignal::Kinks(double a, double b) const {
  std::vector<double> k;
  for (const auto& w : channels_) {
    if (const auto* s = std::get_if<SineBurst>(&w)) {
      if (s->cutoff > a && s->cutoff < b) k.push_back(s->cutoff);
    } else if (const auto* tab = std::get_if<PiecewiseLinearTable>(&w)) {
      for (double t : tab->times) {
        if (t > a && t < b) k.push_back(t);
      }
    }
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

InputMoments InputSignal::Moments(double a, double b) const {
  const int m = channels();
  InputMoments mom{Vector::Zero(m), Matrix::Zero(m, m)};
  if (m == 0) return mom;
  const std::vector<double> kinks = Kinks(a, b);
  if (!exact_) {
    mom.first = Gauss2Integrate([&](double t) -> Vector { return Evaluate(t); },
                                a, b, kinks);
    mom.second = Gauss2Integrate(
        [&](double t) -> Matrix {
          const Vector u = Evaluate(t);
          return u * u.transpose();
        },
        a, b, kinks);
    return mom;
  }
  for (int c = 0; c < m; ++c) {
    ExactWaveformMoments(channels_[c], a, b, &mom.first(c), &mom.second(c, c));
  }
  for (int c = 0; c < m; ++c) {
    if (std::holds_alternative<ZeroInput>(channels_[c])) continue;
    for (int d = c + 1; d < m; ++d) {
      if (std::holds_alternative<ZeroInput>(channels_[d])) continue;
      const double v = Gauss2Integrate(
          [&](double t) {
            return EvaluateWaveform(channels_[c], t) *
                   EvaluateWaveform(channels_[d], t);
          },
          a, b, kinks);
      mom.second(c, d) = v;
      mom.second(d, c) = v;
    }
  }
  return mom;
}

}  // namespace phdae
