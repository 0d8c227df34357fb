#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phdae/model.h"

namespace phdae::testing {

/// Random dissipative system with E = diag(I_r, 0), Q = I, R = L L^T + delta I
/// and a consistent x0. Index one because (J - R)_22 has a negative definite
/// symmetric part.
inline PhDaeSystem RandomDissipativeSystem(std::mt19937& gen, int r, int n_alg,
                                           int m = 1) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const int n = r + n_alg;
  auto rnd = [&](int rows, int cols) {
    Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) a(i, j) = nd(gen);
    return a;
  };
  PhDaeSystem sys;
  sys.E = Matrix::Zero(n, n);
  for (int i = 0; i < r; ++i) sys.E(i, i) = 1.0 + 0.5 * std::abs(nd(gen));
  const Matrix a = rnd(n, n);
  sys.J = a - a.transpose();
  const Matrix l = 0.5 * rnd(n, n);
  sys.R = l * l.transpose() + 0.2 * Matrix::Identity(n, n);
  sys.Q = Matrix::Identity(n, n);
  sys.B = rnd(n, m);
  std::vector<Waveform> ch;
  for (int c = 0; c < m; ++c) {
    ch.push_back(SineBurst{1.0 + c, 1.0 + 0.5 * c, 0.7});
  }
  sys.input = InputSignal(ch);
  sys.T = 1.0;
  sys.x0 = rnd(n, 1).col(0);
  sys.x0 = ConsistentInitialValue(sys);
  return sys;
}

/// Gaussian elimination with partial pivoting on a copy. Independent of the
/// library's LU.
inline Vector GaussSolve(Matrix a, Vector b) {
  const int n = static_cast<int>(a.rows());
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int i = c + 1; i < n; ++i)
      if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
    if (a(p, c) == 0.0) throw std::runtime_error("singular");
    if (p != c) {
      for (int j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      std::swap(b(p), b(c));
    }
    for (int i = c + 1; i < n; ++i) {
      const double f = a(i, c) / a(c, c);
      if (f == 0.0) continue;
      for (int j = c; j < n; ++j) a(i, j) -= f * a(c, j);
      b(i) -= f * b(c);
    }
  }
  Vector x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b(i);
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x(j);
    x(i) = s / a(i, i);
  }
  return x;
}

inline double RelDiff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace phdae::testing
