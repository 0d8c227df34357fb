#pragma once

#include <Eigen/Dense>

namespace phdae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative pivot threshold below which a matrix is declared singular.
inline constexpr double kSingularPivotTol = 1e-12;
/// Relative tolerance for symmetry checks.
inline constexpr double kSymmetryTol = 1e-10;

/// Largest absolute entry, 0 for empty matrices.
double MaxAbs(const Matrix& m);

/// True if every entry is finite.
bool AllFinite(const Matrix& m);

/// max|M - M^T| <= rel_tol * max(max|M|, tiny).
bool IsSymmetric(const Matrix& m, double rel_tol = kSymmetryTol);

/// LU factorization with partial pivoting. Throws SingularMatrix when a
/// pivot falls below kSingularPivotTol * max|entry|.
class LuFactor {
 public:
  explicit LuFactor(const Matrix& m);

  Vector Solve(const Vector& rhs) const;
  Matrix Solve(const Matrix& rhs) const;
  int rows() const { return rows_; }
  /// Smallest |u_ii| divided by max|entry| of the factored matrix.
  double relative_min_pivot() const { return relative_min_pivot_; }

 private:
  int rows_{0};
  double relative_min_pivot_{0.0};
  Eigen::PartialPivLU<Matrix> lu_;
};

/// Smallest |u_ii| / max|entry| of a partial-pivot LU, 0 for a zero matrix.
/// Never throws on singular input.
double RelativeMinPivot(const Matrix& m);

/// Solves M x = rhs.
Vector FactorSolve(const Matrix& m, const Vector& rhs);

/// Smallest eigenvalue of a symmetric matrix. Throws NotSymmetric.
double LambdaMinSym(const Matrix& m);

/// Smallest mu with A v = mu B v, A symmetric, B symmetric positive definite.
/// Throws NotSymmetric or NotSPD.
double LambdaMinPair(const Matrix& a, const Matrix& b);

/// max |lambda| over the complex spectrum.
double SpectralRadius(const Matrix& m);

/// Splitting pair with orthonormal columns: W spans ker E, V its orthogonal
/// complement. Singular values below 1e-10 * sigma_max count as zero.
struct KernelSplit {
  Matrix V;
  Matrix W;
};
KernelSplit KernelBasis(const Matrix& e);

}  // namespace phdae
