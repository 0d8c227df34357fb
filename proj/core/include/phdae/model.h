#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phdae/input_signal.h"
#include "phdae/numerics.h"

namespace phdae {

/// Linear port-Hamiltonian DAE  E x' = (J - R) Q x + B u,  x(0) = x0,
/// on [0, T] with Hamiltonian H = x^T Q^T E x / 2 and output y = B^T Q x.
struct PhDaeSystem {
  Matrix E, J, R, Q, B;
  InputSignal input;
  Vector x0;
  double T{1.0};

  int n() const { return static_cast<int>(E.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
};

struct ValidationCheck {
  std::string name;
  bool passed{false};
  /// Informational checks do not make the report fail.
  bool required{true};
  double value{0.0};
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* Find(const std::string& name) const;
  /// One line per failed required check.
  std::string FailureSummary() const;
};

/// Checks the structural assumptions: rank deficiency of E (informational),
/// Q nonsingular, E^T Q symmetric and positive on range(V), J skew, R
/// symmetric PSD, pencil regularity, index one and consistency of x0.
/// Throws ModelError only for mismatched dimensions.
ValidationReport ValidateStructure(const PhDaeSystem& sys,
                                   std::uint64_t seed = 20240531);

/// Optional user supplied (V, W) with E W = 0 and (V, W) nonsingular.
struct SplittingPair {
  Matrix V;
  Matrix W;
};

/// Schur-reduced ODE in the differential coordinate x1:
///   E11 x1' = -S x1 + Fm u,   x2 = -A22^{-1} (A21 x1 + B2 u).
struct ReducedSystem {
  Matrix V, W;
  Matrix E11;
  Matrix A11, A12, A21, A22;
  Matrix B1, B2;
  Matrix S;
  /// B1 - A12 A22^{-1} B2.
  Matrix forcing_matrix;
  /// A22^{-1} A21 and A22^{-1} B2.
  Matrix a22_inv_a21, a22_inv_b2;
  /// lambda_min of the symmetric part of S, and of the pencil (S~, E11).
  double alpha{0.0};
  double mu_min{0.0};
  Vector x10;
  double T{1.0};
  InputSignal input;

  /// Full state x = P x1 + q u, and the power imbalance
  ///   g = -(Yx x1 + Yu u)^T u + x1^T Dxx x1 + 2 x1^T Dxu u + u^T Duu u.
  Matrix P, q;
  Matrix Yx, Yu;
  Matrix Dxx, Dxu, Duu;

  int r() const { return static_cast<int>(E11.rows()); }
  int n() const { return static_cast<int>(V.rows()); }
  int m() const { return static_cast<int>(B1.cols()); }

  Matrix SymmetricPart() const { return 0.5 * (S + S.transpose()); }

  Vector AlgebraicReconstruction(const Vector& x1, double t) const;
  Vector AlgebraicReconstructionFromInput(const Vector& x1,
                                          const Vector& u) const;
  Vector Forcing(double t) const;
  Vector FullState(const Vector& x1, double t) const;

  double Hamiltonian(const Vector& x1) const;
  Vector HamiltonianGradient(const Vector& x1) const { return E11 * x1; }

  struct PowerImbalance {
    double g;
    Vector grad;
  };
  PowerImbalance EvaluatePowerImbalance(double t, const Vector& x1) const;
  PowerImbalance EvaluatePowerImbalanceFromInput(const Vector& u,
                                                 const Vector& x1) const;
};

/// Kernel splitting and Schur reduction. Uses the SVD basis unless a pair is
/// given. Throws IndexTooHigh if A22 is singular, ModelError on dimension
/// mismatch or if E11 is not positive definite.
ReducedSystem Reduce(const PhDaeSystem& sys,
                     const std::optional<SplittingPair>& pair = std::nullopt);

/// Keeps the differential coordinates of x0 and replaces its algebraic part
/// by the algebraic reconstruction at t = 0.
Vector ConsistentInitialValue(const PhDaeSystem& sys);

}  // namespace phdae
