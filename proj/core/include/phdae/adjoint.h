#pragma once

#include <vector>

#include "phdae/discretization.h"

namespace phdae {

enum class AdjointMethod { kDirect, kJacobi };

/// Discrete adjoint z^1..z^N (stored 0-based) of the block system
///   (E11 + k_j S^T) z^{j+1} - E11 z^{j+2} = R_{j+1},   z^{N+1} = 0.
struct AdjointSolve {
  PiecewiseConstant z;
  AdjointMethod method{AdjointMethod::kDirect};
  int sweeps{0};
  /// ||A^T z - R|| / ||R|| (0 when R = 0 and z = 0).
  double residual_norm{0.0};
};

/// Backward recursion. The cache, if given, must be built for S^T.
AdjointSolve SolveAdjointDirect(const ReducedSystem& red, const TimeGrid& grid,
                                const std::vector<Vector>& sources,
                                StepFactorCache* cache = nullptr);

/// Block-Jacobi iteration  Z^{l+1}_j = M_j^{-1} (E11 Z^l_{j+1} + R_j),
/// Z^0 = 0, one parallel map per sweep.
class JacobiIteration {
 public:
  JacobiIteration(const ReducedSystem& red, const TimeGrid& grid,
                  const std::vector<Vector>& sources,
                  StepFactorCache* cache = nullptr);

  void Sweep();
  int sweeps() const { return sweeps_; }
  const std::vector<Vector>& iterate() const { return z_; }
  /// ||Z^l - Z^{l-1}||_{E11} / ||Z^l||_{E11} of the last sweep.
  double last_update() const { return last_update_; }
  AdjointSolve Result() const;

 private:
  const ReducedSystem* red_;
  TimeGrid grid_;
  const std::vector<Vector>* sources_;
  StepFactorCache own_cache_;
  StepFactorCache* cache_;
  std::vector<const LuFactor*> factors_;
  std::vector<Vector> z_;
  int sweeps_{0};
  double last_update_{0.0};
};

/// Exactly min(sweeps, N) Jacobi sweeps; exact once sweeps >= N.
AdjointSolve JacobiSolve(const ReducedSystem& red, const TimeGrid& grid,
                         const std::vector<Vector>& sources, int sweeps,
                         StepFactorCache* cache = nullptr);

/// Sweeps until the relative E11-norm update drops below tol or l = N.
AdjointSolve JacobiSolveToTolerance(const ReducedSystem& red,
                                    const TimeGrid& grid,
                                    const std::vector<Vector>& sources,
                                    double tol = 1e-12);

/// ||A^T z - R|| over the stacked block vector.
double AdjointBlockResidual(const ReducedSystem& red, const TimeGrid& grid,
                            const std::vector<Vector>& z,
                            const std::vector<Vector>& sources);

/// Amplification matrix Gamma_j = (E11 + k_j S^T)^{-1} E11.
Matrix AmplificationMatrix(const ReducedSystem& red, double k);

struct ContractionReport {
  std::vector<double> rho;
  std::vector<double> bound;
  double mu_min{0.0};
  double worst{0.0};
  /// False when alpha <= 0: contraction is not guaranteed.
  bool coercive{false};
};
ContractionReport ComputeContractionReport(const ReducedSystem& red,
                                           const TimeGrid& grid);

/// ||z^1||^2 + sum_{j=1}^{N-1} ||z^{j+1} - z^j||^2 + sum_{j=1}^{N-1} k_j ||z^j||^2.
double AdjointStabilityNorm(const PiecewiseConstant& z);

/// Right-hand side of the adjoint stability estimate with c(mu, T) = c.
double AdjointStabilityBound(const ReducedSystem& red, const TimeGrid& grid,
                             const std::vector<Vector>& sources, double mu,
                             double c = 1.0);

}  // namespace phdae
