#include "phdae/numerics.h"

#include <cmath>
#include <limits>
#include <string>

#include "phdae/error.h"

namespace phdae {
namespace {

void RequireSquare(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": matrix must be square");
  }
}

void RequireFinite(const Matrix& m, const char* what) {
  if (!AllFinite(m)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": non-finite entry");
  }
}

}  // namespace

double MaxAbs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool AllFinite(const Matrix& m) { return m.allFinite(); }

bool IsSymmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(MaxAbs(m), std::numeric_limits<double>::min());
  return MaxAbs(m - m.transpose()) <= rel_tol * scale;
}

double RelativeMinPivot(const Matrix& m) {
  if (m.size() == 0) return 1.0;
  const double scale = MaxAbs(m);
  if (scale == 0.0) return 0.0;
  Eigen::PartialPivLU<Matrix> lu(m);
  return lu.matrixLU().diagonal().cwiseAbs().minCoeff() / scale;
}

LuFactor::LuFactor(const Matrix& m) : rows_(static_cast<int>(m.rows())) {
  RequireSquare(m, "LuFactor");
  RequireFinite(m, "LuFactor");
  if (m.size() == 0) {
    relative_min_pivot_ = 1.0;
    return;
  }
  const double scale = MaxAbs(m);
  if (scale == 0.0) {
    throw Error(ErrorCode::kSingularMatrix, "zero matrix");
  }
  lu_.compute(m);
  relative_min_pivot_ =
      lu_.matrixLU().diagonal().cwiseAbs().minCoeff() / scale;
  if (relative_min_pivot_ < kSingularPivotTol) {
    throw Error(ErrorCode::kSingularMatrix,
                "relative pivot " + std::to_string(relative_min_pivot_));
  }
}

Vector LuFactor::Solve(const Vector& rhs) const {
  if (rhs.size() != rows_) {
    throw Error(ErrorCode::kInvalidArgument, "LuFactor::Solve: size mismatch");
  }
  if (rows_ == 0) return Vector(0);
  return lu_.solve(rhs);
}

Matrix LuFactor::Solve(const Matrix& rhs) const {
  if (rhs.rows() != rows_) {
    throw Error(ErrorCode::kInvalidArgument, "LuFactor::Solve: size mismatch");
  }
  if (rows_ == 0) return Matrix(0, rhs.cols());
  return lu_.solve(rhs);
}

Vector FactorSolve(const Matrix& m, const Vector& rhs) {
  return LuFactor(m).Solve(rhs);
}

double LambdaMinSym(const Matrix& m) {
  RequireSquare(m, "LambdaMinSym");
  RequireFinite(m, "LambdaMinSym");
  if (m.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "LambdaMinSym: empty matrix");
  }
  if (!IsSymmetric(m)) {
    throw Error(ErrorCode::kNotSymmetric, "LambdaMinSym");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double LambdaMinPair(const Matrix& a, const Matrix& b) {
  RequireSquare(a, "LambdaMinPair");
  RequireSquare(b, "LambdaMinPair");
  if (a.rows() != b.rows() || a.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "LambdaMinPair: size mismatch");
  }
  if (!IsSymmetric(a) || !IsSymmetric(b)) {
    throw Error(ErrorCode::kNotSymmetric, "LambdaMinPair");
  }
  const Matrix bs = 0.5 * (b + b.transpose());
  Eigen::LLT<Matrix> llt(bs);
  if (llt.info() != Eigen::Success ||
      llt.matrixLLT().diagonal().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kNotSPD, "LambdaMinPair: B not positive definite");
  }
  const Matrix as = 0.5 * (a + a.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(
      as, bs, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return es.eigenvalues()(0);
}

double SpectralRadius(const Matrix& m) {
  RequireSquare(m, "SpectralRadius");
  RequireFinite(m, "SpectralRadius");
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

KernelSplit KernelBasis(const Matrix& e) {
  RequireSquare(e, "KernelBasis");
  RequireFinite(e, "KernelBasis");
  const Eigen::Index n = e.rows();
  KernelSplit split;
  if (n == 0) {
    split.V.resize(0, 0);
    split.W.resize(0, 0);
    return split;
  }
  Eigen::BDCSVD<Matrix> svd(e, Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double cut = 1e-10 * sigma(0);
  Eigen::Index rank = 0;
  if (sigma(0) > 0.0) {
    while (rank < n && sigma(rank) > cut) ++rank;
  }
  split.V = svd.matrixV().leftCols(rank);
  split.W = svd.matrixV().rightCols(n - rank);
  return split;
}

}  // namespace phdae
