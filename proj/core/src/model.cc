#include "phdae/model.h"

#include <cmath>
#include <random>
#include <sstream>

#include "phdae/error.h"

namespace phdae {
namespace {

void CheckDimensions(const PhDaeSystem& sys) {
  const auto n = sys.E.rows();
  auto square = [n](const Matrix& m) { return m.rows() == n && m.cols() == n; };
  if (sys.E.cols() != n || !square(sys.J) || !square(sys.R) ||
      !square(sys.Q) || sys.B.rows() != n || sys.x0.size() != n) {
    throw Error(ErrorCode::kModelError, "inconsistent system dimensions");
  }
  if (sys.B.cols() != sys.input.channels()) {
    throw Error(ErrorCode::kModelError,
                "B has " + std::to_string(sys.B.cols()) +
                    " columns but input has " +
                    std::to_string(sys.input.channels()) + " channels");
  }
  if (!(sys.T > 0.0) || !std::isfinite(sys.T)) {
    throw Error(ErrorCode::kModelError, "horizon T must be positive");
  }
  for (const Matrix* m : {&sys.E, &sys.J, &sys.R, &sys.Q, &sys.B}) {
    if (!AllFinite(*m)) {
      throw Error(ErrorCode::kModelError, "non-finite matrix entry");
    }
  }
  if (!sys.x0.allFinite()) {
    throw Error(ErrorCode::kModelError, "non-finite initial value");
  }
}

// Transformed blocks for a given splitting pair.
struct Blocks {
  Matrix V, W, E11, A11, A12, A21, A22, B1, B2;
  Vector x1, x2;  // coordinates of x0
};

Blocks Transform(const PhDaeSystem& sys, const Matrix& V, const Matrix& W) {
  const auto n = sys.n();
  if (V.rows() != n || W.rows() != n || V.cols() + W.cols() != n) {
    throw Error(ErrorCode::kModelError, "splitting pair has wrong shape");
  }
  Blocks b;
  b.V = V;
  b.W = W;
  const auto r = V.cols();
  Matrix tm(n, n);
  tm << V, W;
  const Matrix a = tm.transpose() * sys.Q.transpose() * (sys.J - sys.R) *
                   sys.Q * tm;
  const Matrix e11 = V.transpose() * sys.Q.transpose() * sys.E * V;
  b.E11 = 0.5 * (e11 + e11.transpose());
  b.A11 = a.topLeftCorner(r, r);
  b.A12 = a.topRightCorner(r, n - r);
  b.A21 = a.bottomLeftCorner(n - r, r);
  b.A22 = a.bottomRightCorner(n - r, n - r);
  const Matrix bt = tm.transpose() * sys.Q.transpose() * sys.B;
  b.B1 = bt.topRows(r);
  b.B2 = bt.bottomRows(n - r);
  const Vector c = LuFactor(tm).Solve(sys.x0);
  b.x1 = c.head(r);
  b.x2 = c.tail(n - r);
  return b;
}

double Norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

}  // namespace

bool ValidationReport::ok() const {
  for (const auto& c : checks) {
    if (c.required && !c.passed) return false;
  }
  return true;
}

const ValidationCheck* ValidationReport::Find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::FailureSummary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    if (c.required && !c.passed) {
      os << c.name << " failed (value " << c.value << ")";
      if (!c.detail.empty()) os << ": " << c.detail;
      os << "\n";
    }
  }
  return os.str();
}

ValidationReport ValidateStructure(const PhDaeSystem& sys,
                                   std::uint64_t seed) {
  CheckDimensions(sys);
  ValidationReport rep;
  auto add = [&rep](std::string name, bool passed, double value,
                    std::string detail = {}, bool required = true) {
    rep.checks.push_back(
        {std::move(name), passed, required, value, std::move(detail)});
  };
  const int n = sys.n();
  const KernelSplit split = KernelBasis(sys.E);
  const int r = static_cast<int>(split.V.cols());

  add("e_rank_deficient", r < n, r, "rank of E", false);

  const double q_pivot = RelativeMinPivot(sys.Q);
  add("q_nonsingular", q_pivot >= kSingularPivotTol, q_pivot);

  const Matrix etq = sys.E.transpose() * sys.Q;
  const double etq_asym = MaxAbs(etq - etq.transpose());
  add("etq_symmetric", IsSymmetric(etq), etq_asym);

  const double j_scale = std::max(MaxAbs(sys.J), 1e-300);
  const double j_sym = MaxAbs(sys.J + sys.J.transpose());
  add("j_skew", j_sym <= kSymmetryTol * j_scale, j_sym);

  {
    bool psd = IsSymmetric(sys.R);
    double lmin = 0.0;
    if (psd && n > 0) {
      lmin = LambdaMinSym(sys.R);
      psd = lmin >= -kSymmetryTol * std::max(MaxAbs(sys.R), 1e-300);
    }
    add("r_symmetric_psd", psd, lmin);
  }

  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.5, 2.0);
    const Matrix a = (sys.J - sys.R) * sys.Q;
    double best = 0.0;
    for (int s = 0; s < 5; ++s) {
      best = std::max(best, RelativeMinPivot(dist(rng) * sys.E - a));
    }
    add("pencil_regular", best > kSingularPivotTol, best);
  }

  std::optional<Blocks> blocks;
  try {
    blocks = Transform(sys, split.V, split.W);
  } catch (const Error& e) {
    add("etq_positive_on_range", false, 0.0, e.what());
    add("index_one", false, 0.0, e.what());
    add("consistent_x0", false, 0.0, e.what());
    return rep;
  }

  {
    double lmin = 0.0;
    bool pos = r > 0;
    if (r > 0) {
      lmin = LambdaMinSym(blocks->E11);
      pos = lmin > kSingularPivotTol * MaxAbs(blocks->E11);
    }
    add("etq_positive_on_range", pos, lmin);
  }

  const double a22_pivot = RelativeMinPivot(blocks->A22);
  const bool index_one = a22_pivot >= kSingularPivotTol;
  add("index_one", index_one, a22_pivot);

  {
    const Vector u0 = sys.input.Evaluate(0.0);
    const Vector res =
        blocks->A21 * blocks->x1 + blocks->A22 * blocks->x2 + blocks->B2 * u0;
    const double scale = Norm2(blocks->A21) * blocks->x1.norm() +
                         Norm2(blocks->A22) * blocks->x2.norm() +
                         Norm2(blocks->B2) * u0.norm();
    const double norm = res.size() == 0 ? 0.0 : res.norm();
    const bool consistent = norm <= 1e-10 * scale || norm == 0.0;
    add("consistent_x0", consistent, norm, "algebraic residual at t = 0");
  }
  return rep;
}

ReducedSystem Reduce(const PhDaeSystem& sys,
                     const std::optional<SplittingPair>& pair) {
  CheckDimensions(sys);
  Blocks b;
  if (pair) {
    if (MaxAbs(sys.E * pair->W) > 1e-10 * std::max(MaxAbs(sys.E), 1e-300)) {
      throw Error(ErrorCode::kModelError, "splitting pair: E W != 0");
    }
    b = Transform(sys, pair->V, pair->W);
  } else {
    const KernelSplit split = KernelBasis(sys.E);
    b = Transform(sys, split.V, split.W);
  }
  ReducedSystem red;
  const auto r = b.V.cols();
  const auto na = b.W.cols();
  const auto m = sys.m();
  if (r == 0) {
    throw Error(ErrorCode::kModelError, "system has no differential part");
  }
  red.V = b.V;
  red.W = b.W;
  red.E11 = b.E11;
  red.A11 = b.A11;
  red.A12 = b.A12;
  red.A21 = b.A21;
  red.A22 = b.A22;
  red.B1 = b.B1;
  red.B2 = b.B2;
  if (na > 0) {
    std::optional<LuFactor> a22;
    try {
      a22.emplace(b.A22);
    } catch (const Error&) {
      throw Error(ErrorCode::kIndexTooHigh, "A22 is singular");
    }
    red.a22_inv_a21 = a22->Solve(b.A21);
    red.a22_inv_b2 = a22->Solve(b.B2);
  } else {
    red.a22_inv_a21 = Matrix::Zero(0, r);
    red.a22_inv_b2 = Matrix::Zero(0, m);
  }
  red.S = -(b.A11 - b.A12 * red.a22_inv_a21);
  red.forcing_matrix = b.B1 - b.A12 * red.a22_inv_b2;
  red.x10 = b.x1;
  red.T = sys.T;
  red.input = sys.input;

  if (LambdaMinSym(red.E11) <= kSingularPivotTol * MaxAbs(red.E11)) {
    throw Error(ErrorCode::kModelError, "E11 is not positive definite");
  }
  const Matrix st = red.SymmetricPart();
  red.alpha = LambdaMinSym(st);
  red.mu_min = LambdaMinPair(st, red.E11);

  red.P = b.V - b.W * red.a22_inv_a21;
  red.q = -b.W * red.a22_inv_b2;
  red.Yx = b.B1.transpose() - b.B2.transpose() * red.a22_inv_a21;
  red.Yu = -b.B2.transpose() * red.a22_inv_b2;
  const Matrix qp = sys.Q * red.P;
  const Matrix qq = sys.Q * red.q;
  red.Dxx = qp.transpose() * sys.R * qp;
  red.Dxx = 0.5 * (red.Dxx + red.Dxx.transpose());
  red.Dxu = qp.transpose() * sys.R * qq;
  red.Duu = qq.transpose() * sys.R * qq;
  return red;
}

Vector ConsistentInitialValue(const PhDaeSystem& sys) {
  CheckDimensions(sys);
  const KernelSplit split = KernelBasis(sys.E);
  const Blocks b = Transform(sys, split.V, split.W);
  if (b.W.cols() == 0) return sys.x0;
  const Vector u0 = sys.input.Evaluate(0.0);
  const Vector x2 = -LuFactor(b.A22).Solve(Vector(b.A21 * b.x1 + b.B2 * u0));
  return b.V * b.x1 + b.W * x2;
}

Vector ReducedSystem::AlgebraicReconstruction(const Vector& x1,
                                              double t) const {
  return AlgebraicReconstructionFromInput(x1, input.Evaluate(t));
}

Vector ReducedSystem::AlgebraicReconstructionFromInput(const Vector& x1,
                                                       const Vector& u) const {
  return -(a22_inv_a21 * x1 + a22_inv_b2 * u);
}

Vector ReducedSystem::Forcing(double t) const {
  return forcing_matrix * input.Evaluate(t);
}

Vector ReducedSystem::FullState(const Vector& x1, double t) const {
  return P * x1 + q * input.Evaluate(t);
}

double ReducedSystem::Hamiltonian(const Vector& x1) const {
  return 0.5 * x1.dot(E11 * x1);
}

ReducedSystem::PowerImbalance ReducedSystem::EvaluatePowerImbalance(
    double t, const Vector& x1) const {
  return EvaluatePowerImbalanceFromInput(input.Evaluate(t), x1);
}

ReducedSystem::PowerImbalance ReducedSystem::EvaluatePowerImbalanceFromInput(
    const Vector& u, const Vector& x1) const {
  const Vector y = Yx * x1 + Yu * u;
  const Vector dxx_x = Dxx * x1;
  const Vector dxu_u = Dxu * u;
  PowerImbalance out;
  out.g = -y.dot(u) + x1.dot(dxx_x) + 2.0 * x1.dot(dxu_u) + u.dot(Duu * u);
  out.grad = -Yx.transpose() * u + 2.0 * dxx_x + 2.0 * dxu_u;
  return out;
}

}  // namespace phdae
