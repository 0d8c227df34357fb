#include <gtest/gtest.h>

#include <cmath>

#include "phdae/error.h"
#include "phdae/numerics.h"

namespace phdae {
namespace {

TEST(LuFactor, IdentityDiagonalPermutation) {
  EXPECT_TRUE(FactorSolve(Matrix::Identity(2, 2), Vector::Map(std::vector<double>{3, -1}.data(), 2))
                  .isApprox((Vector(2) << 3, -1).finished()));
  Matrix d(2, 2);
  d << 2, 0, 0, 4;
  EXPECT_TRUE(FactorSolve(d, (Vector(2) << 2, 8).finished())
                  .isApprox((Vector(2) << 1, 2).finished()));
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  const Vector x = FactorSolve(p, (Vector(2) << 0.25, -7).finished());
  EXPECT_DOUBLE_EQ(x(0), -7);
  EXPECT_DOUBLE_EQ(x(1), 0.25);
}

TEST(LuFactor, SingularThrows) {
  Matrix s(2, 2);
  s << 1, 2, 2, 4;
  try {
    LuFactor lu(s);
    FAIL() << "expected SingularMatrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularMatrix);
  }
  Matrix near(2, 2);
  near << 1, 0, 0, 1e-14;
  EXPECT_THROW(LuFactor{near}, Error);
  near(1, 1) = 1e-10;
  EXPECT_NO_THROW(LuFactor{near});
}

TEST(LuFactor, MatrixRightHandSide) {
  Matrix m(3, 3);
  m << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const LuFactor lu(m);
  const Matrix x = lu.Solve(Matrix(Matrix::Identity(3, 3)));
  EXPECT_TRUE((m * x).isApprox(Matrix::Identity(3, 3), 1e-14));
}

TEST(LambdaMinSym, Examples) {
  Matrix d(2, 2);
  d << 10.5, 0, 0, 0.5;
  EXPECT_NEAR(LambdaMinSym(d), 0.5, 1e-14);
  EXPECT_NEAR(LambdaMinSym(Matrix::Identity(3, 3)), 1.0, 1e-14);
  Matrix p(2, 2);
  p << 0, 1, 1, 0;
  EXPECT_NEAR(LambdaMinSym(p), -1.0, 1e-14);
  Matrix ns(2, 2);
  ns << 1, 2, 0, 1;
  EXPECT_THROW(LambdaMinSym(ns), Error);
}

TEST(LambdaMinPair, Examples) {
  Matrix a(2, 2), b(2, 2);
  a << 2, 0, 0, 6;
  b << 1, 0, 0, 2;
  EXPECT_NEAR(LambdaMinPair(a, b), 2.0, 1e-13);
  Matrix st(2, 2);
  st << 10.5, 0, 0, 0.5;
  EXPECT_NEAR(LambdaMinPair(st, Matrix::Identity(2, 2)), LambdaMinSym(st), 1e-13);
  EXPECT_NEAR(LambdaMinPair(Matrix::Zero(2, 2), Matrix::Identity(2, 2)), 0.0, 1e-14);
  Matrix indef(2, 2);
  indef << 1, 0, 0, -1;
  try {
    LambdaMinPair(a, indef);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotSPD);
  }
}

TEST(SpectralRadius, Examples) {
  EXPECT_NEAR(SpectralRadius(Matrix::Constant(1, 1, 0.5)), 0.5, 1e-15);
  Matrix rot(2, 2);
  rot << 0, -0.3, 0.3, 0;
  EXPECT_NEAR(SpectralRadius(rot), 0.3, 1e-14);
  // Scalar amplification (1 + k s)^{-1} with s = 2, k = 0.5.
  const Matrix gamma = Matrix::Constant(1, 1, 1.0 / (1.0 + 0.5 * 2.0));
  EXPECT_NEAR(SpectralRadius(gamma), 0.5, 1e-15);
}

TEST(KernelBasis, DiagonalKernel) {
  Matrix e = Matrix::Zero(3, 3);
  e(0, 0) = 1;
  e(1, 1) = 1;
  const KernelSplit ks = KernelBasis(e);
  ASSERT_EQ(ks.V.cols(), 2);
  ASSERT_EQ(ks.W.cols(), 1);
  EXPECT_NEAR(std::abs(ks.W(2, 0)), 1.0, 1e-14);
  EXPECT_NEAR((e * ks.W).norm(), 0.0, 1e-14);
  EXPECT_NEAR(ks.V.row(2).norm(), 0.0, 1e-14);
}

TEST(KernelBasis, NonsingularAndZero) {
  Matrix e(2, 2);
  e << 2, 1, 1, 3;
  KernelSplit ks = KernelBasis(e);
  EXPECT_EQ(ks.W.cols(), 0);
  EXPECT_EQ(ks.V.cols(), 2);
  EXPECT_GT(std::abs(ks.V.determinant()), 0.5);
  ks = KernelBasis(Matrix::Zero(2, 2));
  EXPECT_EQ(ks.V.cols(), 0);
  EXPECT_EQ(ks.W.cols(), 2);
  EXPECT_TRUE((ks.W.transpose() * ks.W).isApprox(Matrix::Identity(2, 2)));
}

TEST(Symmetry, Helpers) {
  Matrix m(2, 2);
  m << 1, 2, 2 + 1e-13, 1;
  EXPECT_TRUE(IsSymmetric(m));
  m(1, 0) = 2.1;
  EXPECT_FALSE(IsSymmetric(m));
  EXPECT_DOUBLE_EQ(MaxAbs(m), 2.1);
  m(0, 0) = std::nan("");
  EXPECT_FALSE(AllFinite(m));
}

}  // namespace
}  // namespace phdae
