#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>

#include "test_util.hpp"
#include "transferop/error.hpp"
#include "transferop/linalg_spectral.hpp"

using namespace transferop;
using namespace transferop::linalg;
using transferop::testing::max_abs;
using transferop::testing::random_matrix;
using transferop::testing::random_psd;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(SymMatrix, SymmetrizesAndRejectsNonFinite) {
  Matrix m(2, 2);
  m << 1, 2, 4, 3;
  const SymMatrix s(m);
  EXPECT_DOUBLE_EQ(s.matrix()(0, 1), 3.0);
  EXPECT_DOUBLE_EQ(s.matrix()(1, 0), 3.0);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { SymMatrix{m}; }), ErrorKind::InvalidMatrix);
  EXPECT_EQ(kind_of([&] { SymMatrix::checked(random_matrix(3, 3, 1), 1e-12); }),
            ErrorKind::InvalidMatrix);
  EXPECT_EQ(kind_of([&] { SymMatrix{random_matrix(2, 3, 1)}; }), ErrorKind::InvalidShape);
}

TEST(Pinv, DiagonalExamples) {
  const auto p = regularized_pinv(SymMatrix(Vector(Eigen::Vector2d(4, 1)).asDiagonal().toDenseMatrix()));
  EXPECT_NEAR(p.matrix.matrix()(0, 0), 0.25, 1e-15);
  EXPECT_NEAR(p.matrix.matrix()(1, 1), 1.0, 1e-15);
  EXPECT_EQ(p.rank, 2);

  const auto q = regularized_pinv(SymMatrix(Vector(Eigen::Vector2d(1, 0)).asDiagonal().toDenseMatrix()));
  EXPECT_NEAR(q.matrix.matrix()(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(q.matrix.matrix()(1, 1), 0.0, 1e-15);
  EXPECT_EQ(q.rank, 1);
}

TEST(Pinv, PenroseIdentitiesOnGramMatrix) {
  const Matrix b = random_matrix(5, 5, 11);
  const Matrix g = b.transpose() * b;
  const Matrix p = regularized_pinv(SymMatrix(g)).matrix.matrix();
  EXPECT_LE(max_abs(g * p * g - g), 1e-10 * max_abs(g));
  EXPECT_LE(max_abs(p * g * p - p), 1e-10 * max_abs(p));
  EXPECT_LE(max_abs((g * p).transpose() - g * p), 1e-10);
}

TEST(Pinv, RankDeficientMatchesPenrose) {
  const Matrix g = random_psd(7, 3, 4);
  const auto p = regularized_pinv(SymMatrix(g));
  EXPECT_EQ(p.rank, 3);
  const Matrix& pm = p.matrix.matrix();
  EXPECT_LE(max_abs(g * pm * g - g), 1e-9 * max_abs(g));
  EXPECT_LE(max_abs(pm * g * pm - pm), 1e-9 * max_abs(pm));
}

TEST(Pinv, Errors) {
  EXPECT_EQ(kind_of([] { regularized_pinv(SymMatrix(Matrix::Zero(3, 3))); }), ErrorKind::RankZero);
  EXPECT_EQ(kind_of([] { regularized_pinv(SymMatrix(Matrix::Identity(2, 2)), 0.0); }),
            ErrorKind::InvalidArgument);
}

TEST(Whiten, TransformIsBOrthonormal) {
  const Matrix b = random_psd(6, 4, 9);
  const Whitener w = whiten(SymMatrix(b));
  EXPECT_EQ(w.rank, 4);
  EXPECT_LE(max_abs(w.transform.transpose() * b * w.transform - Matrix::Identity(4, 4)), 1e-10);
}

TEST(GeneralizedSym, DiagonalExample) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 2;
  a(1, 1) = 1;
  const auto sol = solve_generalized_sym(SymMatrix(a), SymMatrix(Matrix::Identity(2, 2)), 2,
                                         Order::Descending);
  EXPECT_NEAR(sol.values(0), 2.0, 1e-14);
  EXPECT_NEAR(sol.values(1), 1.0, 1e-14);
  EXPECT_LE(max_abs(sol.vectors - Matrix::Identity(2, 2)), 1e-14);
}

TEST(GeneralizedSym, IdentitySpectrumWhenAEqualsB) {
  const Matrix b = random_psd(5, 5, 2) + Matrix::Identity(5, 5);
  const auto sol = solve_generalized_sym(SymMatrix(b), SymMatrix(b), 5, Order::Descending);
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(sol.values(i), 1.0, 1e-10);
}

TEST(GeneralizedSym, MatchesCholeskyReferenceOnRandomPencil) {
  const Matrix s = random_matrix(8, 8, 21);
  const Matrix a = s + s.transpose();
  const Matrix b = random_psd(8, 8, 22) + 0.5 * Matrix::Identity(8, 8);
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ref(a, b);
  const auto sol = solve_generalized_sym(SymMatrix(a), SymMatrix(b), 8, Order::Ascending);
  for (Index i = 0; i < 8; ++i) EXPECT_NEAR(sol.values(i), ref.eigenvalues()(i), 1e-8);

  const auto desc = solve_generalized_sym(SymMatrix(a), SymMatrix(b), 3, Order::Descending);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(desc.values(i), ref.eigenvalues()(7 - i), 1e-8);
}

TEST(GeneralizedSym, OrthonormalityResidualAndSigns) {
  const Matrix s = random_matrix(10, 10, 31);
  const Matrix a = s + s.transpose();
  const Matrix b = random_psd(10, 7, 32);
  const auto sol = solve_generalized_sym(SymMatrix(a), SymMatrix(b), 7, Order::Descending);
  EXPECT_EQ(sol.rank, 7);
  EXPECT_FALSE(sol.truncated);
  const Matrix& v = sol.vectors;
  EXPECT_LE(max_abs(v.transpose() * b * v - Matrix::Identity(7, 7)), 1e-8);
  // Residual of the pencil restricted to the retained range of B.
  const auto p = regularized_pinv(SymMatrix(b));
  const Matrix proj = b * p.matrix.matrix();
  for (Index i = 0; i < 7; ++i) {
    const Vector r = proj.transpose() * a * v.col(i) - sol.values(i) * b * v.col(i);
    EXPECT_LE(r.norm() / a.norm(), 1e-8);
    Index arg = 0;
    v.col(i).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(v(arg, i), 0.0);
  }
  for (Index i = 1; i < 7; ++i) EXPECT_GE(sol.values(i - 1), sol.values(i));
}

TEST(GeneralizedSym, ScaleInvariance) {
  const Matrix s = random_matrix(6, 6, 41);
  const Matrix a = s + s.transpose();
  const Matrix b = random_psd(6, 6, 42) + Matrix::Identity(6, 6);
  const auto x = solve_generalized_sym(SymMatrix(a), SymMatrix(b), 6, Order::Descending);
  const auto y = solve_generalized_sym(SymMatrix(3.5 * a), SymMatrix(3.5 * b), 6, Order::Descending);
  EXPECT_LE((x.values - y.values).cwiseAbs().maxCoeff(), 1e-8);
  // Vectors of (cA, cB) are B-normalized under cB, so they shrink by 1/√c.
  EXPECT_LE(max_abs(x.vectors - std::sqrt(3.5) * y.vectors), 1e-8 * max_abs(x.vectors));
}

TEST(GeneralizedSym, TruncatesWhenRankIsShort) {
  const Matrix a = Matrix::Identity(5, 5);
  const auto sol = solve_generalized_sym(SymMatrix(a), SymMatrix(random_psd(5, 2, 3)), 4,
                                         Order::Descending);
  EXPECT_TRUE(sol.truncated);
  EXPECT_EQ(sol.values.size(), 2);
  EXPECT_EQ(kind_of([&] {
              solve_generalized_sym(SymMatrix(a), SymMatrix(Matrix::Zero(5, 5)), 2, Order::Ascending);
            }),
            ErrorKind::RankZero);
}

TEST(GeneralizedGeneral, AgreesWithSymmetricSolverOnSymmetricInput) {
  const Matrix s = random_matrix(6, 6, 51);
  const Matrix a = s + s.transpose();
  const Matrix b = random_psd(6, 6, 52) + Matrix::Identity(6, 6);
  const auto sym = solve_generalized_sym(SymMatrix(a), SymMatrix(b), 6, Order::Descending);
  const auto gen = solve_generalized_general(a, SymMatrix(b), 6, Order::Descending);
  EXPECT_LE((sym.values - gen.values).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE(gen.max_imag, 1e-12);
}

TEST(GeneralizedGeneral, ReportsImaginaryPart) {
  Matrix rot(2, 2);
  rot << 0, -1, 1, 0;
  const auto sol = solve_generalized_general(rot, SymMatrix(Matrix::Identity(2, 2)), 2,
                                             Order::Descending);
  EXPECT_NEAR(sol.max_imag, 1.0, 1e-12);
  EXPECT_NEAR(sol.values(0), 0.0, 1e-12);
}

TEST(NonsymProduct, IdentityInstance) {
  const Matrix i4 = Matrix::Identity(4, 4);
  const auto sol = solve_nonsym_product(SymMatrix(i4), i4, SymMatrix(i4), i4, 4);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(sol.values(i), 1.0, 1e-14);
}

TEST(NonsymProduct, SymmetricCaseMatchesEigenSolverMagnitudes) {
  const Matrix s = random_matrix(6, 6, 61);
  const Matrix c01 = s + s.transpose();
  const Matrix c00 = random_psd(6, 6, 62) + Matrix::Identity(6, 6);
  const auto sv = solve_nonsym_product(SymMatrix(c00), c01, SymMatrix(c00), c01, 6);
  const auto ev = solve_generalized_sym(SymMatrix(c01), SymMatrix(c00), 6, Order::Descending);
  std::vector<double> mags;
  for (Index i = 0; i < 6; ++i) mags.push_back(std::abs(ev.values(i)));
  std::sort(mags.rbegin(), mags.rend());
  for (Index i = 0; i < 6; ++i) EXPECT_NEAR(sv.values(i), mags[static_cast<std::size_t>(i)], 1e-8);
}

TEST(NonsymProduct, MatchesBruteForceProductEigendecomposition) {
  const Matrix c00 = random_psd(6, 6, 71) + 0.1 * Matrix::Identity(6, 6);
  const Matrix c11 = random_psd(6, 6, 72) + 0.1 * Matrix::Identity(6, 6);
  const Matrix c01 = random_matrix(6, 6, 73);
  const Matrix c10 = c01.transpose();
  const auto sol = solve_nonsym_product(SymMatrix(c00), c01, SymMatrix(c11), c10, 6);

  // Oracle: eigenvalues of the explicit non-symmetric product.
  const Matrix product = c00.completeOrthogonalDecomposition().pseudoInverse() * c01 *
                         c11.completeOrthogonalDecomposition().pseudoInverse() * c10;
  Eigen::EigenSolver<Matrix> eig(product);
  std::vector<double> ref;
  for (Index i = 0; i < 6; ++i) ref.push_back(eig.eigenvalues()(i).real());
  std::sort(ref.rbegin(), ref.rend());
  for (Index i = 0; i < 6; ++i) {
    EXPECT_NEAR(sol.values(i) * sol.values(i), ref[static_cast<std::size_t>(i)],
                1e-8 * std::max(1.0, ref[0]));
  }
  for (Index i = 1; i < 6; ++i) EXPECT_GE(sol.values(i - 1), sol.values(i));
  EXPECT_GE(sol.values.minCoeff(), 0.0);

  const Matrix& w = sol.vectors;
  const Matrix& wp = sol.companion;
  EXPECT_LE(max_abs(w.transpose() * c00 * w - Matrix::Identity(6, 6)), 1e-8);
  EXPECT_LE(max_abs(wp.transpose() * c11 * wp - Matrix::Identity(6, 6)), 1e-8);
  EXPECT_LE(max_abs(c01 * wp - c00 * w * sol.values.asDiagonal()), 1e-8 * max_abs(c01));
}

TEST(NonsymProduct, RejectsInconsistentTranspose) {
  const Matrix i3 = Matrix::Identity(3, 3);
  Matrix c01 = random_matrix(3, 3, 81);
  EXPECT_EQ(kind_of([&] { solve_nonsym_product(SymMatrix(i3), c01, SymMatrix(i3), c01, 2); }),
            ErrorKind::InvalidMatrix);
}

TEST(NormalizeSigns, LargestEntryBecomesPositiveAndCompanionFollows) {
  Matrix v(3, 2);
  v << 1, 0.2, -3, 0.1, 2, -0.5;
  Matrix c = Matrix::Ones(2, 2);
  normalize_signs(v, &c);
  EXPECT_DOUBLE_EQ(v(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(v(2, 1), 0.5);
  EXPECT_DOUBLE_EQ(c(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(c(0, 1), -1.0);
}
