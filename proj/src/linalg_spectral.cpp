#include "transferop/linalg_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "transferop/error.hpp"

namespace transferop::linalg {

namespace {

void require_finite(const Matrix& m, const char* what) {
  require(m.allFinite(), ErrorKind::InvalidMatrix, std::string(what) + " has non-finite entries");
}

void require_square(const Matrix& m, const char* what) {
  require(m.rows() == m.cols(), ErrorKind::InvalidShape, std::string(what) + " is not square");
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  require_square(m, "symmetric matrix");
  require_finite(m, "symmetric matrix");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::checked(const Matrix& m, double rel_tol) {
  require_square(m, "symmetric matrix");
  require_finite(m, "symmetric matrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  require(asym <= rel_tol * scale, ErrorKind::InvalidMatrix,
          "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  return SymMatrix(m);
}

Whitener whiten(const SymMatrix& b, double tol) {
  require(tol > 0.0 && tol < 1.0, ErrorKind::InvalidArgument, "rank tolerance must lie in (0, 1)");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b.matrix());
  require(eig.info() == Eigen::Success, ErrorKind::InvalidMatrix, "eigendecomposition failed");
  const Vector& d = eig.eigenvalues();
  const Index n = d.size();
  const double largest = n > 0 ? d(n - 1) : 0.0;
  require(largest > 0.0, ErrorKind::RankZero, "matrix has no positive eigenvalues");
  const double cutoff = tol * largest;
  Index first = 0;
  while (first < n && d(first) <= cutoff) ++first;
  const Index rank = n - first;
  require(rank > 0, ErrorKind::RankZero, "all eigenvalues fall below the cutoff");

  Whitener w;
  w.rank = rank;
  w.eigenvalues = d.tail(rank);
  w.transform = eig.eigenvectors().rightCols(rank) *
                w.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal();
  return w;
}

PseudoInverse regularized_pinv(const SymMatrix& m, double tol) {
  const Whitener w = whiten(m, tol);
  PseudoInverse out;
  out.rank = w.rank;
  out.matrix = SymMatrix(w.transform * w.transform.transpose());
  return out;
}

void normalize_signs(Matrix& vectors, Matrix* companion) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index arg = 0;
    vectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, j) < 0.0) {
      vectors.col(j) *= -1.0;
      if (companion != nullptr && companion->cols() > j) companion->col(j) *= -1.0;
    }
  }
}

GeneralizedEigenSolution solve_generalized_sym(const SymMatrix& a, const SymMatrix& b, Index k,
                                               Order order, double tol) {
  require(a.dim() == b.dim(), ErrorKind::InvalidShape, "pencil matrices differ in size");
  require(k >= 1 && k <= a.dim(), ErrorKind::InvalidArgument,
          "requested eigenpair count must lie in [1, dim]");

  const Whitener w = whiten(b, tol);
  Matrix reduced = w.transform.transpose() * a.matrix() * w.transform;
  reduced = 0.5 * (reduced + reduced.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(reduced);
  require(eig.info() == Eigen::Success, ErrorKind::InvalidMatrix, "eigendecomposition failed");

  GeneralizedEigenSolution out;
  out.rank = w.rank;
  out.truncated = k > w.rank;
  const Index count = std::min(k, w.rank);
  out.values.resize(count);
  Matrix selected(w.rank, count);
  for (Index i = 0; i < count; ++i) {
    // The symmetric solver returns ascending eigenvalues.
    const Index src = order == Order::Ascending ? i : w.rank - 1 - i;
    out.values(i) = eig.eigenvalues()(src);
    selected.col(i) = eig.eigenvectors().col(src);
  }
  out.vectors = w.transform * selected;
  normalize_signs(out.vectors);
  return out;
}

GeneralizedEigenSolution solve_generalized_general(const Matrix& a, const SymMatrix& b, Index k,
                                                   Order order, double tol) {
  require(a.rows() == b.dim() && a.cols() == b.dim(), ErrorKind::InvalidShape,
          "pencil matrices differ in size");
  require_finite(a, "pencil matrix");
  require(k >= 1 && k <= b.dim(), ErrorKind::InvalidArgument,
          "requested eigenpair count must lie in [1, dim]");

  const Whitener w = whiten(b, tol);
  const Matrix reduced = w.transform.transpose() * a * w.transform;
  Eigen::EigenSolver<Matrix> eig(reduced);
  require(eig.info() == Eigen::Success, ErrorKind::InvalidMatrix, "eigendecomposition failed");
  const Vector re = eig.eigenvalues().real();

  std::vector<Index> idx(static_cast<std::size_t>(w.rank));
  for (Index i = 0; i < w.rank; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](Index l, Index r) {
    return order == Order::Ascending ? re(l) < re(r) : re(l) > re(r);
  });

  GeneralizedEigenSolution out;
  out.rank = w.rank;
  out.truncated = k > w.rank;
  const Index count = std::min(k, w.rank);
  out.values.resize(count);
  Matrix selected(w.rank, count);
  for (Index i = 0; i < count; ++i) {
    const Index src = idx[static_cast<std::size_t>(i)];
    out.values(i) = re(src);
    out.max_imag = std::max(out.max_imag, std::abs(eig.eigenvalues()(src).imag()));
    Vector v = eig.eigenvectors().col(src).real();
    const double norm = v.norm();
    selected.col(i) = norm > 0.0 ? Vector(v / norm) : v;
  }
  out.vectors = w.transform * selected;
  normalize_signs(out.vectors);
  return out;
}

GeneralizedEigenSolution solve_nonsym_product(const SymMatrix& c00, const Matrix& c01,
                                              const SymMatrix& c11, const Matrix& c10, Index k,
                                              double tol) {
  require(c01.rows() == c00.dim() && c01.cols() == c11.dim(), ErrorKind::InvalidShape,
          "C01 shape does not match C00 × C11");
  require(c10.rows() == c01.cols() && c10.cols() == c01.rows(), ErrorKind::InvalidShape,
          "C10 shape does not match C01ᵀ");
  require_finite(c01, "C01");
  require_finite(c10, "C10");
  const double scale = std::max(1.0, c01.cwiseAbs().maxCoeff());
  require((c10 - c01.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          ErrorKind::InvalidMatrix, "C10 must equal C01ᵀ");
  require(k >= 1 && k <= c00.dim(), ErrorKind::InvalidArgument,
          "requested singular pair count must lie in [1, dim]");

  const Whitener w0 = whiten(c00, tol);
  const Whitener w1 = whiten(c11, tol);
  const Matrix coupled = w0.transform.transpose() * c01 * w1.transform;
  Eigen::BDCSVD<Matrix> svd(coupled, Eigen::ComputeThinU | Eigen::ComputeThinV);

  const Index available = std::min(w0.rank, w1.rank);
  GeneralizedEigenSolution out;
  out.rank = w0.rank;
  out.truncated = k > available;
  const Index count = std::min(k, available);
  out.values = svd.singularValues().head(count);
  out.vectors = w0.transform * svd.matrixU().leftCols(count);
  out.companion = w1.transform * svd.matrixV().leftCols(count);
  normalize_signs(out.vectors, &out.companion);
  return out;
}

}  // namespace transferop::linalg
