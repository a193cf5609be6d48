#pragma once

#include "transferop/types.hpp"

namespace transferop::linalg {

inline constexpr double kDefaultRankTol = 1e-10;

/// Symmetric real matrix. Construction symmetrizes explicitly, (M + Mᵀ)/2,
/// and rejects non-finite entries.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  /// Like the constructor, but also rejects inputs whose asymmetry exceeds
  /// `rel_tol` relative to the largest entry.
  static SymMatrix checked(const Matrix& m, double rel_tol);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  Matrix m_;
};

enum class Order { Descending, Ascending };

struct PseudoInverse {
  SymMatrix matrix;
  Index rank = 0;
};

/// Moore–Penrose pseudoinverse through a symmetric eigendecomposition.
/// Eigenvalues at or below tol × (largest eigenvalue) are treated as zero.
PseudoInverse regularized_pinv(const SymMatrix& m, double tol = kDefaultRankTol);

/// Whitening transform of a PSD matrix B: the columns of `transform`
/// span the retained eigenspace and satisfy transformᵀ B transform = I.
struct Whitener {
  Matrix transform;  ///< dim × rank, U_r diag(1/√d_r)
  Vector eigenvalues;  ///< retained eigenvalues, ascending
  Index rank = 0;
};

Whitener whiten(const SymMatrix& b, double tol = kDefaultRankTol);

struct GeneralizedEigenSolution {
  Vector values;
  Matrix vectors;    ///< dim × k, column i paired with values[i]
  Matrix companion;  ///< left-side weights for the singular solver; empty otherwise
  Index rank = 0;    ///< effective rank of the mass matrix
  bool truncated = false;  ///< k exceeded the retained rank
  double max_imag = 0.0;   ///< largest discarded imaginary part (general solver only)
};

/// Solves A w = λ B w by whitening B and diagonalizing LᵀAL.
/// Returned vectors are B-orthonormal and sign-normalized.
GeneralizedEigenSolution solve_generalized_sym(const SymMatrix& a, const SymMatrix& b, Index k,
                                               Order order, double tol = kDefaultRankTol);

/// Diagnostic variant for a non-symmetric A: the whitened matrix LᵀAL is
/// diagonalized without symmetrization and real parts are kept, ordered by
/// real part. The discarded imaginary magnitude is reported in max_imag.
GeneralizedEigenSolution solve_generalized_general(const Matrix& a, const SymMatrix& b, Index k,
                                                   Order order, double tol = kDefaultRankTol);

/// Singular values and vectors of the pair (C00, C11) coupled by C01,
/// i.e. the solutions of C00⁺C01C11⁺C10 w = σ² w computed in symmetric form.
///
/// values are σ (descending, nonnegative); vectors hold W_o (C00-orthonormal),
/// companion holds W_o′ (C11-orthonormal) with C01 W_o′ = C00 W_o diag(σ) on the
/// retained ranks.
GeneralizedEigenSolution solve_nonsym_product(const SymMatrix& c00, const Matrix& c01,
                                              const SymMatrix& c11, const Matrix& c10, Index k,
                                              double tol = kDefaultRankTol);

/// Flips each column so its largest-magnitude entry is positive. The same
/// flips are applied to the matching columns of `companion` when non-empty.
void normalize_signs(Matrix& vectors, Matrix* companion = nullptr);

}  // namespace transferop::linalg
