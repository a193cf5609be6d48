#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "transferop/datasets.hpp"
#include "transferop/linalg_spectral.hpp"
#include "transferop/random_features.hpp"

namespace transferop {

/// Relative eigenvalue cutoff used by the fitting entry points. It is looser
/// than the linalg default because directions with smaller variance mostly
/// carry sampling noise and produce spurious eigenvalues.
inline constexpr double kDefaultFitTol = 1e-6;

enum class Target { Koopman, Schrodinger };

/// H = -(ħ²/2m)Δ + V.
struct HamiltonianSpec {
  ScalarField potential;
  double hbar = 1.0;
  double mass = 1.0;
};

/// Empirical covariances of the feature blocks, all scaled by 1/m.
struct CovarianceSet {
  linalg::SymMatrix c00;
  Matrix c01;
  Matrix c10;  ///< exactly c01ᵀ
  linalg::SymMatrix c11;
  Index m = 0;
  Index feature_dim = 0;
  double featurize_seconds = 0.0;  ///< summed over worker threads
  double accumulate_seconds = 0.0;
};

struct CovarianceOptions {
  Index chunk = 1024;
  bool with_c11 = true;
};

/// Ψ₀ = R(X); Ψ₁ = R(Y) for Koopman, or (HR)(X) for Schrödinger. The feature
/// matrices are produced chunk by chunk and never held in full.
CovarianceSet estimate_covariances(const RandomFeatureMap& rfm, const SnapshotDataset& data,
                                   Target target, const HamiltonianSpec* hamiltonian = nullptr,
                                   const CovarianceOptions& options = {});

enum class SpectralMode : std::uint32_t { KoopmanEigen = 0, Singular = 1, Schrodinger = 2 };

SpectralMode parse_mode(std::string_view name);
std::string_view to_string(SpectralMode mode) noexcept;

struct SpectralModel {
  RandomFeatureMap rfm;
  Matrix w_o;                      ///< N×n; column i defines function i
  Vector values;                   ///< n values; descending except for Schrödinger
  SpectralMode mode = SpectralMode::KoopmanEigen;
  std::optional<Matrix> companion;  ///< N×n left singular weights, singular mode only
  double tol = kDefaultFitTol;
  bool symmetrize = true;
  Index rank = 0;
  bool truncated = false;

  Index size() const noexcept { return values.size(); }
};

struct FitOptions {
  double tol = kDefaultFitTol;
  bool symmetrize = true;
  Index chunk = 1024;
};

struct FitTimings {
  double featurize = 0.0;
  double covariances = 0.0;
  double solve = 0.0;
  double total = 0.0;
};

/// Self-adjoint branch: solves sym(C01) w = λ C00 w, top n.
SpectralModel fit_eigen(const RandomFeatureMap& rfm, const SnapshotDataset& data, Index n,
                        const FitOptions& options = {}, FitTimings* timings = nullptr);

/// Non-self-adjoint branch: leading n singular values and right/left weights.
SpectralModel fit_singular(const RandomFeatureMap& rfm, const SnapshotDataset& data, Index n,
                           const FitOptions& options = {}, FitTimings* timings = nullptr);

/// Lowest n energies of H on the span of the features.
SpectralModel fit_schrodinger(const RandomFeatureMap& rfm, const SnapshotDataset& data, Index n,
                              const HamiltonianSpec& hamiltonian, const FitOptions& options = {},
                              FitTimings* timings = nullptr);

/// Solvers on precomputed covariances.
SpectralModel solve_eigen(const RandomFeatureMap& rfm, const CovarianceSet& cov, Index n,
                          SpectralMode mode, const FitOptions& options);
SpectralModel solve_singular(const RandomFeatureMap& rfm, const CovarianceSet& cov, Index n,
                             const FitOptions& options);

/// Row i is function i at the columns of x: W_oᵀR(x).
Matrix evaluate_functions(const SpectralModel& model, const Matrix& x);
/// Left singular functions W_o′ᵀR(x); singular mode only.
Matrix evaluate_companion(const SpectralModel& model, const Matrix& x);

enum class OutputActivation { Tanh, Identity };

OutputActivation parse_output_activation(std::string_view name);

struct IterativeOptions {
  Index epochs = 100;
  double step = 1.0;           ///< initial step of the backtracking ascent
  double armijo = 1e-4;
  std::uint64_t seed = 0;      ///< W_o initialization
  OutputActivation output = OutputActivation::Tanh;  ///< tanh needs a tanh feature map
  double tol = kDefaultFitTol;
  bool symmetrize = true;
  Index chunk = 1024;
};

/// L(W) = tr(C00(W)⁺C01(W)) for ψ = σ(W R(x)) and its gradient with respect to W.
struct TraceLoss {
  double value = 0.0;
  Matrix gradient;  ///< n×N
  CovarianceSet cov;
};

TraceLoss trace_loss(const RandomFeatureMap& rfm, const SnapshotDataset& data, const Matrix& w,
                     const IterativeOptions& options);

struct TrainedBasisModel {
  Matrix w_o;  ///< n×N
  std::vector<double> loss_history;  ///< entry 0 at initialization, then one per epoch
  Index accepted = 0;
  Index rejected = 0;
  SpectralModel spectral;
};

/// Gradient ascent on the trace loss with a backtracking step. Each epoch
/// streams the data once; features are recomputed, never cached.
TrainedBasisModel fit_iterative_basis(const RandomFeatureMap& rfm, const SnapshotDataset& data,
                                      Index n, const IterativeOptions& options = {});

enum class RidgeForm { Auto, Primal, Dual };

/// Closed-form readout W = Y Rᵀ(R Rᵀ + I/γ)⁻¹ (primal) or Y(RᵀR + I/γ)⁻¹Rᵀ (dual).
/// Auto picks primal when N ≤ m.
Matrix ridge_readout(const Matrix& features, const Matrix& targets, double gamma,
                     RidgeForm form = RidgeForm::Auto);
Matrix ridge_readout(const RandomFeatureMap& rfm, const Matrix& x, const Matrix& targets,
                     double gamma, RidgeForm form = RidgeForm::Auto);

}  // namespace transferop
