#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transferop/operator_learning.hpp"

namespace transferop {

enum class HermiteKind { Probabilists, Physicists };

/// He_n or H_n at x by the three-term recurrence.
double hermite(HermiteKind kind, int degree, double x);

/// Exact spectra of the OU process and the quantum harmonic oscillator.
/// Indices are zero-based: index 0 is the constant OU eigenfunction and the
/// QHO ground state.
class AnalyticSpectrum {
 public:
  /// λ_i = exp(-α i τ), φ_i(x) = He_i(√(αβ) x)/√(i!).
  static AnalyticSpectrum ou(double alpha, double beta, double tau);
  /// E_i = ω(i + ½), φ_i(x) = (2^i i!)^{-1/2}(ω/π)^{1/4} exp(-ωx²/2) H_i(√ω x), ħ = m = 1.
  static AnalyticSpectrum qho(double omega);

  const std::string& system() const noexcept { return system_; }
  double value(Index i) const;
  Vector values(Index n) const;
  double function(Index i, double x) const;
  /// φ_i at the columns of a 1×k matrix.
  Vector function(Index i, const Matrix& x) const;

 private:
  enum class Kind { Ou, Qho };
  AnalyticSpectrum(Kind kind, std::string system, double a, double b, double c);

  Kind kind_;
  std::string system_;
  double p0_, p1_, p2_;
};

struct FunctionError {
  double correlation = 0.0;  ///< Pearson, signed
  double rmse = 0.0;         ///< after unit empirical norm and optimal scaling
};

/// Compares two sampled functions; either having zero variance is an error.
FunctionError compare_functions(const Vector& estimate, const Vector& reference);

FunctionError eigenfunction_error(const SpectralModel& model, const AnalyticSpectrum& reference,
                                  Index i, const Matrix& x);

struct ClusterAssignment {
  std::vector<int> labels;
  Matrix centers;  ///< n×k
  double inertia = 0.0;
  std::vector<double> inertia_history;  ///< per Lloyd iteration of the kept restart
  int restart = 0;
};

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
};

/// k-means++ seeding and Lloyd iterations, restart r seeded by derive_seed(seed, r).
/// Keeps the lowest inertia (ties to the lower restart); restarts that end
/// with an empty cluster are discarded.
ClusterAssignment kmeans(const Matrix& points, int k, std::uint64_t seed,
                         const KMeansOptions& options = {});

/// Rows of evaluate_functions as coordinates, optionally dropping function 0
/// and optionally scaling function i by |value_i|.
Matrix spectral_embedding(const SpectralModel& model, const Matrix& x, bool include_first,
                          bool weight_by_values = false);

ClusterAssignment spectral_cluster(const SpectralModel& model, const Matrix& x, int k,
                                   bool include_first, std::uint64_t seed,
                                   bool weight_by_values = false);

/// Fraction of points whose label agrees with the majority truth label of their cluster.
double purity(const std::vector<int>& labels, const std::vector<int>& truth);
double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Density proxy at each query: k / (distance to the k-th nearest data point)^d.
Vector knn_density(const Matrix& data, const Matrix& queries, int k);

/// True for entries between the (1-fraction)/2 and (1+fraction)/2 empirical quantiles.
std::vector<bool> central_quantile_mask(const Vector& values, double fraction);

/// Sector index floor(θ / (2π/n)) of each column with θ = atan2(y, x) in [0, 2π).
std::vector<int> angular_sectors(const Matrix& points, int sectors, double offset = 0.0);

}  // namespace transferop
