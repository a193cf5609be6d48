#pragma once

// Data-parallel kernels. Each has a serial counterpart in
// transferop/reference_kernels.hpp that the tests compare against.
//
// Work is split into fixed-size blocks that do not depend on the thread
// count, and partial results are combined in block order, so results are
// identical for any number of threads.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "transferop/random_features.hpp"
#include "transferop/types.hpp"

namespace transferop::kernels {

inline constexpr Index kColumnBlock = 256;
inline constexpr Index kReductionSlots = 8;

Matrix feature_map(std::span<const RandomLayer> layers, Activation activation, const Matrix& x);

/// Column j: -kinetic·σ″(w_i·x_j + b_i)‖w_i‖² + V(x_j)σ(w_i·x_j + b_i).
Matrix hamiltonian_features(const RandomLayer& layer, Activation activation, const Matrix& x,
                            const ScalarField& potential, double kinetic);

/// Fills psi0 and psi1 (feature dim × (end - begin)) for sample columns [begin, end).
using BlockProducer = std::function<void(Index begin, Index end, Matrix& psi0, Matrix& psi1)>;

struct CovarianceSums {
  Matrix c00;  ///< Σ ψ0 ψ0ᵀ
  Matrix c01;  ///< Σ ψ0 ψ1ᵀ
  Matrix c11;  ///< Σ ψ1 ψ1ᵀ, empty unless requested
  double produce_seconds = 0.0;
  double accumulate_seconds = 0.0;
};

/// Streams the sample range in chunks and sums outer products without
/// materializing the full feature matrices.
CovarianceSums covariance_sums(Index count, Index dim, const BlockProducer& produce, Index chunk,
                               bool with_c11);

using GradientField = std::function<void(std::span<const double> x, std::span<double> grad)>;

/// Euler–Maruyama for dX = -∇V dt + noise dW, one trajectory per column of x0.
/// Trajectory p uses the RNG stream derive_seed(seed, p).
std::vector<Matrix> euler_maruyama(const GradientField& gradient, const Matrix& x0, Index steps,
                                   double h, double noise, std::uint64_t seed);

/// Velocity of a batch of particles: state is d×B, out is resized to d×B.
using VelocityField = std::function<void(double t, const Matrix& state, Matrix& out)>;
/// Applied to the state after every completed step (e.g. periodic wrapping).
using StateMap = std::function<void(Matrix& state)>;

/// Classical RK4 from t0 to t1 with about `h` per step; particles are independent.
Matrix rk4_advect(const VelocityField& field, const Matrix& x0, double t0, double t1, double h,
                  const StateMap& after_step);

/// Labels each column of `points` with its nearest center (squared Euclidean,
/// ties to the lower index) and returns the total squared distance.
double assign_nearest(const Matrix& points, const Matrix& centers, std::vector<int>& labels);

}  // namespace transferop::kernels
