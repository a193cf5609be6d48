#pragma once

// Straightforward serial versions of the kernels in transferop/kernels.hpp.
// They are kept for testing and benchmarking, not for production paths.

#include "transferop/kernels.hpp"

namespace transferop::reference {

Matrix feature_map(std::span<const RandomLayer> layers, Activation activation, const Matrix& x);

Matrix hamiltonian_features(const RandomLayer& layer, Activation activation, const Matrix& x,
                            const ScalarField& potential, double kinetic);

/// Sums of per-sample outer products, one sample at a time.
kernels::CovarianceSums covariance_sums(const Matrix& psi0, const Matrix& psi1, bool with_c11);

std::vector<Matrix> euler_maruyama(const kernels::GradientField& gradient, const Matrix& x0,
                                   Index steps, double h, double noise, std::uint64_t seed);

Matrix rk4_advect(const kernels::VelocityField& field, const Matrix& x0, double t0, double t1,
                  double h, const kernels::StateMap& after_step);

double assign_nearest(const Matrix& points, const Matrix& centers, std::vector<int>& labels);

}  // namespace transferop::reference
