#include "transferop/reference_kernels.hpp"

#include <cmath>

#include "transferop/error.hpp"
#include "transferop/rng.hpp"

namespace transferop::reference {

Matrix feature_map(std::span<const RandomLayer> layers, Activation activation, const Matrix& x) {
  require(!layers.empty(), ErrorKind::InvalidShape, "feature map has no layers");
  require(x.rows() == layers.front().inputs(), ErrorKind::InvalidShape,
          "input dimension does not match the map");
  Matrix current = x;
  for (const RandomLayer& layer : layers) {
    Matrix next(layer.outputs(), current.cols());
    for (Index j = 0; j < current.cols(); ++j)
      for (Index i = 0; i < layer.outputs(); ++i) {
        double z = layer.bias(i);
        for (Index k = 0; k < layer.inputs(); ++k) z += layer.weights(i, k) * current(k, j);
        next(i, j) = activation.value(z);
      }
    current = std::move(next);
  }
  return current;
}

Matrix hamiltonian_features(const RandomLayer& layer, Activation activation, const Matrix& x,
                            const ScalarField& potential, double kinetic) {
  require(x.rows() == layer.inputs(), ErrorKind::InvalidShape,
          "input dimension does not match the layer");
  Matrix out(layer.outputs(), x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double v = potential(std::span<const double>(x.col(j).data(), x.rows()));
    for (Index i = 0; i < layer.outputs(); ++i) {
      double z = layer.bias(i);
      double norm2 = 0.0;
      for (Index k = 0; k < layer.inputs(); ++k) {
        z += layer.weights(i, k) * x(k, j);
        norm2 += layer.weights(i, k) * layer.weights(i, k);
      }
      out(i, j) = -kinetic * activation.second(z) * norm2 + v * activation.value(z);
    }
  }
  return out;
}

kernels::CovarianceSums covariance_sums(const Matrix& psi0, const Matrix& psi1, bool with_c11) {
  require(psi0.cols() == psi1.cols() && psi0.rows() == psi1.rows(), ErrorKind::InvalidShape,
          "feature blocks differ in shape");
  const Index n = psi0.rows();
  kernels::CovarianceSums sums;
  sums.c00 = Matrix::Zero(n, n);
  sums.c01 = Matrix::Zero(n, n);
  if (with_c11) sums.c11 = Matrix::Zero(n, n);
  for (Index s = 0; s < psi0.cols(); ++s)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        sums.c00(i, j) += psi0(i, s) * psi0(j, s);
        sums.c01(i, j) += psi0(i, s) * psi1(j, s);
        if (with_c11) sums.c11(i, j) += psi1(i, s) * psi1(j, s);
      }
  return sums;
}

std::vector<Matrix> euler_maruyama(const kernels::GradientField& gradient, const Matrix& x0,
                                   Index steps, double h, double noise, std::uint64_t seed) {
  require(h > 0.0, ErrorKind::InvalidArgument, "step size must be positive");
  const Index d = x0.rows();
  std::vector<Matrix> out;
  for (Index p = 0; p < x0.cols(); ++p) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    Matrix traj(d, steps + 1);
    traj.col(0) = x0.col(p);
    Vector state = x0.col(p);
    Vector grad(d);
    for (Index k = 0; k < steps; ++k) {
      gradient(std::span<const double>(state.data(), d), std::span<double>(grad.data(), d));
      for (Index i = 0; i < d; ++i) state(i) = state(i) - h * grad(i) + noise * std::sqrt(h) * rng.normal();
      if (!state.allFinite()) throw TrajectoryDivergedError(static_cast<long>(k + 1), "trajectory diverged");
      traj.col(k + 1) = state;
    }
    out.push_back(std::move(traj));
  }
  return out;
}

Matrix rk4_advect(const kernels::VelocityField& field, const Matrix& x0, double t0, double t1,
                  double h, const kernels::StateMap& after_step) {
  require(t1 >= t0 && h > 0.0, ErrorKind::InvalidArgument, "invalid integration interval");
  const Index steps =
      t1 == t0 ? 0 : std::max<Index>(1, static_cast<Index>(std::llround((t1 - t0) / h)));
  const double dt = steps > 0 ? (t1 - t0) / static_cast<double>(steps) : 0.0;
  Matrix out(x0.rows(), x0.cols());
  for (Index p = 0; p < x0.cols(); ++p) {
    Matrix s = x0.col(p);
    Matrix k1, k2, k3, k4;
    for (Index n = 0; n < steps; ++n) {
      const double t = t0 + static_cast<double>(n) * dt;
      field(t, s, k1);
      field(t + 0.5 * dt, Matrix(s + 0.5 * dt * k1), k2);
      field(t + 0.5 * dt, Matrix(s + 0.5 * dt * k2), k3);
      field(t + dt, Matrix(s + dt * k3), k4);
      s += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (after_step) after_step(s);
      if (!s.allFinite()) throw TrajectoryDivergedError(static_cast<long>(n + 1), "flow diverged");
    }
    out.col(p) = s;
  }
  return out;
}

double assign_nearest(const Matrix& points, const Matrix& centers, std::vector<int>& labels) {
  require(points.rows() == centers.rows(), ErrorKind::InvalidShape,
          "points and centers differ in dimension");
  labels.assign(static_cast<std::size_t>(points.cols()), 0);
  double inertia = 0.0;
  for (Index j = 0; j < points.cols(); ++j) {
    double best = 0.0;
    for (Index c = 0; c < centers.cols(); ++c) {
      double dist = 0.0;
      for (Index r = 0; r < points.rows(); ++r) {
        const double diff = points(r, j) - centers(r, c);
        dist += diff * diff;
      }
      if (c == 0 || dist < best) {
        best = dist;
        labels[static_cast<std::size_t>(j)] = static_cast<int>(c);
      }
    }
    inertia += best;
  }
  return inertia;
}

}  // namespace transferop::reference
