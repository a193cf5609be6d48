#include "transferop/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>

#include "transferop/error.hpp"
#include "transferop/rng.hpp"

namespace transferop::kernels {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Index block_count(Index n, Index block) { return (n + block - 1) / block; }

// Exceptions must not escape an OpenMP region; the first one by block index
// is rethrown after the loop.
class ErrorSlots {
 public:
  explicit ErrorSlots(Index n) : errors_(static_cast<std::size_t>(n)) {}
  void capture(Index i) { errors_[static_cast<std::size_t>(i)] = std::current_exception(); }
  void rethrow_first() const {
    for (const auto& e : errors_)
      if (e) std::rethrow_exception(e);
  }

 private:
  std::vector<std::exception_ptr> errors_;
};

}  // namespace

Matrix feature_map(std::span<const RandomLayer> layers, Activation activation, const Matrix& x) {
  require(!layers.empty(), ErrorKind::InvalidShape, "feature map has no layers");
  require(x.rows() == layers.front().inputs(), ErrorKind::InvalidShape,
          "input has " + std::to_string(x.rows()) + " rows, map expects " +
              std::to_string(layers.front().inputs()));
  const Index m = x.cols();
  Matrix out(layers.back().outputs(), m);
  const Index blocks = block_count(m, kColumnBlock);

#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    const Index begin = b * kColumnBlock;
    const Index width = std::min(kColumnBlock, m - begin);
    Matrix current = x.middleCols(begin, width);
    Matrix next;
    for (const RandomLayer& layer : layers) {
      next.noalias() = layer.weights * current;
      next.colwise() += layer.bias;
      activation.apply(next);
      current.swap(next);
    }
    out.middleCols(begin, width) = current;
  }
  return out;
}

Matrix hamiltonian_features(const RandomLayer& layer, Activation activation, const Matrix& x,
                            const ScalarField& potential, double kinetic) {
  require(x.rows() == layer.inputs(), ErrorKind::InvalidShape,
          "input dimension does not match the layer");
  const Index m = x.cols();
  const Index n = layer.outputs();
  const Vector row_norms = layer.weights.rowwise().squaredNorm();
  Matrix out(n, m);
  const Index blocks = block_count(m, kColumnBlock);
  ErrorSlots errors(blocks);

#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    try {
      const Index begin = b * kColumnBlock;
      const Index width = std::min(kColumnBlock, m - begin);
      Matrix z = layer.weights * x.middleCols(begin, width);
      z.colwise() += layer.bias;
      for (Index j = 0; j < width; ++j) {
        const Index col = begin + j;
        const double v = potential(std::span<const double>(x.col(col).data(), x.rows()));
        for (Index i = 0; i < n; ++i) {
          const double zi = z(i, j);
          out(i, col) = -kinetic * activation.second(zi) * row_norms(i) + v * activation.value(zi);
        }
      }
    } catch (...) {
      errors.capture(b);
    }
  }
  errors.rethrow_first();
  return out;
}

CovarianceSums covariance_sums(Index count, Index dim, const BlockProducer& produce, Index chunk,
                               bool with_c11) {
  require(count >= 1, ErrorKind::InsufficientData, "no samples to accumulate");
  require(chunk >= 1, ErrorKind::InvalidArgument, "chunk size must be positive");
  const Index chunks = block_count(count, chunk);
  const Index slots = std::min(kReductionSlots, chunks);
  std::vector<CovarianceSums> partial(static_cast<std::size_t>(slots));
  ErrorSlots errors(slots);

#pragma omp parallel for schedule(dynamic, 1)
  for (Index s = 0; s < slots; ++s) {
    try {
      CovarianceSums& acc = partial[static_cast<std::size_t>(s)];
      acc.c00 = Matrix::Zero(dim, dim);
      acc.c01 = Matrix::Zero(dim, dim);
      if (with_c11) acc.c11 = Matrix::Zero(dim, dim);
      Matrix psi0, psi1;
      for (Index c = s * chunks / slots; c < (s + 1) * chunks / slots; ++c) {
        const Index begin = c * chunk;
        const Index end = std::min(count, begin + chunk);
        const auto t0 = Clock::now();
        produce(begin, end, psi0, psi1);
        acc.produce_seconds += seconds_since(t0);
        const auto t1 = Clock::now();
        acc.c00.selfadjointView<Eigen::Lower>().rankUpdate(psi0);
        acc.c01.noalias() += psi0 * psi1.transpose();
        if (with_c11) acc.c11.selfadjointView<Eigen::Lower>().rankUpdate(psi1);
        acc.accumulate_seconds += seconds_since(t1);
      }
    } catch (...) {
      errors.capture(s);
    }
  }
  errors.rethrow_first();

  CovarianceSums total = std::move(partial.front());
  for (std::size_t s = 1; s < partial.size(); ++s) {
    total.c00 += partial[s].c00;
    total.c01 += partial[s].c01;
    if (with_c11) total.c11 += partial[s].c11;
    total.produce_seconds += partial[s].produce_seconds;
    total.accumulate_seconds += partial[s].accumulate_seconds;
  }
  total.c00 = total.c00.selfadjointView<Eigen::Lower>();
  if (with_c11) total.c11 = total.c11.selfadjointView<Eigen::Lower>();
  return total;
}

std::vector<Matrix> euler_maruyama(const GradientField& gradient, const Matrix& x0, Index steps,
                                   double h, double noise, std::uint64_t seed) {
  require(h > 0.0, ErrorKind::InvalidArgument, "step size must be positive");
  require(steps >= 0, ErrorKind::InvalidArgument, "step count must be nonnegative");
  require(x0.allFinite(), ErrorKind::InvalidArgument, "initial state is not finite");
  const Index d = x0.rows();
  const Index count = x0.cols();
  const double kick = noise * std::sqrt(h);
  std::vector<Matrix> out(static_cast<std::size_t>(count));
  ErrorSlots errors(count);

#pragma omp parallel for schedule(dynamic, 1)
  for (Index p = 0; p < count; ++p) {
    try {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
      Matrix traj(d, steps + 1);
      traj.col(0) = x0.col(p);
      Vector grad(d);
      for (Index k = 0; k < steps; ++k) {
        const double* cur = traj.col(k).data();
        gradient(std::span<const double>(cur, d), std::span<double>(grad.data(), d));
        double* nxt = traj.col(k + 1).data();
        bool finite = true;
        for (Index i = 0; i < d; ++i) {
          nxt[i] = cur[i] - h * grad(i) + kick * rng.normal();
          finite = finite && std::isfinite(nxt[i]);
        }
        if (!finite) throw TrajectoryDivergedError(static_cast<long>(k + 1), "trajectory diverged");
      }
      out[static_cast<std::size_t>(p)] = std::move(traj);
    } catch (...) {
      errors.capture(p);
    }
  }
  errors.rethrow_first();
  return out;
}

Matrix rk4_advect(const VelocityField& field, const Matrix& x0, double t0, double t1, double h,
                  const StateMap& after_step) {
  require(t1 >= t0, ErrorKind::InvalidArgument, "integration end precedes start");
  require(h > 0.0, ErrorKind::InvalidArgument, "step size must be positive");
  const Index steps =
      t1 == t0 ? 0 : std::max<Index>(1, static_cast<Index>(std::llround((t1 - t0) / h)));
  const double dt = steps > 0 ? (t1 - t0) / static_cast<double>(steps) : 0.0;
  const Index m = x0.cols();
  Matrix out = x0;
  const Index blocks = block_count(m, kColumnBlock);
  ErrorSlots errors(blocks);

#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    try {
      const Index begin = b * kColumnBlock;
      const Index width = std::min(kColumnBlock, m - begin);
      Matrix s = x0.middleCols(begin, width);
      Matrix k1, k2, k3, k4, probe;
      for (Index n = 0; n < steps; ++n) {
        const double t = t0 + static_cast<double>(n) * dt;
        field(t, s, k1);
        probe = s + 0.5 * dt * k1;
        field(t + 0.5 * dt, probe, k2);
        probe = s + 0.5 * dt * k2;
        field(t + 0.5 * dt, probe, k3);
        probe = s + dt * k3;
        field(t + dt, probe, k4);
        s += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (after_step) after_step(s);
        if (!s.allFinite()) throw TrajectoryDivergedError(static_cast<long>(n + 1), "flow diverged");
      }
      out.middleCols(begin, width) = s;
    } catch (...) {
      errors.capture(b);
    }
  }
  errors.rethrow_first();
  return out;
}

double assign_nearest(const Matrix& points, const Matrix& centers, std::vector<int>& labels) {
  require(points.rows() == centers.rows(), ErrorKind::InvalidShape,
          "points and centers differ in dimension");
  const Index m = points.cols();
  const Index k = centers.cols();
  labels.assign(static_cast<std::size_t>(m), 0);
  const Index blocks = block_count(m, kColumnBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);

#pragma omp parallel for schedule(static)
  for (Index b = 0; b < blocks; ++b) {
    const Index begin = b * kColumnBlock;
    const Index end = std::min(m, begin + kColumnBlock);
    double sum = 0.0;
    for (Index j = begin; j < end; ++j) {
      int best = 0;
      double best_d = (points.col(j) - centers.col(0)).squaredNorm();
      for (Index c = 1; c < k; ++c) {
        const double dist = (points.col(j) - centers.col(c)).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = static_cast<int>(c);
        }
      }
      labels[static_cast<std::size_t>(j)] = best;
      sum += best_d;
    }
    partial[static_cast<std::size_t>(b)] = sum;
  }
  double inertia = 0.0;
  for (double p : partial) inertia += p;
  return inertia;
}

}  // namespace transferop::kernels
