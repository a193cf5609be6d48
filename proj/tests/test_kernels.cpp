#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>

#include "test_util.hpp"
#include "transferop/error.hpp"
#include "transferop/kernels.hpp"
#include "transferop/reference_kernels.hpp"

using namespace transferop;
using transferop::testing::max_abs;
using transferop::testing::random_matrix;

namespace {

// Runs f with the given OpenMP thread count and restores the previous one.
template <class F>
auto with_threads(int threads, F f) {
  const int before = omp_get_max_threads();
  omp_set_num_threads(threads);
  auto result = f();
  omp_set_num_threads(before);
  return result;
}

std::vector<RandomLayer> sample_stack(Index d, std::vector<Index> widths, std::uint64_t seed) {
  return RandomFeatureMap::sample(d, widths, Activation{}, {}, seed).layers();
}

double quadratic(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void rotation(double, const Matrix& state, Matrix& out) {
  out.resize(state.rows(), state.cols());
  out.row(0) = -state.row(1);
  out.row(1) = state.row(0);
}

}  // namespace

TEST(Kernels, FeatureMapMatchesReference) {
  const auto layers = sample_stack(3, {40, 17}, 1);
  const Matrix x = random_matrix(3, 1000, 2);
  for (auto kind : {ActivationKind::Tanh, ActivationKind::Gaussian, ActivationKind::Relu}) {
    const Activation act(kind);
    const Matrix fast = kernels::feature_map(layers, act, x);
    const Matrix slow = reference::feature_map(layers, act, x);
    EXPECT_LE(max_abs(fast - slow), 1e-14) << act.name();
  }
}

TEST(Kernels, FeatureMapIsThreadCountInvariant) {
  const auto layers = sample_stack(2, {64}, 3);
  const Matrix x = random_matrix(2, 1500, 4);
  const Matrix one = with_threads(1, [&] { return kernels::feature_map(layers, Activation{}, x); });
  const Matrix four = with_threads(4, [&] { return kernels::feature_map(layers, Activation{}, x); });
  EXPECT_TRUE(one == four);
}

TEST(Kernels, HamiltonianFeaturesMatchReference) {
  const auto layers = sample_stack(2, {33}, 5);
  const Matrix x = random_matrix(2, 700, 6);
  for (auto kind : {ActivationKind::Tanh, ActivationKind::Gaussian}) {
    const Activation act(kind);
    const Matrix fast = kernels::hamiltonian_features(layers[0], act, x, quadratic, 0.5);
    const Matrix slow = reference::hamiltonian_features(layers[0], act, x, quadratic, 0.5);
    EXPECT_LE(max_abs(fast - slow), 1e-12 * std::max(1.0, max_abs(slow))) << act.name();
  }
}

TEST(Kernels, CovarianceSumsMatchReferenceForAnyChunk) {
  const Matrix psi0 = random_matrix(9, 2000, 7);
  const Matrix psi1 = random_matrix(9, 2000, 8);
  const auto slow = reference::covariance_sums(psi0, psi1, true);
  const kernels::BlockProducer produce = [&](Index begin, Index end, Matrix& a, Matrix& b) {
    a = psi0.middleCols(begin, end - begin);
    b = psi1.middleCols(begin, end - begin);
  };
  for (Index chunk : {1, 7, 256, 5000}) {
    const auto fast = kernels::covariance_sums(2000, 9, produce, chunk, true);
    const double scale = max_abs(slow.c00);
    EXPECT_LE(max_abs(fast.c00 - slow.c00), 1e-11 * scale) << chunk;
    EXPECT_LE(max_abs(fast.c01 - slow.c01), 1e-11 * scale) << chunk;
    EXPECT_LE(max_abs(fast.c11 - slow.c11), 1e-11 * scale) << chunk;
    EXPECT_TRUE(fast.c00 == fast.c00.transpose());
  }
  const auto no11 = kernels::covariance_sums(2000, 9, produce, 300, false);
  EXPECT_EQ(no11.c11.size(), 0);
}

TEST(Kernels, CovarianceSumsAreThreadCountInvariant) {
  const Matrix psi = random_matrix(6, 3000, 9);
  const kernels::BlockProducer produce = [&](Index begin, Index end, Matrix& a, Matrix& b) {
    a = psi.middleCols(begin, end - begin);
    b = a;
  };
  const auto one = with_threads(1, [&] { return kernels::covariance_sums(3000, 6, produce, 100, true); });
  const auto four = with_threads(4, [&] { return kernels::covariance_sums(3000, 6, produce, 100, true); });
  EXPECT_TRUE(one.c00 == four.c00);
  EXPECT_TRUE(one.c01 == four.c01);
}

TEST(Kernels, EulerMaruyamaMatchesReference) {
  const kernels::GradientField grad = [](std::span<const double> x, std::span<double> g) {
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] * x[i] * x[i] - x[i];
  };
  const Matrix x0 = random_matrix(2, 37, 10);
  const auto fast = kernels::euler_maruyama(grad, x0, 200, 0.01, 0.8, 11);
  const auto slow = reference::euler_maruyama(grad, x0, 200, 0.01, 0.8, 11);
  ASSERT_EQ(fast.size(), slow.size());
  for (std::size_t p = 0; p < fast.size(); ++p) EXPECT_TRUE(fast[p] == slow[p]);
  const auto again = with_threads(3, [&] { return kernels::euler_maruyama(grad, x0, 200, 0.01, 0.8, 11); });
  for (std::size_t p = 0; p < fast.size(); ++p) EXPECT_TRUE(fast[p] == again[p]);
}

TEST(Kernels, EulerMaruyamaReportsDivergenceStep) {
  const kernels::GradientField explode = [](std::span<const double> x, std::span<double> g) {
    g[0] = -x[0] * x[0] * 1e3;
  };
  try {
    kernels::euler_maruyama(explode, Matrix::Constant(1, 1, 1.0), 1000, 0.1, 0.0, 0);
    ADD_FAILURE();
  } catch (const TrajectoryDivergedError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TrajectoryDiverged);
    EXPECT_GT(e.step(), 0);
    EXPECT_LT(e.step(), 10);
  }
}

TEST(Kernels, Rk4MatchesReferenceAndExactRotation) {
  const Matrix x0 = random_matrix(2, 300, 12);
  const kernels::StateMap none = [](Matrix&) {};
  const Matrix fast = kernels::rk4_advect(rotation, x0, 0.0, 1.0, 0.01, none);
  const Matrix slow = reference::rk4_advect(rotation, x0, 0.0, 1.0, 0.01, none);
  EXPECT_LE(max_abs(fast - slow), 1e-14);
  Matrix exact(2, 300);
  exact.row(0) = std::cos(1.0) * x0.row(0) - std::sin(1.0) * x0.row(1);
  exact.row(1) = std::sin(1.0) * x0.row(0) + std::cos(1.0) * x0.row(1);
  EXPECT_LE(max_abs(fast - exact), 1e-9);
  EXPECT_TRUE(kernels::rk4_advect(rotation, x0, 2.0, 2.0, 0.01, none) == x0);
}

TEST(Kernels, AssignNearestMatchesReference) {
  const Matrix points = random_matrix(3, 2500, 13);
  const Matrix centers = random_matrix(3, 6, 14);
  std::vector<int> fast, slow;
  const double fi = kernels::assign_nearest(points, centers, fast);
  const double si = reference::assign_nearest(points, centers, slow);
  EXPECT_EQ(fast, slow);
  EXPECT_NEAR(fi, si, 1e-10 * si);

  // Equidistant point goes to the lower index.
  Matrix tie(1, 1);
  tie << 0.0;
  Matrix two(1, 2);
  two << -1.0, 1.0;
  std::vector<int> labels;
  kernels::assign_nearest(tie, two, labels);
  EXPECT_EQ(labels[0], 0);
}
