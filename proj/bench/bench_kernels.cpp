// Parallel kernels against their serial references.
//
//   transferop_bench [--benchmark_filter=Covariance]
//
// Set OMP_NUM_THREADS (or TRANSFEROP_THREADS for the CLI) to pick the thread count.

#include <benchmark/benchmark.h>

#include <vector>

#include "transferop/datasets.hpp"
#include "transferop/kernels.hpp"
#include "transferop/reference_kernels.hpp"
#include "transferop/rng.hpp"

namespace {

using namespace transferop;

Matrix normal_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

RandomFeatureMap bench_map(Index d, Index width) {
  const std::vector<Index> widths{width, width};
  return RandomFeatureMap::sample(d, widths, Activation{}, Distribution{}, 1);
}

template <bool Parallel>
void BM_FeatureMap(benchmark::State& state) {
  const auto rfm = bench_map(2, state.range(0));
  const Matrix x = normal_matrix(2, 4096, 2);
  for (auto _ : state) {
    Matrix r = Parallel ? kernels::feature_map(rfm.layers(), rfm.activation(), x)
                        : reference::feature_map(rfm.layers(), rfm.activation(), x);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * x.cols());
}

template <bool Parallel>
void BM_HamiltonianFeatures(benchmark::State& state) {
  const std::vector<Index> widths{state.range(0)};
  const auto rfm = RandomFeatureMap::sample(1, widths, Activation{}, Distribution{}, 3);
  const Matrix x = normal_matrix(1, 4096, 4);
  const ScalarField v = [](std::span<const double> p) { return 0.5 * p[0] * p[0]; };
  for (auto _ : state) {
    Matrix r = Parallel ? kernels::hamiltonian_features(rfm.layers()[0], rfm.activation(), x, v, 0.5)
                        : reference::hamiltonian_features(rfm.layers()[0], rfm.activation(), x, v, 0.5);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * x.cols());
}

template <bool Parallel>
void BM_CovarianceSums(benchmark::State& state) {
  const Index dim = state.range(0), count = 8192;
  const Matrix psi0 = normal_matrix(dim, count, 5), psi1 = normal_matrix(dim, count, 6);
  const kernels::BlockProducer produce = [&](Index begin, Index end, Matrix& a, Matrix& b) {
    a = psi0.middleCols(begin, end - begin);
    b = psi1.middleCols(begin, end - begin);
  };
  for (auto _ : state) {
    auto sums = Parallel ? kernels::covariance_sums(count, dim, produce, 1024, true)
                         : reference::covariance_sums(psi0, psi1, true);
    benchmark::DoNotOptimize(sums.c00.data());
  }
  state.SetItemsProcessed(state.iterations() * count);
}

template <bool Parallel>
void BM_EulerMaruyama(benchmark::State& state) {
  const auto sys = builtin_potential("triple_well");
  const Matrix x0 = normal_matrix(2, state.range(0), 7) * 0.1;
  for (auto _ : state) {
    auto traj = Parallel ? kernels::euler_maruyama(sys.gradient, x0, 500, 0.005, sys.noise(), 8)
                         : reference::euler_maruyama(sys.gradient, x0, 500, 0.005, sys.noise(), 8);
    benchmark::DoNotOptimize(traj.data());
  }
  state.SetItemsProcessed(state.iterations() * x0.cols() * 500);
}

template <bool Parallel>
void BM_Rk4Bickley(benchmark::State& state) {
  const BickleyJet jet;
  const kernels::VelocityField field = [&](double t, const Matrix& s, Matrix& out) { jet.velocity(t, s, out); };
  Matrix x0 = normal_matrix(2, state.range(0), 9);
  x0.row(0) = (x0.row(0).array().abs() * 5.0).matrix();
  const kernels::StateMap none = [](Matrix&) {};
  for (auto _ : state) {
    Matrix r = Parallel ? kernels::rk4_advect(field, x0, 0.0, 2.0, 0.01, none)
                        : reference::rk4_advect(field, x0, 0.0, 2.0, 0.01, none);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * x0.cols());
}

template <bool Parallel>
void BM_AssignNearest(benchmark::State& state) {
  const Matrix points = normal_matrix(9, 20000, 10);
  const Matrix centers = normal_matrix(9, state.range(0), 11);
  std::vector<int> labels;
  for (auto _ : state) {
    const double inertia = Parallel ? kernels::assign_nearest(points, centers, labels)
                                    : reference::assign_nearest(points, centers, labels);
    benchmark::DoNotOptimize(inertia);
  }
  state.SetItemsProcessed(state.iterations() * points.cols());
}

}  // namespace

BENCHMARK(BM_FeatureMap<true>)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeatureMap<false>)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HamiltonianFeatures<true>)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HamiltonianFeatures<false>)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovarianceSums<true>)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovarianceSums<false>)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EulerMaruyama<true>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EulerMaruyama<false>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rk4Bickley<true>)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Rk4Bickley<false>)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignNearest<true>)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignNearest<false>)->Arg(9)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
