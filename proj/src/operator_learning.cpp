#include "transferop/operator_learning.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "transferop/error.hpp"
#include "transferop/kernels.hpp"
#include "transferop/rng.hpp"

namespace transferop {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_count(Index n, Index feature_dim) {
  require(n >= 1 && n <= feature_dim, ErrorKind::InvalidArgument,
          "function count n=" + std::to_string(n) + " must lie in [1, " +
              std::to_string(feature_dim) + "]");
}

}  // namespace

CovarianceSet estimate_covariances(const RandomFeatureMap& rfm, const SnapshotDataset& data,
                                   Target target, const HamiltonianSpec* hamiltonian,
                                   const CovarianceOptions& options) {
  data.validate();
  require(data.dim() == rfm.input_dim(), ErrorKind::InvalidShape,
          "data dimension " + std::to_string(data.dim()) + " does not match the feature map input " +
              std::to_string(rfm.input_dim()));
  const auto& layers = rfm.layers();
  const Activation act = rfm.activation();
  const Matrix& x = data.x;
  kernels::BlockProducer produce;
  double kinetic = 0.0;

  if (target == Target::Koopman) {
    require(data.paired(), ErrorKind::ModeMismatch, "Koopman covariances need paired data");
    const Matrix& y = *data.y;
    produce = [&](Index begin, Index end, Matrix& psi0, Matrix& psi1) {
      psi0 = kernels::feature_map(layers, act, x.middleCols(begin, end - begin));
      psi1 = kernels::feature_map(layers, act, y.middleCols(begin, end - begin));
    };
  } else {
    require(!data.paired(), ErrorKind::ModeMismatch,
            "Schrödinger covariances need unpaired samples");
    require(hamiltonian != nullptr && hamiltonian->potential, ErrorKind::InvalidArgument,
            "Schrödinger covariances need a potential");
    require(act.twice_differentiable(), ErrorKind::UnsupportedActivation,
            std::string(act.name()) + " has no second derivative");
    require(rfm.depth() == 1, ErrorKind::UnsupportedDepth,
            "the Hamiltonian is only available for single-layer maps");
    require(hamiltonian->mass > 0.0, ErrorKind::InvalidArgument, "mass must be positive");
    kinetic = hamiltonian->hbar * hamiltonian->hbar / (2.0 * hamiltonian->mass);
    produce = [&](Index begin, Index end, Matrix& psi0, Matrix& psi1) {
      const Matrix block = x.middleCols(begin, end - begin);
      psi0 = kernels::feature_map(layers, act, block);
      psi1 = kernels::hamiltonian_features(layers.front(), act, block, hamiltonian->potential,
                                           kinetic);
    };
  }

  const auto start = Clock::now();
  kernels::CovarianceSums sums = kernels::covariance_sums(data.size(), rfm.output_dim(), produce,
                                                          options.chunk, options.with_c11);
  const double wall = seconds_since(start);

  const double scale = 1.0 / static_cast<double>(data.size());
  CovarianceSet cov;
  cov.m = data.size();
  cov.feature_dim = rfm.output_dim();
  cov.c00 = linalg::SymMatrix(sums.c00 * scale);
  cov.c01 = sums.c01 * scale;
  cov.c10 = cov.c01.transpose();
  if (options.with_c11) cov.c11 = linalg::SymMatrix(sums.c11 * scale);
  // Thread times are summed over workers; report the wall time split in proportion.
  const double busy = sums.produce_seconds + sums.accumulate_seconds;
  const double share = busy > 0.0 ? sums.produce_seconds / busy : 0.0;
  cov.featurize_seconds = wall * share;
  cov.accumulate_seconds = wall - cov.featurize_seconds;
  return cov;
}

SpectralMode parse_mode(std::string_view name) {
  if (name == "koopman_eigen" || name == "eigen" || name == "koopman") return SpectralMode::KoopmanEigen;
  if (name == "singular") return SpectralMode::Singular;
  if (name == "schrodinger") return SpectralMode::Schrodinger;
  fail(ErrorKind::InvalidArgument, "unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(SpectralMode mode) noexcept {
  switch (mode) {
    case SpectralMode::KoopmanEigen: return "koopman_eigen";
    case SpectralMode::Singular: return "singular";
    case SpectralMode::Schrodinger: return "schrodinger";
  }
  return "koopman_eigen";
}

SpectralModel solve_eigen(const RandomFeatureMap& rfm, const CovarianceSet& cov, Index n,
                          SpectralMode mode, const FitOptions& options) {
  require(mode != SpectralMode::Singular, ErrorKind::ModeMismatch,
          "use solve_singular for the singular mode");
  check_count(n, cov.feature_dim);
  const linalg::Order order =
      mode == SpectralMode::Schrodinger ? linalg::Order::Ascending : linalg::Order::Descending;
  const linalg::GeneralizedEigenSolution sol =
      options.symmetrize
          ? linalg::solve_generalized_sym(linalg::SymMatrix(cov.c01), cov.c00, n, order, options.tol)
          : linalg::solve_generalized_general(cov.c01, cov.c00, n, order, options.tol);
  SpectralModel model{rfm, sol.vectors, sol.values, mode, std::nullopt,
                      options.tol, options.symmetrize, sol.rank, sol.truncated};
  return model;
}

SpectralModel solve_singular(const RandomFeatureMap& rfm, const CovarianceSet& cov, Index n,
                             const FitOptions& options) {
  check_count(n, cov.feature_dim);
  require(cov.c11.dim() == cov.feature_dim, ErrorKind::InvalidArgument,
          "the singular branch needs C11");
  const linalg::GeneralizedEigenSolution sol =
      linalg::solve_nonsym_product(cov.c00, cov.c01, cov.c11, cov.c10, n, options.tol);
  SpectralModel model{rfm, sol.vectors, sol.values, SpectralMode::Singular, sol.companion,
                      options.tol, false, sol.rank, sol.truncated};
  return model;
}

namespace {

template <typename Solve>
SpectralModel timed_fit(const RandomFeatureMap& rfm, const SnapshotDataset& data, Target target,
                        const HamiltonianSpec* hamiltonian, bool with_c11, const FitOptions& options,
                        FitTimings* timings, Solve solve) {
  const auto start = Clock::now();
  const CovarianceSet cov =
      estimate_covariances(rfm, data, target, hamiltonian, {options.chunk, with_c11});
  const auto solve_start = Clock::now();
  SpectralModel model = solve(cov);
  if (timings != nullptr) {
    timings->featurize = cov.featurize_seconds;
    timings->covariances = cov.accumulate_seconds;
    timings->solve = seconds_since(solve_start);
    timings->total = seconds_since(start);
  }
  return model;
}

}  // namespace

SpectralModel fit_eigen(const RandomFeatureMap& rfm, const SnapshotDataset& data, Index n,
                        const FitOptions& options, FitTimings* timings) {
  require(data.paired(), ErrorKind::ModeMismatch, "eigenfunction fits need paired data");
  check_count(n, rfm.output_dim());
  return timed_fit(rfm, data, Target::Koopman, nullptr, false, options, timings,
                   [&](const CovarianceSet& cov) {
                     return solve_eigen(rfm, cov, n, SpectralMode::KoopmanEigen, options);
                   });
}

SpectralModel fit_singular(const RandomFeatureMap& rfm, const SnapshotDataset& data, Index n,
                           const FitOptions& options, FitTimings* timings) {
  require(data.paired(), ErrorKind::ModeMismatch, "singular function fits need paired data");
  check_count(n, rfm.output_dim());
  return timed_fit(rfm, data, Target::Koopman, nullptr, true, options, timings,
                   [&](const CovarianceSet& cov) { return solve_singular(rfm, cov, n, options); });
}

SpectralModel fit_schrodinger(const RandomFeatureMap& rfm, const SnapshotDataset& data, Index n,
                              const HamiltonianSpec& hamiltonian, const FitOptions& options,
                              FitTimings* timings) {
  check_count(n, rfm.output_dim());
  return timed_fit(rfm, data, Target::Schrodinger, &hamiltonian, false, options, timings,
                   [&](const CovarianceSet& cov) {
                     return solve_eigen(rfm, cov, n, SpectralMode::Schrodinger, options);
                   });
}

Matrix evaluate_functions(const SpectralModel& model, const Matrix& x) {
  return model.w_o.transpose() * model.rfm.evaluate(x);
}

Matrix evaluate_companion(const SpectralModel& model, const Matrix& x) {
  require(model.mode == SpectralMode::Singular && model.companion.has_value(),
          ErrorKind::ModeMismatch, "left singular functions exist only in singular mode");
  return model.companion->transpose() * model.rfm.evaluate(x);
}

OutputActivation parse_output_activation(std::string_view name) {
  if (name == "tanh") return OutputActivation::Tanh;
  if (name == "identity" || name == "linear") return OutputActivation::Identity;
  fail(ErrorKind::InvalidArgument, "unknown output activation '" + std::string(name) + "'");
}

namespace {

// Per-slot partial sums of one streaming pass of the trainer. For output
// rows k, j the blocks hold
//   A_kj = Σ_s ψ1_j(s) σ′0_k(s) r0(s),  B_kj = Σ_s ψ0_j(s) σ′0_k(s) r0(s),
//   D_kj = Σ_s ψ0_j(s) σ′1_k(s) r1(s),
// stored as rows k·n + j of n²×N matrices.
struct PassSums {
  Matrix c00, c01, a, b, d;
};

void output_layer(const Matrix& w, const Matrix& r, OutputActivation output, Matrix& psi,
                  Matrix& deriv) {
  psi.noalias() = w * r;
  if (output == OutputActivation::Tanh) {
    Activation(ActivationKind::Tanh).apply_with_derivative(psi, deriv);
  } else {
    deriv.setOnes(psi.rows(), psi.cols());
  }
}

TraceLoss streaming_pass(const RandomFeatureMap& rfm, const SnapshotDataset& data, const Matrix& w,
                         const IterativeOptions& options) {
  const Index n = w.rows();
  const Index big_n = w.cols();
  const Index count = data.size();
  const Index chunk = options.chunk;
  const Index chunks = (count + chunk - 1) / chunk;
  const Index slots = std::min(kernels::kReductionSlots, chunks);
  const auto& layers = rfm.layers();
  const Activation act = rfm.activation();
  const Matrix& x = data.x;
  const Matrix& y = *data.y;
  std::vector<PassSums> partial(static_cast<std::size_t>(slots));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(slots));

#pragma omp parallel for schedule(dynamic, 1)
  for (Index s = 0; s < slots; ++s) {
    try {
      PassSums& acc = partial[static_cast<std::size_t>(s)];
      acc.c00 = Matrix::Zero(n, n);
      acc.c01 = Matrix::Zero(n, n);
      acc.a = Matrix::Zero(n * n, big_n);
      acc.b = Matrix::Zero(n * n, big_n);
      acc.d = Matrix::Zero(n * n, big_n);
      Matrix psi0, psi1, s0, s1, weighted;
      for (Index c = s * chunks / slots; c < (s + 1) * chunks / slots; ++c) {
        const Index begin = c * chunk;
        const Index width = std::min(chunk, count - begin);
        const Matrix r0 = kernels::feature_map(layers, act, x.middleCols(begin, width));
        const Matrix r1 = kernels::feature_map(layers, act, y.middleCols(begin, width));
        output_layer(w, r0, options.output, psi0, s0);
        output_layer(w, r1, options.output, psi1, s1);
        acc.c00.noalias() += psi0 * psi0.transpose();
        acc.c01.noalias() += psi0 * psi1.transpose();
        for (Index k = 0; k < n; ++k) {
          weighted = psi1.array().rowwise() * s0.row(k).array();
          acc.a.middleRows(k * n, n).noalias() += weighted * r0.transpose();
          weighted = psi0.array().rowwise() * s0.row(k).array();
          acc.b.middleRows(k * n, n).noalias() += weighted * r0.transpose();
          weighted = psi0.array().rowwise() * s1.row(k).array();
          acc.d.middleRows(k * n, n).noalias() += weighted * r1.transpose();
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(s)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  PassSums total = std::move(partial.front());
  for (std::size_t s = 1; s < partial.size(); ++s) {
    total.c00 += partial[s].c00;
    total.c01 += partial[s].c01;
    total.a += partial[s].a;
    total.b += partial[s].b;
    total.d += partial[s].d;
  }

  const double scale = 1.0 / static_cast<double>(count);
  TraceLoss out;
  out.cov.m = count;
  out.cov.feature_dim = n;
  out.cov.c00 = linalg::SymMatrix(total.c00 * scale);
  out.cov.c01 = total.c01 * scale;
  out.cov.c10 = out.cov.c01.transpose();
  if (!out.cov.c00.matrix().allFinite() || !out.cov.c01.allFinite()) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const Matrix p = linalg::regularized_pinv(out.cov.c00, options.tol).matrix.matrix();
  out.value = (p * out.cov.c01).trace();
  const Matrix m = p * out.cov.c01 * p;
  const Matrix q = m + m.transpose();
  out.gradient = Matrix::Zero(n, big_n);
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < n; ++j) {
      const Index row = k * n + j;
      out.gradient.row(k) += p(k, j) * (total.a.row(row) + total.d.row(row)) -
                             q(k, j) * total.b.row(row);
    }
  out.gradient *= scale;
  return out;
}

void check_trainer_inputs(const RandomFeatureMap& rfm, const SnapshotDataset& data, Index n,
                          const IterativeOptions& options) {
  data.validate();
  require(data.paired(), ErrorKind::ModeMismatch, "the iterative trainer needs paired data");
  require(data.dim() == rfm.input_dim(), ErrorKind::InvalidShape,
          "data dimension does not match the feature map input");
  check_count(n, rfm.output_dim());
  require(options.epochs >= 0, ErrorKind::InvalidArgument, "epochs must be nonnegative");
  require(options.step >= 0.0 && std::isfinite(options.step), ErrorKind::InvalidArgument,
          "step size must be finite and nonnegative");
  require(options.chunk >= 1, ErrorKind::InvalidArgument, "chunk size must be positive");
  require(options.output == OutputActivation::Identity ||
              rfm.activation().kind() == ActivationKind::Tanh,
          ErrorKind::UnsupportedActivation, "a tanh output layer needs a tanh feature map");
}

Matrix orthonormal_rows(Index n, Index big_n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix g(big_n, n);
  for (Index i = 0; i < big_n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(big_n, n);
  return q.transpose();
}

}  // namespace

TraceLoss trace_loss(const RandomFeatureMap& rfm, const SnapshotDataset& data, const Matrix& w,
                     const IterativeOptions& options) {
  check_trainer_inputs(rfm, data, w.rows(), options);
  require(w.cols() == rfm.output_dim(), ErrorKind::InvalidShape,
          "output weights must have one column per feature");
  return streaming_pass(rfm, data, w, options);
}

TrainedBasisModel fit_iterative_basis(const RandomFeatureMap& rfm, const SnapshotDataset& data,
                                      Index n, const IterativeOptions& options) {
  check_trainer_inputs(rfm, data, n, options);

  std::vector<double> history;
  Index accepted = 0, rejected = 0;
  Matrix w = orthonormal_rows(n, rfm.output_dim(), options.seed);
  TraceLoss best = streaming_pass(rfm, data, w, options);
  if (!std::isfinite(best.value)) throw DivergedTrainingError(0, "loss is not finite");
  history.push_back(best.value);

  // Each epoch evaluates one trial point, so the data is streamed once per epoch.
  double step = options.step;
  for (Index epoch = 1; epoch <= options.epochs; ++epoch) {
    if (step > 0.0) {
      const Matrix trial_w = w + step * best.gradient;
      TraceLoss trial = streaming_pass(rfm, data, trial_w, options);
      if (!std::isfinite(trial.value))
        throw DivergedTrainingError(static_cast<int>(epoch), "loss is not finite");
      const double required = best.value + options.armijo * step * best.gradient.squaredNorm();
      if (trial.value >= required) {
        w = trial_w;
        best = std::move(trial);
        step *= 2.0;
        ++accepted;
      } else {
        step *= 0.5;
        ++rejected;
      }
    }
    history.push_back(best.value);
  }
  const linalg::GeneralizedEigenSolution sol =
      options.symmetrize
          ? linalg::solve_generalized_sym(linalg::SymMatrix(best.cov.c01), best.cov.c00, n,
                                          linalg::Order::Descending, options.tol)
          : linalg::solve_generalized_general(best.cov.c01, best.cov.c00, n,
                                              linalg::Order::Descending, options.tol);
  // A tanh output layer becomes one more frozen layer of the feature map;
  // an identity output folds into the weights.
  const bool as_layer = options.output == OutputActivation::Tanh;
  RandomLayer layer;
  layer.weights = w;
  layer.bias = Vector::Zero(n);
  SpectralModel spectral{as_layer ? rfm.with_layer(std::move(layer)) : rfm,
                         as_layer ? sol.vectors : Matrix(w.transpose() * sol.vectors),
                         sol.values,
                         SpectralMode::KoopmanEigen,
                         std::nullopt,
                         options.tol,
                         options.symmetrize,
                         sol.rank,
                         sol.truncated};
  return TrainedBasisModel{std::move(w), std::move(history), accepted, rejected,
                           std::move(spectral)};
}

Matrix ridge_readout(const Matrix& features, const Matrix& targets, double gamma, RidgeForm form) {
  require(gamma > 0.0, ErrorKind::InvalidArgument, "gamma must be positive");
  require(features.cols() == targets.cols(), ErrorKind::InvalidShape,
          "features and targets must have the same number of samples");
  const Index big_n = features.rows();
  const Index m = features.cols();
  if (form == RidgeForm::Auto) form = big_n <= m ? RidgeForm::Primal : RidgeForm::Dual;
  const double shift = 1.0 / gamma;
  if (form == RidgeForm::Primal) {
    Matrix gram = features * features.transpose();
    gram.diagonal().array() += shift;
    // W = Y Rᵀ G⁻¹, i.e. Wᵀ = G⁻¹ R Yᵀ with G symmetric.
    return gram.ldlt().solve(features * targets.transpose()).transpose();
  }
  Matrix gram = features.transpose() * features;
  gram.diagonal().array() += shift;
  return gram.ldlt().solve(targets.transpose()).transpose() * features.transpose();
}

Matrix ridge_readout(const RandomFeatureMap& rfm, const Matrix& x, const Matrix& targets,
                     double gamma, RidgeForm form) {
  return ridge_readout(rfm.evaluate(x), targets, gamma, form);
}

}  // namespace transferop
