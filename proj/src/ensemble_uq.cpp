#include "transferop/ensemble_uq.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "transferop/error.hpp"
#include "transferop/rng.hpp"

namespace transferop {

namespace {

// Stream index reserved for bootstrap resampling so it never collides with
// the per-layer streams of the feature map.
constexpr std::uint64_t kBootstrapStream = 0xb007;

bool zero_variance(const Eigen::Ref<const Vector>& row) {
  const double mean = row.mean();
  const double spread = (row.array() - mean).abs().maxCoeff();
  return spread <= 1e-14 * std::max(std::abs(mean), std::numeric_limits<double>::min());
}

double pearson(const Vector& a, const Vector& b) {
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double denom = ca.norm() * cb.norm();
  return denom > 0.0 ? ca.dot(cb) / denom : 0.0;
}

}  // namespace

Alignment align_member(const Matrix& reference, const Matrix& member) {
  require(reference.rows() == member.rows() && reference.cols() == member.cols(),
          ErrorKind::InvalidShape, "member and reference evaluations differ in shape");
  const Index n = member.rows();
  std::vector<bool> member_flat(static_cast<std::size_t>(n)), ref_flat(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    member_flat[static_cast<std::size_t>(i)] = zero_variance(member.row(i).transpose());
    ref_flat[static_cast<std::size_t>(i)] = zero_variance(reference.row(i).transpose());
  }
  Matrix corr = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index s = 0; s < n; ++s)
      if (!member_flat[static_cast<std::size_t>(i)] && !ref_flat[static_cast<std::size_t>(s)])
        corr(i, s) = pearson(member.row(i).transpose(), reference.row(s).transpose());

  Alignment out;
  out.slot_of.assign(static_cast<std::size_t>(n), -1);
  out.signs.assign(static_cast<std::size_t>(n), 1);
  out.correlations.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> slot_used(static_cast<std::size_t>(n), false);

  // Candidate pairs sorted by |corr| descending; ties by member row, then slot.
  struct Pair {
    double score;
    Index row, slot;
  };
  std::vector<Pair> pairs;
  for (Index i = 0; i < n; ++i) {
    if (member_flat[static_cast<std::size_t>(i)]) continue;
    for (Index s = 0; s < n; ++s)
      if (!ref_flat[static_cast<std::size_t>(s)]) pairs.push_back({std::abs(corr(i, s)), i, s});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& l, const Pair& r) { return l.score > r.score; });
  for (const Pair& p : pairs) {
    auto& slot = out.slot_of[static_cast<std::size_t>(p.row)];
    if (slot >= 0 || slot_used[static_cast<std::size_t>(p.slot)]) continue;
    slot = p.slot;
    slot_used[static_cast<std::size_t>(p.slot)] = true;
    out.correlations[static_cast<std::size_t>(p.row)] = p.score;
    // The centered correlation is noise for nearly constant functions, so the
    // sign comes from the raw inner product; for centered functions they agree.
    const double dot = member.row(p.row).dot(reference.row(p.slot));
    out.signs[static_cast<std::size_t>(p.row)] = dot < 0.0 ? -1 : 1;
  }
  // Remaining rows (zero variance on either side) take free slots in order.
  Index next_free = 0;
  for (Index i = 0; i < n; ++i) {
    auto& slot = out.slot_of[static_cast<std::size_t>(i)];
    if (slot >= 0) continue;
    while (slot_used[static_cast<std::size_t>(next_free)]) ++next_free;
    slot = next_free;
    slot_used[static_cast<std::size_t>(next_free)] = true;
  }

  out.aligned.resize(n, member.cols());
  for (Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out.aligned.row(out.slot_of[ui]) = static_cast<double>(out.signs[ui]) * member.row(i);
    if (member_flat[ui] || n < 2) continue;
    double best = 0.0, second = 0.0;
    for (Index s = 0; s < n; ++s) {
      const double c = std::abs(corr(i, s));
      if (c > best) {
        second = best;
        best = c;
      } else if (c > second) {
        second = c;
      }
    }
    if (best - second < 0.05) out.ambiguous.push_back(i);
  }
  return out;
}

Vector align_values(const Vector& values, const Alignment& alignment) {
  require(static_cast<std::size_t>(values.size()) == alignment.slot_of.size(),
          ErrorKind::InvalidShape, "value count does not match the alignment");
  Vector out(values.size());
  for (Index i = 0; i < values.size(); ++i) out(alignment.slot_of[static_cast<std::size_t>(i)]) = values(i);
  return out;
}

namespace {

SpectralModel fit_member(const SnapshotDataset& data, const MemberSpec& spec, std::uint64_t seed) {
  const RandomFeatureMap rfm =
      RandomFeatureMap::sample(data.dim(), spec.widths, spec.activation, spec.distribution, seed);
  const SnapshotDataset* used = &data;
  SnapshotDataset resampled;
  if (spec.bootstrap) {
    Rng rng(derive_seed(seed, kBootstrapStream));
    resampled.x.resize(data.dim(), data.size());
    if (data.y) resampled.y = Matrix(data.dim(), data.size());
    for (Index j = 0; j < data.size(); ++j) {
      const auto src = static_cast<Index>(rng.below(static_cast<std::uint64_t>(data.size())));
      resampled.x.col(j) = data.x.col(src);
      if (data.y) resampled.y->col(j) = data.y->col(src);
    }
    resampled.lag_time = data.lag_time;
    resampled.source = data.source;
    used = &resampled;
  }
  switch (spec.mode) {
    case SpectralMode::KoopmanEigen: return fit_eigen(rfm, *used, spec.n, spec.fit);
    case SpectralMode::Singular: return fit_singular(rfm, *used, spec.n, spec.fit);
    case SpectralMode::Schrodinger:
      return fit_schrodinger(rfm, *used, spec.n, spec.hamiltonian, spec.fit);
  }
  fail(ErrorKind::InvalidArgument, "unknown mode");
}

}  // namespace

EnsembleSummary fit_ensemble(const SnapshotDataset& data, const MemberSpec& spec,
                             std::vector<std::uint64_t> seeds, const Matrix& eval_points) {
  require(seeds.size() >= 2, ErrorKind::InvalidArgument, "an ensemble needs at least 2 members");
  require(spec.n >= 1, ErrorKind::InvalidArgument, "function count must be positive");
  require(eval_points.rows() == data.dim() && eval_points.cols() >= 1, ErrorKind::InvalidShape,
          "evaluation points must match the data dimension");
  data.validate();
  std::sort(seeds.begin(), seeds.end());
  const auto count = static_cast<Index>(seeds.size());
  std::vector<Matrix> evals(seeds.size());
  std::vector<MemberReport> reports(seeds.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (Index s = 0; s < count; ++s) {
    MemberReport& report = reports[static_cast<std::size_t>(s)];
    report.seed = seeds[static_cast<std::size_t>(s)];
    try {
      const SpectralModel model = fit_member(data, spec, report.seed);
      require(model.size() == spec.n, ErrorKind::RankZero,
              "retained rank is below the requested function count");
      evals[static_cast<std::size_t>(s)] = evaluate_functions(model, eval_points);
      require(evals[static_cast<std::size_t>(s)].allFinite(), ErrorKind::InvalidMatrix,
              "member evaluations are not finite");
      report.values = model.values;
      report.ok = true;
    } catch (const std::exception& e) {
      report.error = e.what();
    }
  }

  std::vector<std::size_t> survivors;
  for (std::size_t s = 0; s < reports.size(); ++s)
    if (reports[s].ok) survivors.push_back(s);
  require(survivors.size() >= 2, ErrorKind::EnsembleFailed,
          "only " + std::to_string(survivors.size()) + " of " + std::to_string(seeds.size()) +
              " members succeeded");

  EnsembleSummary summary;
  summary.member_count = static_cast<Index>(survivors.size());
  summary.eval_points = eval_points;
  summary.reference_seed = reports[survivors.front()].seed;
  const Matrix& reference = evals[survivors.front()];
  const Index n = spec.n;
  const Index k = eval_points.cols();

  // Two-pass mean and variance in seed order.
  std::vector<Matrix> aligned(reports.size());
  std::vector<Vector> values(reports.size());
  summary.function_mean = Matrix::Zero(n, k);
  summary.value_mean = Vector::Zero(n);
  for (std::size_t s : survivors) {
    const Alignment a = align_member(reference, evals[s]);
    MemberReport& report = reports[s];
    report.values = align_values(report.values, a);
    report.slot_of = a.slot_of;
    report.signs = a.signs;
    report.ambiguous = a.ambiguous;
    summary.function_mean += a.aligned;
    summary.value_mean += report.values;
    aligned[s] = a.aligned;
  }
  const double inv_m = 1.0 / static_cast<double>(survivors.size());
  summary.function_mean *= inv_m;
  summary.value_mean *= inv_m;

  summary.function_var = Matrix::Zero(n, k);
  Vector value_var = Vector::Zero(n);
  for (std::size_t s : survivors) {
    summary.function_var.array() += (aligned[s] - summary.function_mean).array().square();
    value_var.array() += (reports[s].values - summary.value_mean).array().square();
  }
  const double inv_dof = 1.0 / static_cast<double>(survivors.size() - 1);
  summary.function_var *= inv_dof;
  summary.value_std = (value_var * inv_dof).cwiseSqrt();
  summary.members = std::move(reports);
  return summary;
}

EnsembleSummary fit_ensemble(const SnapshotDataset& data, const MemberSpec& spec, Index members,
                             std::uint64_t base_seed, const Matrix& eval_points) {
  require(members >= 2, ErrorKind::InvalidArgument, "an ensemble needs at least 2 members");
  std::vector<std::uint64_t> seeds;
  for (Index i = 0; i < members; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
  return fit_ensemble(data, spec, std::move(seeds), eval_points);
}

}  // namespace transferop
