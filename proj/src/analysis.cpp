#include "transferop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>

#include "transferop/error.hpp"
#include "transferop/kernels.hpp"
#include "transferop/rng.hpp"

namespace transferop {

double hermite(HermiteKind kind, int degree, double x) {
  require(degree >= 0, ErrorKind::InvalidArgument, "Hermite degree must be nonnegative");
  const double scale = kind == HermiteKind::Physicists ? 2.0 : 1.0;
  double prev = 1.0;
  if (degree == 0) return prev;
  double cur = scale * x;
  for (int n = 1; n < degree; ++n) {
    const double next = scale * (x * cur - n * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

AnalyticSpectrum::AnalyticSpectrum(Kind kind, std::string system, double a, double b, double c)
    : kind_(kind), system_(std::move(system)), p0_(a), p1_(b), p2_(c) {}

AnalyticSpectrum AnalyticSpectrum::ou(double alpha, double beta, double tau) {
  require(alpha > 0.0 && beta > 0.0 && tau >= 0.0, ErrorKind::InvalidArgument,
          "OU reference needs alpha, beta > 0 and tau >= 0");
  return AnalyticSpectrum(Kind::Ou, "ou", alpha, beta, tau);
}

AnalyticSpectrum AnalyticSpectrum::qho(double omega) {
  require(omega > 0.0, ErrorKind::InvalidArgument, "QHO reference needs omega > 0");
  return AnalyticSpectrum(Kind::Qho, "qho", omega, 0.0, 0.0);
}

double AnalyticSpectrum::value(Index i) const {
  require(i >= 0, ErrorKind::InvalidArgument, "index must be nonnegative");
  const auto di = static_cast<double>(i);
  return kind_ == Kind::Ou ? std::exp(-p0_ * di * p2_) : p0_ * (di + 0.5);
}

Vector AnalyticSpectrum::values(Index n) const {
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = value(i);
  return out;
}

double AnalyticSpectrum::function(Index i, double x) const {
  require(i >= 0 && i <= 170, ErrorKind::InvalidArgument, "index must lie in [0, 170]");
  const int deg = static_cast<int>(i);
  const double log_fact = std::lgamma(static_cast<double>(deg) + 1.0);
  if (kind_ == Kind::Ou) {
    return hermite(HermiteKind::Probabilists, deg, std::sqrt(p0_ * p1_) * x) *
           std::exp(-0.5 * log_fact);
  }
  const double omega = p0_;
  const double norm = std::exp(-0.5 * (deg * std::numbers::ln2 + log_fact)) *
                      std::pow(omega / std::numbers::pi, 0.25);
  return norm * std::exp(-0.5 * omega * x * x) *
         hermite(HermiteKind::Physicists, deg, std::sqrt(omega) * x);
}

Vector AnalyticSpectrum::function(Index i, const Matrix& x) const {
  require(x.rows() == 1, ErrorKind::InvalidShape, "analytic references are one-dimensional");
  Vector out(x.cols());
  for (Index j = 0; j < x.cols(); ++j) out(j) = function(i, x(0, j));
  return out;
}

FunctionError compare_functions(const Vector& estimate, const Vector& reference) {
  require(estimate.size() == reference.size() && estimate.size() >= 2, ErrorKind::InvalidShape,
          "functions must be sampled at the same (at least 2) points");
  const Vector ca = estimate.array() - estimate.mean();
  const Vector cb = reference.array() - reference.mean();
  require(ca.norm() > 0.0 && cb.norm() > 0.0, ErrorKind::DegenerateFunction,
          "function has zero variance on the evaluation points");
  FunctionError out;
  out.correlation = ca.dot(cb) / (ca.norm() * cb.norm());
  const double k = static_cast<double>(estimate.size());
  const Vector a = estimate / (estimate.norm() / std::sqrt(k));
  const Vector b = reference / (reference.norm() / std::sqrt(k));
  const double scale = a.dot(b) / a.squaredNorm();
  out.rmse = std::sqrt((scale * a - b).squaredNorm() / k);
  return out;
}

FunctionError eigenfunction_error(const SpectralModel& model, const AnalyticSpectrum& reference,
                                  Index i, const Matrix& x) {
  require(i >= 0 && i < model.size(), ErrorKind::InvalidArgument,
          "function index " + std::to_string(i) + " is outside the model");
  const Matrix phi = evaluate_functions(model, x);
  return compare_functions(phi.row(i).transpose(), reference.function(i, x));
}

namespace {

struct RestartResult {
  bool ok = false;
  ClusterAssignment assignment;
};

RestartResult kmeans_restart(const Matrix& points, int k, std::uint64_t seed, int max_iterations) {
  const Index m = points.cols();
  RestartResult result;
  Rng rng(seed);

  // k-means++ seeding.
  Matrix centers(points.rows(), k);
  centers.col(0) = points.col(static_cast<Index>(rng.below(static_cast<std::uint64_t>(m))));
  Vector nearest = (points.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    if (!(total > 0.0)) return result;
    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    Index pick = m - 1;
    for (Index j = 0; j < m; ++j) {
      cumulative += nearest(j);
      if (cumulative > target) {
        pick = j;
        break;
      }
    }
    centers.col(c) = points.col(pick);
    nearest = nearest.cwiseMin((points.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
  }

  ClusterAssignment& a = result.assignment;
  a.inertia = kernels::assign_nearest(points, centers, a.labels);
  a.inertia_history.push_back(a.inertia);
  for (int iter = 0; iter < max_iterations; ++iter) {
    Matrix sums = Matrix::Zero(points.rows(), k);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index j = 0; j < m; ++j) {
      sums.col(a.labels[static_cast<std::size_t>(j)]) += points.col(j);
      ++counts[static_cast<std::size_t>(a.labels[static_cast<std::size_t>(j)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) return result;
      centers.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    std::vector<int> labels;
    const double inertia = kernels::assign_nearest(points, centers, labels);
    const bool changed = labels != a.labels;
    a.labels = std::move(labels);
    a.inertia = inertia;
    a.inertia_history.push_back(inertia);
    if (!changed) break;
  }
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (int l : a.labels) ++counts[static_cast<std::size_t>(l)];
  if (std::find(counts.begin(), counts.end(), 0) != counts.end()) return result;
  a.centers = centers;
  result.ok = true;
  return result;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& points, int k, std::uint64_t seed,
                         const KMeansOptions& options) {
  require(k >= 2, ErrorKind::InvalidArgument, "cluster count k must be at least 2");
  require(points.cols() >= k, ErrorKind::InvalidArgument,
          "need at least k points to form k clusters");
  require(points.rows() >= 1 && points.allFinite(), ErrorKind::InvalidArgument,
          "cluster coordinates must be finite");
  require(options.restarts >= 1 && options.max_iterations >= 1, ErrorKind::InvalidArgument,
          "restarts and iterations must be positive");
  std::vector<RestartResult> results(static_cast<std::size_t>(options.restarts));

#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < options.restarts; ++r)
    results[static_cast<std::size_t>(r)] =
        kmeans_restart(points, k, derive_seed(seed, static_cast<std::uint64_t>(r)),
                       options.max_iterations);

  int best = -1;
  for (int r = 0; r < options.restarts; ++r) {
    const auto& res = results[static_cast<std::size_t>(r)];
    if (!res.ok) continue;
    if (best < 0 || res.assignment.inertia < results[static_cast<std::size_t>(best)].assignment.inertia)
      best = r;
  }
  require(best >= 0, ErrorKind::ClusteringFailed,
          "every k-means restart ended with an empty cluster");
  ClusterAssignment out = std::move(results[static_cast<std::size_t>(best)].assignment);
  out.restart = best;
  return out;
}

Matrix spectral_embedding(const SpectralModel& model, const Matrix& x, bool include_first,
                          bool weight_by_values) {
  Matrix phi = evaluate_functions(model, x);
  if (weight_by_values) phi = model.values.cwiseAbs().asDiagonal() * phi;
  if (!include_first) {
    require(phi.rows() >= 2, ErrorKind::InvalidArgument,
            "dropping the first function leaves no coordinates");
    return phi.bottomRows(phi.rows() - 1);
  }
  return phi;
}

ClusterAssignment spectral_cluster(const SpectralModel& model, const Matrix& x, int k,
                                   bool include_first, std::uint64_t seed, bool weight_by_values) {
  require(k >= 2, ErrorKind::InvalidArgument, "cluster count k must be at least 2");
  const Index needed = include_first ? k : k - 1;
  require(model.size() >= needed, ErrorKind::InvalidArgument,
          "model has " + std::to_string(model.size()) + " functions, clustering into " +
              std::to_string(k) + " needs " + std::to_string(needed));
  return kmeans(spectral_embedding(model, x, include_first, weight_by_values), k, seed);
}

double purity(const std::vector<int>& labels, const std::vector<int>& truth) {
  require(labels.size() == truth.size() && !labels.empty(), ErrorKind::InvalidShape,
          "label vectors must be non-empty and of equal length");
  std::map<int, std::map<int, Index>> table;
  for (std::size_t i = 0; i < labels.size(); ++i) ++table[labels[i]][truth[i]];
  Index agree = 0;
  for (const auto& [cluster, row] : table) {
    Index best = 0;
    for (const auto& [t, count] : row) best = std::max(best, count);
    agree += best;
  }
  return static_cast<double>(agree) / static_cast<double>(labels.size());
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == b.size() && !a.empty(), ErrorKind::InvalidShape,
          "label vectors must be non-empty and of equal length");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double v) { return v * (v - 1.0) / 2.0; };
  double sum_joint = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, v] : joint) sum_joint += pairs(v);
  for (const auto& [key, v] : rows) sum_rows += pairs(v);
  for (const auto& [key, v] : cols) sum_cols += pairs(v);
  const double total = pairs(static_cast<double>(a.size()));
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (sum_joint - expected) / (maximum - expected);
}

Vector knn_density(const Matrix& data, const Matrix& queries, int k) {
  require(data.rows() == queries.rows(), ErrorKind::InvalidShape,
          "data and queries differ in dimension");
  require(k >= 1 && k <= data.cols(), ErrorKind::InvalidArgument,
          "k must lie in [1, number of data points]");
  const auto d = static_cast<double>(data.rows());
  Vector out(queries.cols());

#pragma omp parallel for schedule(static)
  for (Index q = 0; q < queries.cols(); ++q) {
    Vector dist2 = (data.colwise() - queries.col(q)).colwise().squaredNorm().transpose();
    std::nth_element(dist2.data(), dist2.data() + (k - 1), dist2.data() + dist2.size());
    const double radius = std::sqrt(dist2(k - 1));
    out(q) = radius > 0.0 ? static_cast<double>(k) / std::pow(radius, d)
                          : std::numeric_limits<double>::infinity();
  }
  return out;
}

std::vector<bool> central_quantile_mask(const Vector& values, double fraction) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorKind::InvalidArgument,
          "quantile fraction must lie in (0, 1]");
  require(values.size() >= 1, ErrorKind::InvalidShape, "no values");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double lower = quantile(0.5 * (1.0 - fraction));
  const double upper = quantile(0.5 * (1.0 + fraction));
  std::vector<bool> mask(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i)
    mask[static_cast<std::size_t>(i)] = values(i) >= lower && values(i) <= upper;
  return mask;
}

std::vector<int> angular_sectors(const Matrix& points, int sectors, double offset) {
  require(points.rows() == 2, ErrorKind::InvalidShape, "angular sectors need 2-D points");
  require(sectors >= 1, ErrorKind::InvalidArgument, "sector count must be positive");
  const double width = 2.0 * std::numbers::pi / sectors;
  std::vector<int> out(static_cast<std::size_t>(points.cols()));
  for (Index j = 0; j < points.cols(); ++j) {
    double theta = std::atan2(points(1, j), points(0, j)) - offset;
    theta -= 2.0 * std::numbers::pi * std::floor(theta / (2.0 * std::numbers::pi));
    out[static_cast<std::size_t>(j)] = std::min(sectors - 1, static_cast<int>(theta / width));
  }
  return out;
}

}  // namespace transferop
