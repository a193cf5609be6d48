#include "transferop/datasets.hpp"

#include <cmath>
#include <limits>

#include "transferop/error.hpp"
#include "transferop/rng.hpp"

namespace transferop {

void SnapshotDataset::validate() const {
  require(x.cols() >= 1 && x.rows() >= 1, ErrorKind::InsufficientData, "dataset is empty");
  require(x.allFinite(), ErrorKind::InvalidArgument, "dataset X has non-finite entries");
  if (y) {
    require(y->rows() == x.rows() && y->cols() == x.cols(), ErrorKind::InvalidShape,
            "dataset Y does not match the shape of X");
    require(y->allFinite(), ErrorKind::InvalidArgument, "dataset Y has non-finite entries");
  }
}

double PotentialSystem::noise() const {
  return std::isinf(beta) ? 0.0 : std::sqrt(2.0 / beta);
}

namespace {

PotentialSystem ornstein_uhlenbeck(double alpha, double beta) {
  require(alpha > 0.0, ErrorKind::InvalidArgument, "alpha must be positive");
  PotentialSystem s;
  s.name = "ou";
  s.dim = 1;
  s.beta = beta;
  s.potential = [alpha](std::span<const double> x) { return 0.5 * alpha * x[0] * x[0]; };
  s.gradient = [alpha](std::span<const double> x, std::span<double> g) { g[0] = alpha * x[0]; };
  s.start = Vector::Zero(1);
  s.params = {{"alpha", alpha}, {"beta", beta}};
  return s;
}

PotentialSystem lemon_slice(int wells, double beta) {
  require(wells >= 2, ErrorKind::InvalidArgument, "lemon_slice needs at least 2 wells");
  const double n = wells;
  PotentialSystem s;
  s.name = "lemon_slice";
  s.dim = 2;
  s.beta = beta;
  s.potential = [n](std::span<const double> p) {
    const double r = std::hypot(p[0], p[1]);
    return std::cos(n * std::atan2(p[1], p[0])) + 10.0 * (r - 1.0) * (r - 1.0);
  };
  s.gradient = [n](std::span<const double> p, std::span<double> g) {
    const double x = p[0], y = p[1];
    const double r2 = x * x + y * y;
    if (r2 == 0.0) {
      g[0] = g[1] = 0.0;
      return;
    }
    const double r = std::sqrt(r2);
    const double angular = -n * std::sin(n * std::atan2(y, x)) / r2;
    const double radial = 20.0 * (r - 1.0) / r;
    g[0] = angular * -y + radial * x;
    g[1] = angular * x + radial * y;
  };
  s.start = Vector(2);
  s.start << 1.0, 0.0;
  s.params = {{"wells", n}, {"beta", beta}};
  return s;
}

PotentialSystem triple_well(double beta) {
  PotentialSystem s;
  s.name = "triple_well";
  s.dim = 2;
  s.beta = beta;
  s.potential = [](std::span<const double> p) {
    const double x = p[0], y = p[1];
    const double ya = y - 1.0 / 3.0, yb = y - 5.0 / 3.0;
    return 3.0 * std::exp(-x * x - ya * ya) - 3.0 * std::exp(-x * x - yb * yb) -
           5.0 * std::exp(-(x - 1.0) * (x - 1.0) - y * y) -
           5.0 * std::exp(-(x + 1.0) * (x + 1.0) - y * y) + 0.2 * x * x * x * x +
           0.2 * ya * ya * ya * ya;
  };
  s.gradient = [](std::span<const double> p, std::span<double> g) {
    const double x = p[0], y = p[1];
    const double ya = y - 1.0 / 3.0, yb = y - 5.0 / 3.0;
    const double g1 = 3.0 * std::exp(-x * x - ya * ya);
    const double g2 = -3.0 * std::exp(-x * x - yb * yb);
    const double g3 = -5.0 * std::exp(-(x - 1.0) * (x - 1.0) - y * y);
    const double g4 = -5.0 * std::exp(-(x + 1.0) * (x + 1.0) - y * y);
    g[0] = -2.0 * (x * (g1 + g2) + (x - 1.0) * g3 + (x + 1.0) * g4) + 0.8 * x * x * x;
    g[1] = -2.0 * (ya * g1 + yb * g2 + y * (g3 + g4)) + 0.8 * ya * ya * ya;
  };
  s.start = Vector(2);
  s.start << -1.0, 0.0;
  s.params = {{"beta", beta}};
  return s;
}

PotentialSystem harmonic(double omega) {
  require(omega > 0.0, ErrorKind::InvalidArgument, "omega must be positive");
  PotentialSystem s;
  s.name = "harmonic";
  s.dim = 1;
  s.beta = std::numeric_limits<double>::infinity();
  const double w2 = omega * omega;
  s.potential = [w2](std::span<const double> x) { return 0.5 * w2 * x[0] * x[0]; };
  s.gradient = [w2](std::span<const double> x, std::span<double> g) { g[0] = w2 * x[0]; };
  s.start = Vector::Zero(1);
  s.params = {{"omega", omega}};
  return s;
}

}  // namespace

PotentialSystem builtin_potential(std::string_view name, const PotentialParams& params) {
  if (params.beta)
    require(*params.beta > 0.0, ErrorKind::InvalidArgument, "beta must be positive");
  if (name == "ou") return ornstein_uhlenbeck(params.alpha, params.beta.value_or(4.0));
  if (name == "lemon_slice") return lemon_slice(params.wells, params.beta.value_or(2.0));
  if (name == "triple_well") return triple_well(params.beta.value_or(2.0));
  if (name == "harmonic" || name == "qho") return harmonic(params.omega);
  fail(ErrorKind::UnknownSystem, "unknown system '" + std::string(name) + "'");
}

std::vector<Matrix> euler_maruyama(const PotentialSystem& system, const Matrix& x0, Index steps,
                                   double h, std::uint64_t seed) {
  require(x0.rows() == system.dim, ErrorKind::InvalidShape,
          "initial state dimension does not match the system");
  return kernels::euler_maruyama(system.gradient, x0, steps, h, system.noise(), seed);
}

SnapshotDataset lagged_pairs(const Matrix& trajectory, Index lag_steps, Index stride, double h) {
  require(lag_steps >= 1, ErrorKind::InvalidArgument, "lag must be at least one step");
  require(stride >= 1, ErrorKind::InvalidArgument, "stride must be at least one step");
  require(trajectory.cols() > lag_steps, ErrorKind::InsufficientData,
          "trajectory of " + std::to_string(trajectory.cols()) + " states is too short for lag " +
              std::to_string(lag_steps));
  const Index count = (trajectory.cols() - 1 - lag_steps) / stride + 1;
  SnapshotDataset data;
  data.x.resize(trajectory.rows(), count);
  data.y = Matrix(trajectory.rows(), count);
  for (Index k = 0; k < count; ++k) {
    data.x.col(k) = trajectory.col(k * stride);
    data.y->col(k) = trajectory.col(k * stride + lag_steps);
  }
  data.lag_time = static_cast<double>(lag_steps) * h;
  return data;
}

SnapshotDataset simulate_langevin(const PotentialSystem& system, const LangevinSpec& spec) {
  require(spec.m >= 1, ErrorKind::InvalidArgument, "m must be at least 1");
  require(spec.lag_steps >= 1, ErrorKind::InvalidArgument, "lag must be at least one step");
  require(spec.burn_in >= 0, ErrorKind::InvalidArgument, "burn-in must be nonnegative");
  const Index stride = spec.stride == 0 ? spec.lag_steps : spec.stride;
  require(stride >= 1, ErrorKind::InvalidArgument, "stride must be positive");
  const Vector x0 = spec.x0.value_or(system.start);
  require(x0.size() == system.dim, ErrorKind::InvalidShape,
          "initial state dimension does not match the system");

  const Index steps = spec.burn_in + (spec.m - 1) * stride + spec.lag_steps;
  const std::vector<Matrix> runs = euler_maruyama(system, x0, steps, spec.h, spec.seed);
  SnapshotDataset data =
      lagged_pairs(runs.front().rightCols(steps + 1 - spec.burn_in), spec.lag_steps, stride, spec.h);
  data.source.system = system.name;
  data.source.params = system.params;
  data.source.params.emplace_back("h", spec.h);
  data.source.params.emplace_back("lag_steps", static_cast<double>(spec.lag_steps));
  data.source.params.emplace_back("stride", static_cast<double>(stride));
  data.source.params.emplace_back("burn_in", static_cast<double>(spec.burn_in));
  data.source.seed = spec.seed;
  return data;
}

std::vector<std::pair<std::string, double>> BickleyParams::describe() const {
  return {{"u0", u0}, {"length", length}, {"r0", r0}, {"c1", c1}, {"c2", c2},
          {"c3", c3}, {"a1", a1}, {"a2", a2}, {"a3", a3}, {"period", period}};
}

BickleyJet::BickleyJet(BickleyParams params) : p_(params) {
  require(p_.length > 0.0 && p_.r0 > 0.0 && p_.period > 0.0, ErrorKind::InvalidArgument,
          "Bickley length scales must be positive");
  k1_ = 2.0 / p_.r0;
  k2_ = 4.0 / p_.r0;
  sigma1_ = k1_ * (p_.c1 - p_.c3);
  sigma2_ = k2_ * (p_.c2 - p_.c3);
}

double BickleyJet::stream(double x, double y, double t) const {
  const double ty = std::tanh(y / p_.length);
  const double sech2 = 1.0 - ty * ty;
  const double f = p_.a3 * std::cos(k1_ * x) + p_.a2 * std::cos(k2_ * x - sigma2_ * t) +
                   p_.a1 * std::cos(k1_ * x - sigma1_ * t);
  return p_.c3 * y - p_.u0 * p_.length * ty + p_.u0 * p_.length * sech2 * f;
}

std::pair<double, double> BickleyJet::velocity(double x, double y, double t) const {
  const double ty = std::tanh(y / p_.length);
  const double sech2 = 1.0 - ty * ty;
  const double f = p_.a3 * std::cos(k1_ * x) + p_.a2 * std::cos(k2_ * x - sigma2_ * t) +
                   p_.a1 * std::cos(k1_ * x - sigma1_ * t);
  const double fx = -p_.a3 * k1_ * std::sin(k1_ * x) - p_.a2 * k2_ * std::sin(k2_ * x - sigma2_ * t) -
                    p_.a1 * k1_ * std::sin(k1_ * x - sigma1_ * t);
  return {-p_.c3 + p_.u0 * sech2 + 2.0 * p_.u0 * sech2 * ty * f, p_.u0 * p_.length * sech2 * fx};
}

void BickleyJet::velocity(double t, const Matrix& state, Matrix& out) const {
  out.resize(2, state.cols());
  const auto x = state.row(0).array();
  const auto y = state.row(1).array();
  // cos/sin of k2·x and of the time shifts follow from angle identities, so
  // only one sin/cos pair per particle is evaluated.
  const Eigen::ArrayXXd c1 = (k1_ * x).cos();
  const Eigen::ArrayXXd s1 = (k1_ * x).sin();
  const Eigen::ArrayXXd c2 = 2.0 * c1.square() - 1.0;
  const Eigen::ArrayXXd s2 = 2.0 * s1 * c1;
  const double ct1 = std::cos(sigma1_ * t), st1 = std::sin(sigma1_ * t);
  const double ct2 = std::cos(sigma2_ * t), st2 = std::sin(sigma2_ * t);
  const Eigen::ArrayXXd f = p_.a3 * c1 + p_.a2 * (c2 * ct2 + s2 * st2) + p_.a1 * (c1 * ct1 + s1 * st1);
  const Eigen::ArrayXXd fx = -p_.a3 * k1_ * s1 - p_.a2 * k2_ * (s2 * ct2 - c2 * st2) -
                             p_.a1 * k1_ * (s1 * ct1 - c1 * st1);
  const Eigen::ArrayXXd ty = 1.0 - 2.0 / ((2.0 / p_.length * y).exp() + 1.0);
  const Eigen::ArrayXXd sech2 = 1.0 - ty.square();
  out.row(0) = (-p_.c3 + p_.u0 * sech2 * (1.0 + 2.0 * ty * f)).matrix();
  out.row(1) = (p_.u0 * p_.length * sech2 * fx).matrix();
}

SnapshotDataset bickley_trajectories(Index m, double t0, double t1, double h, std::uint64_t seed,
                                     const BickleyParams& params) {
  require(m >= 1, ErrorKind::InvalidArgument, "m must be at least 1");
  require(t1 >= t0, ErrorKind::InvalidArgument, "t1 must not precede t0");
  require(h > 0.0, ErrorKind::InvalidArgument, "step size must be positive");
  const BickleyJet jet(params);
  Box box{Vector(2), Vector(2)};
  box.lower << 0.0, params.y_min;
  box.upper << params.period, params.y_max;
  SnapshotDataset data = sample_grid(box, m, GridMode::UniformRandom, seed);
  const double period = params.period;
  data.y = kernels::rk4_advect(
      [&jet](double t, const Matrix& s, Matrix& out) { jet.velocity(t, s, out); }, data.x, t0, t1,
      h, [period](Matrix& s) {
        s.row(0) = s.row(0).unaryExpr([period](double v) { return v - period * std::floor(v / period); });
      });
  data.lag_time = t1 - t0;
  data.source.system = "bickley";
  data.source.params = params.describe();
  data.source.params.emplace_back("t0", t0);
  data.source.params.emplace_back("t1", t1);
  data.source.params.emplace_back("h", h);
  data.source.seed = seed;
  return data;
}

GridMode parse_grid_mode(std::string_view name) {
  if (name == "uniform_random" || name == "uniform") return GridMode::UniformRandom;
  if (name == "regular_grid" || name == "grid") return GridMode::RegularGrid;
  fail(ErrorKind::InvalidArgument, "unknown sampling mode '" + std::string(name) + "'");
}

namespace {

void check_box(const Box& domain) {
  require(domain.lower.size() >= 1 && domain.lower.size() == domain.upper.size(),
          ErrorKind::InvalidDomain, "box bounds must have matching positive dimension");
  require(domain.lower.allFinite() && domain.upper.allFinite(), ErrorKind::InvalidDomain,
          "box bounds must be finite");
  require((domain.upper.array() > domain.lower.array()).all(), ErrorKind::InvalidDomain,
          "box is empty: every upper bound must exceed its lower bound");
}

}  // namespace

Matrix regular_grid(const Box& domain, std::span<const Index> counts) {
  check_box(domain);
  const Index d = domain.lower.size();
  require(static_cast<Index>(counts.size()) == d, ErrorKind::InvalidShape,
          "one grid count per axis is required");
  Index total = 1;
  for (Index c : counts) {
    require(c >= 1, ErrorKind::InvalidArgument, "grid counts must be positive");
    total *= c;
  }
  Matrix grid(d, total);
  for (Index j = 0; j < total; ++j) {
    Index rest = j;
    for (Index a = 0; a < d; ++a) {
      const Index n = counts[static_cast<std::size_t>(a)];
      const Index i = rest % n;
      rest /= n;
      const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      grid(a, j) = domain.lower(a) + frac * (domain.upper(a) - domain.lower(a));
    }
  }
  return grid;
}

SnapshotDataset sample_grid(const Box& domain, Index m, GridMode mode, std::uint64_t seed) {
  check_box(domain);
  require(m >= 1, ErrorKind::InvalidArgument, "m must be at least 1");
  const Index d = domain.lower.size();
  SnapshotDataset data;
  if (mode == GridMode::UniformRandom) {
    Rng rng(seed);
    data.x.resize(d, m);
    for (Index j = 0; j < m; ++j)
      for (Index a = 0; a < d; ++a) data.x(a, j) = rng.uniform(domain.lower(a), domain.upper(a));
  } else {
    const auto n = static_cast<Index>(std::llround(std::pow(static_cast<double>(m), 1.0 / d)));
    Index total = 1;
    for (Index a = 0; a < d; ++a) total *= n;
    require(total == m, ErrorKind::InvalidArgument,
            "a regular grid in " + std::to_string(d) + " dimensions needs m = n^" +
                std::to_string(d));
    const std::vector<Index> counts(static_cast<std::size_t>(d), n);
    data.x = regular_grid(domain, counts);
  }
  data.source.system = "grid";
  for (Index a = 0; a < d; ++a) {
    data.source.params.emplace_back("lower" + std::to_string(a), domain.lower(a));
    data.source.params.emplace_back("upper" + std::to_string(a), domain.upper(a));
  }
  data.source.seed = seed;
  return data;
}

}  // namespace transferop
