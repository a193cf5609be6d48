#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "transferop/kernels.hpp"
#include "transferop/types.hpp"

namespace transferop {

struct SourceDescriptor {
  std::string system;
  std::vector<std::pair<std::string, double>> params;
  std::uint64_t seed = 0;
};

/// Snapshot pairs (x_i, y_i) sampled τ apart, or standalone samples when y is absent.
struct SnapshotDataset {
  Matrix x;                ///< d×m
  std::optional<Matrix> y;  ///< d×m, present iff paired
  double lag_time = 0.0;
  SourceDescriptor source;

  Index dim() const noexcept { return x.rows(); }
  Index size() const noexcept { return x.cols(); }
  bool paired() const noexcept { return y.has_value(); }

  /// Throws unless the invariants hold (finite X, matching Y, m ≥ 1).
  void validate() const;
};

/// Overdamped Langevin system dX = -∇V dt + √(2/β) dW.
struct PotentialSystem {
  std::string name;
  Index dim = 1;
  double beta = 1.0;  ///< +inf disables the noise
  std::function<double(std::span<const double>)> potential;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  Vector start;  ///< default initial state
  std::vector<std::pair<std::string, double>> params;

  double noise() const;
};

struct PotentialParams {
  double alpha = 1.0;           ///< OU stiffness
  std::optional<double> beta;   ///< defaults to 4 for OU and 2 otherwise
  int wells = 5;                ///< lemon-slice well count
  double omega = 1.0;           ///< harmonic frequency
};

/// ou: V = αx²/2. lemon_slice: V = cos(n·atan2(y, x)) + 10(r - 1)².
/// triple_well: three Gaussian wells with quartic confinement.
/// harmonic: V = ω²x²/2 (used by the Schrödinger branch).
PotentialSystem builtin_potential(std::string_view name, const PotentialParams& params = {});

/// One trajectory per column of x0, each d×(steps+1).
std::vector<Matrix> euler_maruyama(const PotentialSystem& system, const Matrix& x0, Index steps,
                                   double h, std::uint64_t seed);

/// X holds states {0, stride, 2·stride, …} and Y the states lag_steps later.
SnapshotDataset lagged_pairs(const Matrix& trajectory, Index lag_steps, Index stride, double h);

struct LangevinSpec {
  Index m = 20000;
  Index lag_steps = 100;
  Index stride = 0;  ///< 0 means lag_steps
  double h = 0.005;
  Index burn_in = 0;
  std::uint64_t seed = 0;
  std::optional<Vector> x0;
};

/// Simulates one long trajectory (burn-in discarded) and cuts it into m pairs.
SnapshotDataset simulate_langevin(const PotentialSystem& system, const LangevinSpec& spec);

/// Bickley jet constants. The wavenumbers are k1 = 2/r0 and k2 = 4/r0; with
/// r0 = 20/π the flow is exactly 20-periodic in x.
struct BickleyParams {
  double u0 = 5.4138;
  double length = 1.77;
  double r0 = 20.0 / 3.14159265358979323846;
  double c1 = 0.1446 * 5.4138;
  double c2 = 0.205 * 5.4138;
  double c3 = 0.461 * 5.4138;
  double a1 = 0.075;
  double a2 = 0.4;
  double a3 = 0.3;
  double period = 20.0;
  double y_min = -4.0;
  double y_max = 4.0;

  std::vector<std::pair<std::string, double>> describe() const;
};

class BickleyJet {
 public:
  explicit BickleyJet(BickleyParams params = {});

  const BickleyParams& params() const noexcept { return p_; }
  double k1() const noexcept { return k1_; }
  double k2() const noexcept { return k2_; }
  double sigma1() const noexcept { return sigma1_; }
  double sigma2() const noexcept { return sigma2_; }

  double stream(double x, double y, double t) const;
  /// (ẋ, ẏ) = (-∂Φ/∂y, ∂Φ/∂x).
  std::pair<double, double> velocity(double x, double y, double t) const;
  /// Batch form for a 2×B state block.
  void velocity(double t, const Matrix& state, Matrix& out) const;

 private:
  BickleyParams p_;
  double k1_, k2_, sigma1_, sigma2_;
};

/// Particles uniform on [0, period)×[y_min, y_max] at t0, advected by RK4 to t1.
SnapshotDataset bickley_trajectories(Index m, double t0, double t1, double h, std::uint64_t seed,
                                     const BickleyParams& params = {});

struct Box {
  Vector lower;
  Vector upper;
};

enum class GridMode { UniformRandom, RegularGrid };

GridMode parse_grid_mode(std::string_view name);

/// Standalone samples in a box. A regular grid needs m = n^d and uses n points per axis.
SnapshotDataset sample_grid(const Box& domain, Index m, GridMode mode, std::uint64_t seed);

/// Tensor grid with counts[i] equally spaced points along axis i (first axis fastest).
Matrix regular_grid(const Box& domain, std::span<const Index> counts);

}  // namespace transferop
