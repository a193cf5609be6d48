#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "transferop/operator_learning.hpp"

namespace transferop {

/// How each ensemble member is built and fitted.
struct MemberSpec {
  SpectralMode mode = SpectralMode::KoopmanEigen;
  Index n = 3;
  std::vector<Index> widths{256, 512, 256};
  Activation activation;
  Distribution distribution;
  FitOptions fit;
  HamiltonianSpec hamiltonian;  ///< schrodinger mode only
  bool bootstrap = false;       ///< resample data columns per member
};

struct Alignment {
  Matrix aligned;               ///< rows in reference order
  std::vector<Index> slot_of;   ///< member row i → reference row slot_of[i]
  std::vector<int> signs;       ///< sign applied to member row i
  std::vector<double> correlations;  ///< |corr| of each member row with its slot
  std::vector<Index> ambiguous;      ///< member rows whose two best |corr| lie within 0.05
};

/// Greedy matching of member rows to reference rows by |Pearson correlation|,
/// highest first, each row used once. Matched rows are multiplied by the sign
/// of their inner product with the reference row; zero-variance rows are
/// matched last with sign +1.
Alignment align_member(const Matrix& reference, const Matrix& member);

/// Reorders member values into reference order.
Vector align_values(const Vector& values, const Alignment& alignment);

struct MemberReport {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Vector values;  ///< aligned
  std::vector<Index> slot_of;
  std::vector<int> signs;
  std::vector<Index> ambiguous;
};

struct EnsembleSummary {
  Index member_count = 0;  ///< surviving members
  Vector value_mean;
  Vector value_std;        ///< sample standard deviation (M - 1)
  Matrix function_mean;    ///< n×k
  Matrix function_var;     ///< n×k, sample variance (M - 1)
  Matrix eval_points;      ///< d×k
  std::uint64_t reference_seed = 0;
  std::vector<MemberReport> members;  ///< ordered by seed
};

/// Fits one model per seed on the same data, aligns every member to the
/// smallest-seed survivor and reduces in seed order.
EnsembleSummary fit_ensemble(const SnapshotDataset& data, const MemberSpec& spec,
                             std::vector<std::uint64_t> seeds, const Matrix& eval_points);

/// Seeds base, base + 1, …, base + M - 1.
EnsembleSummary fit_ensemble(const SnapshotDataset& data, const MemberSpec& spec, Index members,
                             std::uint64_t base_seed, const Matrix& eval_points);

}  // namespace transferop
