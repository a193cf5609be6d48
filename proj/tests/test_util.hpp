#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "transferop/rng.hpp"
#include "transferop/types.hpp"

namespace transferop::testing {

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

/// Random PSD matrix of the given rank: G Gᵀ with G dim×rank.
inline Matrix random_psd(Index dim, Index rank, std::uint64_t seed) {
  const Matrix g = random_matrix(dim, rank, seed);
  return g * g.transpose();
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() /
              ("transferop_" + tag + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace transferop::testing
