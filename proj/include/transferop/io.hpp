#pragma once

// Binary artifact formats (all little-endian):
//   TOPD  matrix:  "TOPD", rows u64, cols u64, row-major f64
//   RFM1  map:     "RFM1", d u64, layers u64, widths u64 × layers, activation u32,
//                  distribution u32, seed u64, then per layer weights (row-major) and bias
//   SPM1  model:   "SPM1", mode u32, n u64, N u64, values, W_o (N×n row-major),
//                  W_o′ (singular mode only), tol f64, symmetrize u8
// A dataset prefix P maps to P.X.topd, P.Y.topd (paired only) and P.meta; a
// model prefix maps to P.rfm and P.spm.

#include <filesystem>
#include <string>
#include <vector>

#include "transferop/datasets.hpp"
#include "transferop/operator_learning.hpp"

namespace transferop::io {

/// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

void save_dataset(const std::filesystem::path& prefix, const SnapshotDataset& data);
SnapshotDataset load_dataset(const std::filesystem::path& prefix);

std::string encode_rfm(const RandomFeatureMap& rfm);
RandomFeatureMap decode_rfm(const std::string& bytes);

void save_model(const std::filesystem::path& prefix, const SpectralModel& model);
SpectralModel load_model(const std::filesystem::path& prefix);

/// Shortest-safe decimal form: 17 significant digits.
std::string format_double(double value);

struct CsvTable {
  std::vector<std::string> header;
  Matrix rows;  ///< one matrix row per CSV record
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Header x1,…,xd with one row per sample.
CsvTable points_table(const Matrix& points);
Matrix points_from_table(const CsvTable& table);

}  // namespace transferop::io
