#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "transferop/datasets.hpp"
#include "transferop/error.hpp"
#include "transferop/io.hpp"
#include "transferop/operator_learning.hpp"

using namespace transferop;
using transferop::testing::random_matrix;
using transferop::testing::TempDir;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::InvalidArgument;
}

SnapshotDataset small_ou(Index m) {
  LangevinSpec spec;
  spec.m = m;
  spec.lag_steps = 10;
  spec.burn_in = 100;
  spec.seed = 7;
  return simulate_langevin(builtin_potential("ou"), spec);
}

}  // namespace

TEST(Topd, MatrixRoundTripIsBitExact) {
  TempDir dir("io_matrix");
  Matrix m = random_matrix(3, 5, 1);
  m(0, 0) = std::numeric_limits<double>::denorm_min();
  m(2, 4) = -0.0;
  io::write_matrix(dir / "m.topd", m);
  const Matrix back = io::read_matrix(dir / "m.topd");
  ASSERT_EQ(back.rows(), 3);
  ASSERT_EQ(back.cols(), 5);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 5; ++j)
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back(i, j)), std::bit_cast<std::uint64_t>(m(i, j)));
}

TEST(Topd, LayoutIsRowMajorLittleEndian) {
  TempDir dir("io_layout");
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  io::write_matrix(dir / "m.topd", m);
  const std::string bytes = io::read_file(dir / "m.topd");
  ASSERT_EQ(bytes.size(), 4u + 16u + 32u);
  EXPECT_EQ(bytes.substr(0, 4), "TOPD");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2);
  double second = 0.0;
  std::memcpy(&second, bytes.data() + 20 + 8, 8);
  EXPECT_EQ(second, 2.0);
}

TEST(Topd, CorruptFilesAreRejected) {
  TempDir dir("io_corrupt");
  io::write_matrix(dir / "m.topd", random_matrix(2, 3, 2));
  const std::string good = io::read_file(dir / "m.topd");

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  io::write_file_atomic(dir / "a.topd", bad_magic);
  EXPECT_EQ(kind_of([&] { io::read_matrix(dir / "a.topd"); }), ErrorKind::FormatError);

  io::write_file_atomic(dir / "b.topd", good.substr(0, good.size() - 3));
  EXPECT_EQ(kind_of([&] { io::read_matrix(dir / "b.topd"); }), ErrorKind::FormatError);

  io::write_file_atomic(dir / "c.topd", good + "x");
  EXPECT_EQ(kind_of([&] { io::read_matrix(dir / "c.topd"); }), ErrorKind::FormatError);

  EXPECT_THROW(io::read_matrix(dir / "missing.topd"), Error);
}

TEST(Dataset, PairedRoundTrip) {
  TempDir dir("io_dataset");
  const SnapshotDataset data = small_ou(50);
  io::save_dataset(dir / "ou", data);
  const SnapshotDataset back = io::load_dataset(dir / "ou");
  EXPECT_TRUE(back.x == data.x);
  ASSERT_TRUE(back.paired());
  EXPECT_TRUE(*back.y == *data.y);
  EXPECT_EQ(back.lag_time, data.lag_time);
  EXPECT_EQ(back.source.system, data.source.system);
  EXPECT_EQ(back.source.seed, data.source.seed);
  EXPECT_EQ(back.source.params, data.source.params);
}

TEST(Dataset, UnpairedRoundTrip) {
  TempDir dir("io_unpaired");
  Box box{Vector::Constant(1, -2.0), Vector::Constant(1, 2.0)};
  const SnapshotDataset data = sample_grid(box, 9, GridMode::RegularGrid, 0);
  io::save_dataset(dir / "grid", data);
  EXPECT_FALSE(std::filesystem::exists(dir / "grid.Y.topd"));
  const SnapshotDataset back = io::load_dataset(dir / "grid");
  EXPECT_FALSE(back.paired());
  EXPECT_TRUE(back.x == data.x);
}

TEST(Rfm, EncodeDecodePreservesEvaluation) {
  const std::vector<Index> widths{6, 4};
  const auto rfm = RandomFeatureMap::sample(2, widths, Activation(ActivationKind::Gaussian),
                                            Distribution{}, 31);
  const auto back = io::decode_rfm(io::encode_rfm(rfm));
  EXPECT_EQ(back.depth(), 2);
  EXPECT_EQ(back.seed(), 31u);
  EXPECT_EQ(back.activation().kind(), ActivationKind::Gaussian);
  const Matrix x = random_matrix(2, 10, 3);
  EXPECT_TRUE(back.evaluate(x) == rfm.evaluate(x));
  EXPECT_EQ(io::encode_rfm(back), io::encode_rfm(rfm));

  std::string bad = io::encode_rfm(rfm);
  bad[4 + 8 + 8 + 16] = 9;  // activation id
  EXPECT_EQ(kind_of([&] { io::decode_rfm(bad); }), ErrorKind::FormatError);
}

TEST(Model, EigenAndSingularRoundTrip) {
  TempDir dir("io_model");
  const SnapshotDataset data = small_ou(400);
  const std::vector<Index> widths{30};
  const auto rfm = RandomFeatureMap::sample(1, widths, Activation(ActivationKind::Tanh),
                                            Distribution{}, 4);
  const Matrix pts = random_matrix(1, 20, 5) * 0.5;
  for (const SpectralModel& model : {fit_eigen(rfm, data, 3), fit_singular(rfm, data, 3)}) {
    io::save_model(dir / "model", model);
    const SpectralModel back = io::load_model(dir / "model");
    EXPECT_EQ(back.mode, model.mode);
    EXPECT_TRUE(back.values == model.values);
    EXPECT_TRUE(back.w_o == model.w_o);
    EXPECT_EQ(back.companion.has_value(), model.companion.has_value());
    if (model.companion) EXPECT_TRUE(*back.companion == *model.companion);
    EXPECT_EQ(back.tol, model.tol);
    EXPECT_EQ(back.symmetrize, model.symmetrize);
    EXPECT_TRUE(evaluate_functions(back, pts) == evaluate_functions(model, pts));
  }
}

TEST(Model, WidthMismatchIsFormatError) {
  TempDir dir("io_mismatch");
  const SnapshotDataset data = small_ou(300);
  const std::vector<Index> widths{20}, other{21};
  const auto model = fit_eigen(
      RandomFeatureMap::sample(1, widths, Activation(ActivationKind::Tanh), Distribution{}, 1), data, 2);
  io::save_model(dir / "m", model);
  io::write_file_atomic(
      dir / "m.rfm",
      io::encode_rfm(RandomFeatureMap::sample(1, other, Activation(ActivationKind::Tanh), Distribution{}, 1)));
  EXPECT_EQ(kind_of([&] { io::load_model(dir / "m"); }), ErrorKind::FormatError);
}

TEST(Csv, RoundTripIsExactAtSeventeenDigits) {
  TempDir dir("io_csv");
  io::CsvTable table;
  table.header = {"a", "b", "c"};
  table.rows = random_matrix(7, 3, 6);
  table.rows(0, 0) = 0.1;
  table.rows(1, 1) = 1e-300;
  table.rows(2, 2) = -123456789.123456789;
  io::write_csv(dir / "t.csv", table);
  const auto back = io::read_csv(dir / "t.csv");
  EXPECT_EQ(back.header, table.header);
  EXPECT_TRUE(back.rows == table.rows);
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(Csv, RaggedRowsAndBadNumbersAreRejected) {
  TempDir dir("io_csv_bad");
  io::write_file_atomic(dir / "a.csv", "x1,x2\n1,2\n3\n");
  EXPECT_EQ(kind_of([&] { io::read_csv(dir / "a.csv"); }), ErrorKind::FormatError);
  io::write_file_atomic(dir / "b.csv", "x1\nabc\n");
  EXPECT_EQ(kind_of([&] { io::read_csv(dir / "b.csv"); }), ErrorKind::FormatError);
  io::CsvTable wrong{{"a"}, Matrix::Zero(2, 2)};
  EXPECT_EQ(kind_of([&] { io::write_csv(dir / "c.csv", wrong); }), ErrorKind::InvalidShape);
}

TEST(Csv, PointsTableTransposes) {
  const Matrix pts = random_matrix(2, 4, 7);
  const auto table = io::points_table(pts);
  EXPECT_EQ(table.header, (std::vector<std::string>{"x1", "x2"}));
  EXPECT_EQ(table.rows.rows(), 4);
  EXPECT_TRUE(io::points_from_table(table) == pts);
}
