#include "transferop/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "transferop/error.hpp"
#include "transferop/rng.hpp"

namespace transferop::io {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    require(!ec, ErrorKind::IoError, "cannot create directory " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::IoError, "cannot open " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorKind::IoError, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::IoError, "cannot rename onto " + path.string());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

namespace {

class Writer {
 public:
  void magic(const char* tag) { out_.append(tag, 4); }
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  /// Row-major regardless of the in-memory layout.
  void matrix(const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
      for (Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
  const std::string& bytes() const noexcept { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  void magic(const char* tag) {
    need(4);
    require(std::memcmp(bytes_.data() + pos_, tag, 4) == 0, ErrorKind::FormatError,
            what_ + ": bad magic, expected " + std::string(tag, 4));
    pos_ += 4;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  Index count(std::uint64_t limit = std::uint64_t{1} << 40) {
    const std::uint64_t v = u64();
    require(v <= limit, ErrorKind::FormatError, what_ + ": implausible size " + std::to_string(v));
    return static_cast<Index>(v);
  }
  Matrix matrix(Index rows, Index cols) {
    need(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 8);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = f64();
    return m;
  }
  void finish() const {
    require(pos_ == bytes_.size(), ErrorKind::FormatError, what_ + ": trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    require(bytes_.size() - pos_ >= n, ErrorKind::FormatError, what_ + ": truncated file");
  }

  const std::string& bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_matrix(const fs::path& path, const Matrix& m) {
  Writer w;
  w.magic("TOPD");
  w.u64(static_cast<std::uint64_t>(m.rows()));
  w.u64(static_cast<std::uint64_t>(m.cols()));
  w.matrix(m);
  write_file_atomic(path, w.bytes());
}

Matrix read_matrix(const fs::path& path) {
  const std::string bytes = read_file(path);
  Reader r(bytes, path.string());
  r.magic("TOPD");
  const Index rows = r.count();
  const Index cols = r.count();
  Matrix m = r.matrix(rows, cols);
  r.finish();
  return m;
}

namespace {

fs::path with_suffix(const fs::path& prefix, const char* suffix) {
  fs::path p = prefix;
  p += suffix;
  return p;
}

}  // namespace

void save_dataset(const fs::path& prefix, const SnapshotDataset& data) {
  data.validate();
  write_matrix(with_suffix(prefix, ".X.topd"), data.x);
  if (data.y) write_matrix(with_suffix(prefix, ".Y.topd"), *data.y);
  std::ostringstream meta;
  meta << "system=" << data.source.system << "\n";
  meta << "seed=" << data.source.seed << "\n";
  meta << "paired=" << (data.paired() ? 1 : 0) << "\n";
  meta << "lag_time=" << format_double(data.lag_time) << "\n";
  meta << "dim=" << data.dim() << "\n";
  meta << "m=" << data.size() << "\n";
  for (const auto& [key, value] : data.source.params)
    meta << "param." << key << "=" << format_double(value) << "\n";
  write_file_atomic(with_suffix(prefix, ".meta"), meta.str());
}

namespace {

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  require(ec == std::errc() && ptr == end, ErrorKind::FormatError,
          where + ": '" + text + "' is not a number");
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  require(ec == std::errc() && ptr == end, ErrorKind::FormatError,
          where + ": '" + text + "' is not an unsigned integer");
  return v;
}

}  // namespace

SnapshotDataset load_dataset(const fs::path& prefix) {
  SnapshotDataset data;
  const fs::path meta_path = with_suffix(prefix, ".meta");
  std::istringstream meta(read_file(meta_path));
  bool paired = false;
  std::string line;
  int line_no = 0;
  while (std::getline(meta, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = meta_path.string() + ":" + std::to_string(line_no);
    require(eq != std::string::npos, ErrorKind::FormatError, where + ": expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "system") data.source.system = value;
    else if (key == "seed") data.source.seed = parse_u64(value, where);
    else if (key == "paired") paired = value == "1";
    else if (key == "lag_time") data.lag_time = parse_double(value, where);
    else if (key.rfind("param.", 0) == 0)
      data.source.params.emplace_back(key.substr(6), parse_double(value, where));
  }
  data.x = read_matrix(with_suffix(prefix, ".X.topd"));
  if (paired) data.y = read_matrix(with_suffix(prefix, ".Y.topd"));
  data.validate();
  return data;
}

std::string encode_rfm(const RandomFeatureMap& rfm) {
  Writer w;
  w.magic("RFM1");
  w.u64(static_cast<std::uint64_t>(rfm.input_dim()));
  w.u64(static_cast<std::uint64_t>(rfm.depth()));
  for (const RandomLayer& layer : rfm.layers()) w.u64(static_cast<std::uint64_t>(layer.outputs()));
  w.u32(static_cast<std::uint32_t>(rfm.activation().kind()));
  w.u32(static_cast<std::uint32_t>(rfm.distribution().family));
  w.u64(rfm.seed());
  for (const RandomLayer& layer : rfm.layers()) {
    w.matrix(layer.weights);
    w.matrix(layer.bias.transpose());
  }
  return w.bytes();
}

namespace {

RandomFeatureMap read_rfm(Reader& r) {
  r.magic("RFM1");
  const Index d = r.count();
  const Index depth = r.count(1 << 16);
  std::vector<Index> widths;
  for (Index l = 0; l < depth; ++l) widths.push_back(r.count());
  const std::uint32_t act = r.u32();
  const std::uint32_t dist = r.u32();
  require(act <= 2, ErrorKind::FormatError, "unknown activation id " + std::to_string(act));
  require(dist <= 1, ErrorKind::FormatError, "unknown distribution id " + std::to_string(dist));
  const std::uint64_t seed = r.u64();
  Distribution distribution;
  distribution.family = static_cast<WeightFamily>(dist);
  std::vector<RandomLayer> layers;
  Index fan_in = d;
  for (Index l = 0; l < depth; ++l) {
    RandomLayer layer;
    layer.weights = r.matrix(widths[static_cast<std::size_t>(l)], fan_in);
    layer.bias = r.matrix(1, widths[static_cast<std::size_t>(l)]).transpose();
    layer.distribution = distribution;
    layer.seed = derive_seed(seed, static_cast<std::uint64_t>(l));
    fan_in = widths[static_cast<std::size_t>(l)];
    layers.push_back(std::move(layer));
  }
  return RandomFeatureMap(std::move(layers), Activation(static_cast<ActivationKind>(act)), seed,
                          distribution);
}

}  // namespace

RandomFeatureMap decode_rfm(const std::string& bytes) {
  Reader r(bytes, "RFM1 block");
  RandomFeatureMap rfm = read_rfm(r);
  r.finish();
  return rfm;
}

void save_model(const fs::path& prefix, const SpectralModel& model) {
  write_file_atomic(with_suffix(prefix, ".rfm"), encode_rfm(model.rfm));
  Writer w;
  w.magic("SPM1");
  w.u32(static_cast<std::uint32_t>(model.mode));
  w.u64(static_cast<std::uint64_t>(model.size()));
  w.u64(static_cast<std::uint64_t>(model.w_o.rows()));
  for (Index i = 0; i < model.size(); ++i) w.f64(model.values(i));
  w.matrix(model.w_o);
  if (model.mode == SpectralMode::Singular) {
    require(model.companion.has_value(), ErrorKind::InvalidArgument,
            "singular model lacks left weights");
    w.matrix(*model.companion);
  }
  w.f64(model.tol);
  w.u8(model.symmetrize ? 1 : 0);
  write_file_atomic(with_suffix(prefix, ".spm"), w.bytes());
}

SpectralModel load_model(const fs::path& prefix) {
  RandomFeatureMap rfm = decode_rfm(read_file(with_suffix(prefix, ".rfm")));
  const fs::path spm = with_suffix(prefix, ".spm");
  const std::string bytes = read_file(spm);
  Reader r(bytes, spm.string());
  r.magic("SPM1");
  const std::uint32_t mode = r.u32();
  require(mode <= 2, ErrorKind::FormatError, "unknown mode id " + std::to_string(mode));
  const Index n = r.count();
  const Index big_n = r.count();
  require(big_n == rfm.output_dim(), ErrorKind::FormatError,
          "model weights do not match the feature map width");
  Vector values = r.matrix(n, 1);
  Matrix w_o = r.matrix(big_n, n);
  std::optional<Matrix> companion;
  if (static_cast<SpectralMode>(mode) == SpectralMode::Singular) companion = r.matrix(big_n, n);
  const double tol = r.f64();
  const bool symmetrize = r.u8() != 0;
  r.finish();
  return SpectralModel{std::move(rfm), std::move(w_o), std::move(values),
                       static_cast<SpectralMode>(mode), std::move(companion), tol, symmetrize,
                       0, false};
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const fs::path& path, const CsvTable& table) {
  require(static_cast<Index>(table.header.size()) == table.rows.cols(), ErrorKind::InvalidShape,
          "CSV header does not match the column count");
  std::string out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c > 0) out += ',';
    out += table.header[c];
  }
  out += '\n';
  for (Index i = 0; i < table.rows.rows(); ++i) {
    for (Index j = 0; j < table.rows.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(table.rows(i, j));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

CsvTable read_csv(const fs::path& path) {
  std::istringstream in(read_file(path));
  CsvTable table;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::FormatError,
          path.string() + ": missing header");
  {
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.header.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(parse_double(cell, where));
    require(row.size() == table.header.size(), ErrorKind::FormatError,
            where + ": expected " + std::to_string(table.header.size()) + " fields");
    rows.push_back(std::move(row));
  }
  table.rows.resize(static_cast<Index>(rows.size()), static_cast<Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.rows(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return table;
}

CsvTable points_table(const Matrix& points) {
  CsvTable table;
  for (Index a = 0; a < points.rows(); ++a) table.header.push_back("x" + std::to_string(a + 1));
  table.rows = points.transpose();
  return table;
}

Matrix points_from_table(const CsvTable& table) {
  require(!table.header.empty(), ErrorKind::FormatError, "CSV has no columns");
  return table.rows.transpose();
}

}  // namespace transferop::io
