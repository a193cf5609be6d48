#include "transferop/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <Eigen/Core>
#include <json.hpp>

#include "transferop/analysis.hpp"
#include "transferop/ensemble_uq.hpp"
#include "transferop/error.hpp"
#include "transferop/io.hpp"
#include "transferop/operator_learning.hpp"

#ifndef TRANSFEROP_VERSION
#define TRANSFEROP_VERSION "unknown"
#endif

namespace transferop::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json library_info() {
  return {{"name", "transferop"},
          {"version", TRANSFEROP_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)}};
}

void write_json(const fs::path& path, const json& doc) {
  io::write_file_atomic(path, doc.dump(2) + "\n");
}

fs::path out_dir(const RunConfig& config) { return fs::path(config.output.dir); }

bool is_langevin(const std::string& name) {
  return name == "ou" || name == "lemon_slice" || name == "triple_well";
}

PotentialParams potential_params(const RunConfig& config) {
  PotentialParams p;
  p.alpha = config.system.alpha;
  p.beta = config.system.beta;
  p.wells = config.system.wells;
  p.omega = config.system.omega;
  return p;
}

SnapshotDataset simulate_system(const RunConfig& config, const std::string& name) {
  const auto& d = config.data;
  if (is_langevin(name)) {
    LangevinSpec spec;
    spec.m = d.m;
    spec.lag_steps = langevin_lag_steps(config);
    spec.stride = d.stride;
    spec.h = langevin_step(config);
    spec.burn_in = d.burn_in;
    spec.seed = d.seed;
    return simulate_langevin(builtin_potential(name, potential_params(config)), spec);
  }
  if (name == "bickley") return bickley_trajectories(d.m, d.t0, d.t1, d.h.value_or(0.01), d.seed);
  // Standalone samples for the Schrödinger branch.
  Box box{Eigen::Map<const Vector>(d.lower.data(), static_cast<Index>(d.lower.size())),
          Eigen::Map<const Vector>(d.upper.data(), static_cast<Index>(d.upper.size()))};
  SnapshotDataset data = sample_grid(box, d.m, parse_grid_mode(d.sampling), d.seed);
  data.source.system = name;
  data.source.params.emplace_back("omega", config.system.omega);
  return data;
}

struct LoadedData {
  SnapshotDataset data;
  std::string path;  ///< empty when simulated
  double seconds = 0.0;
};

LoadedData obtain_dataset(const RunConfig& config, const Inputs& inputs) {
  const auto start = Clock::now();
  LoadedData loaded;
  if (!inputs.data.empty()) {
    loaded.data = io::load_dataset(inputs.data);
    loaded.path = inputs.data.string();
  } else {
    loaded.data = simulate_dataset(config);
  }
  loaded.seconds = seconds_since(start);
  return loaded;
}

json dataset_json(const LoadedData& loaded) {
  const auto& d = loaded.data;
  return {{"path", loaded.path.empty() ? json(nullptr) : json(loaded.path)},
          {"system", d.source.system},
          {"seed", d.source.seed},
          {"m", d.size()},
          {"d", d.dim()},
          {"paired", d.paired()},
          {"lag_time", d.lag_time}};
}

Distribution distribution_of(const RunConfig& config) {
  Distribution dist;
  dist.family = parse_weight_family(config.model.distribution);
  dist.weight_scale = config.model.weight_scale;
  dist.bias_scale = config.model.bias_scale;
  return dist;
}

RandomFeatureMap build_rfm(const RunConfig& config, Index input_dim) {
  return RandomFeatureMap::sample(input_dim, config.model.widths,
                                  Activation::parse(config.model.activation),
                                  distribution_of(config), config.model.seed);
}

HamiltonianSpec hamiltonian_of(const RunConfig& config, Index dim) {
  if (config.system.name == "bickley") {
    fail(ErrorKind::ConfigError, "system.name: schrodinger mode needs a potential, not 'bickley'");
  }
  PotentialSystem system = builtin_potential(config.system.name, potential_params(config));
  require(system.dim == dim, ErrorKind::InvalidShape,
          "potential '" + system.name + "' is " + std::to_string(system.dim) +
              "-dimensional but the data has dimension " + std::to_string(dim));
  return HamiltonianSpec{system.potential, config.system.hbar, config.system.mass};
}

FitOptions fit_options(const RunConfig& config) {
  FitOptions options;
  options.tol = config.model.tol;
  options.symmetrize = config.model.symmetrize;
  options.chunk = config.model.chunk;
  return options;
}

SpectralModel fit_by_mode(const RunConfig& config, const RandomFeatureMap& rfm,
                          const SnapshotDataset& data, FitTimings& timings) {
  const FitOptions options = fit_options(config);
  switch (parse_mode(config.model.mode)) {
    case SpectralMode::KoopmanEigen:
      return fit_eigen(rfm, data, config.model.n, options, &timings);
    case SpectralMode::Singular:
      return fit_singular(rfm, data, config.model.n, options, &timings);
    case SpectralMode::Schrodinger:
      return fit_schrodinger(rfm, data, config.model.n, hamiltonian_of(config, data.dim()), options,
                             &timings);
  }
  fail(ErrorKind::InvalidArgument, "unhandled mode");
}

IterativeOptions iterative_options(const RunConfig& config) {
  IterativeOptions options;
  options.epochs = config.training.epochs;
  options.step = config.training.step;
  options.armijo = config.training.armijo;
  options.seed = config.training.seed;
  options.output = parse_output_activation(config.training.output_activation);
  options.tol = config.model.tol;
  options.symmetrize = config.model.symmetrize;
  options.chunk = config.model.chunk;
  return options;
}

json seeds_json(const RunConfig& config, const SnapshotDataset& data) {
  return {{"data", data.source.seed},
          {"model", config.model.seed},
          {"training", config.training.seed},
          {"ensemble_base", config.ensemble.base_seed},
          {"cluster", config.cluster.seed}};
}

Matrix points_input(const Inputs& inputs, Index expected_dim) {
  const int sources = int(!inputs.grid.empty()) + int(!inputs.data.empty()) +
                      int(!inputs.points.empty());
  require(sources == 1, ErrorKind::InvalidArgument,
          "give exactly one of --grid, --data or --points");
  Matrix x;
  if (!inputs.grid.empty()) {
    x = parse_grid_spec(inputs.grid);
  } else if (!inputs.data.empty()) {
    x = io::load_dataset(inputs.data).x;
  } else {
    x = io::points_from_table(io::read_csv(inputs.points));
  }
  require(x.rows() == expected_dim, ErrorKind::InvalidShape,
          "points have dimension " + std::to_string(x.rows()) + " but the model expects " +
              std::to_string(expected_dim));
  return x;
}

std::vector<std::string> coordinate_header(Index d) {
  std::vector<std::string> header;
  for (Index a = 0; a < d; ++a) header.push_back("x" + std::to_string(a + 1));
  return header;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fixed(double value, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << value;
  return s.str();
}

}  // namespace

SnapshotDataset simulate_dataset(const RunConfig& config) {
  return simulate_system(config, config.system.name);
}

Matrix parse_grid_spec(const std::string& spec) {
  std::vector<double> lower, upper;
  std::vector<Index> counts;
  std::stringstream axes(spec);
  std::string axis;
  while (std::getline(axes, axis, ',')) {
    std::stringstream parts(axis);
    std::string lo, hi, count;
    if (!std::getline(parts, lo, ':') || !std::getline(parts, hi, ':') ||
        !std::getline(parts, count) || count.find(':') != std::string::npos) {
      fail(ErrorKind::InvalidArgument, "grid axis '" + axis + "' is not lo:hi:count");
    }
    try {
      std::size_t used = 0;
      lower.push_back(std::stod(lo, &used));
      upper.push_back(std::stod(hi));
      const long long c = std::stoll(count);
      require(c >= 1, ErrorKind::InvalidArgument, "grid count must be at least 1");
      counts.push_back(static_cast<Index>(c));
    } catch (const std::logic_error&) {
      fail(ErrorKind::InvalidArgument, "grid axis '" + axis + "' is not lo:hi:count");
    }
    require(lower.back() <= upper.back(), ErrorKind::InvalidDomain,
            "grid axis '" + axis + "' has lo > hi");
  }
  require(!counts.empty(), ErrorKind::InvalidArgument, "empty grid spec");
  const Index d = static_cast<Index>(counts.size());
  Box box{Eigen::Map<const Vector>(lower.data(), d), Eigen::Map<const Vector>(upper.data(), d)};
  return regular_grid(box, counts);
}

void cmd_simulate(const RunConfig& config, std::ostream& out) {
  const auto start = Clock::now();
  const SnapshotDataset data = simulate_dataset(config);
  const double elapsed = seconds_since(start);
  const fs::path prefix = out_dir(config) / "dataset";
  io::save_dataset(prefix, data);

  json report = {{"command", "simulate"},
                 {"library", library_info()},
                 {"config", echo(config)},
                 {"dataset", dataset_json({data, prefix.string(), elapsed})},
                 {"seeds", seeds_json(config, data)},
                 {"timings", {{"simulate", elapsed}, {"total", seconds_since(start)}}},
                 {"artifacts", {{"dataset", prefix.string()}}}};
  write_json(out_dir(config) / "simulate.json", report);

  out << "simulated " << data.source.system << ": m=" << data.size() << " d=" << data.dim();
  if (data.paired()) out << " tau=" << data.lag_time;
  out << " -> " << prefix.string() << "\n";
}

void cmd_fit(const RunConfig& config, const Inputs& inputs, std::ostream& out) {
  const LoadedData loaded = obtain_dataset(config, inputs);
  const auto start = Clock::now();
  const RandomFeatureMap rfm = build_rfm(config, loaded.data.dim());
  FitTimings timings;
  const SpectralModel model = fit_by_mode(config, rfm, loaded.data, timings);
  const double fit_total = seconds_since(start);

  const fs::path prefix = out_dir(config) / "model";
  io::save_model(prefix, model);
  const fs::path report_path = out_dir(config) / "report.json";
  json report = {
      {"command", "fit"},
      {"library", library_info()},
      {"config", echo(config)},
      {"dataset", dataset_json(loaded)},
      {"seeds", seeds_json(config, loaded.data)},
      {"mode", std::string(to_string(model.mode))},
      {"values", to_json(model.values)},
      {"rank", model.rank},
      {"truncated", model.truncated},
      {"feature_dim", rfm.output_dim()},
      {"timings",
       {{loaded.path.empty() ? "simulate" : "load", loaded.seconds},
        {"featurize", timings.featurize},
        {"covariances", timings.covariances},
        {"solve", timings.solve},
        {"total", fit_total}}},
      {"artifacts",
       {{"model_rfm", prefix.string() + ".rfm"},
        {"model_spm", prefix.string() + ".spm"},
        {"report", report_path.string()}}}};
  write_json(report_path, report);

  out << to_string(model.mode) << " fit: N=" << rfm.output_dim() << " m=" << loaded.data.size()
      << " rank=" << model.rank << (model.truncated ? " (truncated)" : "") << "\n";
  for (Index i = 0; i < model.size(); ++i) {
    out << "  value[" << i << "] = " << io::format_double(model.values(i)) << "\n";
  }
  out << "  fit time " << fixed(fit_total, 3) << " s -> " << report_path.string() << "\n";
}

void cmd_fit_iterative(const RunConfig& config, const Inputs& inputs, std::ostream& out) {
  require(parse_mode(config.model.mode) == SpectralMode::KoopmanEigen, ErrorKind::ConfigError,
          "model.mode: fit-iterative trains eigenfunction bases only (koopman_eigen)");
  const LoadedData loaded = obtain_dataset(config, inputs);
  const auto start = Clock::now();
  const RandomFeatureMap rfm = build_rfm(config, loaded.data.dim());
  const TrainedBasisModel trained =
      fit_iterative_basis(rfm, loaded.data, config.model.n, iterative_options(config));
  const double train_total = seconds_since(start);

  const fs::path prefix = out_dir(config) / "model";
  io::save_model(prefix, trained.spectral);
  const fs::path report_path = out_dir(config) / "report.json";
  json report = {
      {"command", "fit-iterative"},
      {"library", library_info()},
      {"config", echo(config)},
      {"dataset", dataset_json(loaded)},
      {"seeds", seeds_json(config, loaded.data)},
      {"mode", std::string(to_string(trained.spectral.mode))},
      {"values", to_json(trained.spectral.values)},
      {"rank", trained.spectral.rank},
      {"truncated", trained.spectral.truncated},
      {"feature_dim", rfm.output_dim()},
      {"loss_history", trained.loss_history},
      {"accepted_steps", trained.accepted},
      {"rejected_steps", trained.rejected},
      {"timings",
       {{loaded.path.empty() ? "simulate" : "load", loaded.seconds},
        {"train", train_total},
        {"total", train_total}}},
      {"artifacts",
       {{"model_rfm", prefix.string() + ".rfm"},
        {"model_spm", prefix.string() + ".spm"},
        {"report", report_path.string()}}}};
  write_json(report_path, report);

  out << "iterative fit: N=" << rfm.output_dim() << " n=" << config.model.n
      << " epochs=" << config.training.epochs << " accepted=" << trained.accepted
      << " rejected=" << trained.rejected << "\n";
  out << "  loss " << io::format_double(trained.loss_history.front()) << " -> "
      << io::format_double(trained.loss_history.back()) << "\n";
  for (Index i = 0; i < trained.spectral.size(); ++i) {
    out << "  value[" << i << "] = " << io::format_double(trained.spectral.values(i)) << "\n";
  }
  out << "  train time " << fixed(train_total, 3) << " s -> " << report_path.string() << "\n";
}

void cmd_ensemble(const RunConfig& config, const Inputs& inputs, std::ostream& out) {
  const LoadedData loaded = obtain_dataset(config, inputs);
  const auto& e = config.ensemble;

  Matrix eval;
  if (e.eval == "grid") {
    const Index d = static_cast<Index>(e.grid.size());
    Box box{Eigen::Map<const Vector>(e.lower.data(), d), Eigen::Map<const Vector>(e.upper.data(), d)};
    eval = regular_grid(box, e.grid);
    require(eval.rows() == loaded.data.dim(), ErrorKind::InvalidShape,
            "ensemble.grid has " + std::to_string(d) + " axes but the data has dimension " +
                std::to_string(loaded.data.dim()));
  } else {
    eval = loaded.data.x.leftCols(std::min(e.eval_count, loaded.data.size()));
  }

  MemberSpec spec;
  spec.mode = parse_mode(config.model.mode);
  spec.n = config.model.n;
  spec.widths = config.model.widths;
  spec.activation = Activation::parse(config.model.activation);
  spec.distribution = distribution_of(config);
  spec.fit = fit_options(config);
  if (spec.mode == SpectralMode::Schrodinger) {
    spec.hamiltonian = hamiltonian_of(config, loaded.data.dim());
  }
  spec.bootstrap = e.bootstrap;

  const auto start = Clock::now();
  const EnsembleSummary summary = fit_ensemble(loaded.data, spec, e.members, e.base_seed, eval);
  const double elapsed = seconds_since(start);

  const Index n = summary.value_mean.size();
  const Index d = eval.rows();
  const Index k = eval.cols();
  io::CsvTable table;
  table.header = {"index"};
  for (const auto& name : coordinate_header(d)) table.header.push_back(name);
  for (Index i = 0; i < n; ++i) table.header.push_back("mean_" + std::to_string(i + 1));
  for (Index i = 0; i < n; ++i) table.header.push_back("var_" + std::to_string(i + 1));
  table.rows.resize(k, 1 + d + 2 * n);
  for (Index j = 0; j < k; ++j) {
    table.rows(j, 0) = static_cast<double>(j);
    table.rows.block(j, 1, 1, d) = eval.col(j).transpose();
    table.rows.block(j, 1 + d, 1, n) = summary.function_mean.col(j).transpose();
    table.rows.block(j, 1 + d + n, 1, n) = summary.function_var.col(j).transpose();
  }
  const fs::path csv_path = out_dir(config) / "ensemble.csv";
  io::write_csv(csv_path, table);

  json members = json::array();
  for (const auto& member : summary.members) {
    json entry = {{"seed", member.seed}, {"ok", member.ok}};
    if (member.ok) {
      entry["values"] = to_json(member.values);
      entry["slot_of"] = member.slot_of;
      entry["signs"] = member.signs;
      entry["ambiguous"] = member.ambiguous;
    } else {
      entry["error"] = member.error;
    }
    members.push_back(entry);
  }
  const fs::path json_path = out_dir(config) / "ensemble.json";
  json sidecar = {{"command", "ensemble"},
                  {"library", library_info()},
                  {"config", echo(config)},
                  {"dataset", dataset_json(loaded)},
                  {"seeds", seeds_json(config, loaded.data)},
                  {"member_count", summary.member_count},
                  {"requested_members", e.members},
                  {"reference_seed", summary.reference_seed},
                  {"eval_points", k},
                  {"value_mean", to_json(summary.value_mean)},
                  {"value_std", to_json(summary.value_std)},
                  {"alignment", members},
                  {"timings", {{loaded.path.empty() ? "simulate" : "load", loaded.seconds},
                               {"ensemble", elapsed}}},
                  {"artifacts", {{"csv", csv_path.string()}, {"sidecar", json_path.string()}}}};
  write_json(json_path, sidecar);

  out << "ensemble: " << summary.member_count << "/" << e.members << " members, reference seed "
      << summary.reference_seed << ", " << k << " evaluation points\n";
  for (Index i = 0; i < n; ++i) {
    out << "  value[" << i << "] mean " << io::format_double(summary.value_mean(i)) << " std "
        << io::format_double(summary.value_std(i)) << "\n";
  }
  out << "  -> " << csv_path.string() << "\n";
}

void cmd_eval(const RunConfig& config, const Inputs& inputs, std::ostream& out) {
  require(!inputs.model.empty(), ErrorKind::InvalidArgument, "eval needs --model");
  const SpectralModel model = io::load_model(inputs.model);
  const Matrix x = points_input(inputs, model.rfm.input_dim());
  const Matrix phi = evaluate_functions(model, x);

  io::CsvTable table;
  table.header = coordinate_header(x.rows());
  for (Index i = 0; i < phi.rows(); ++i) table.header.push_back("phi_" + std::to_string(i + 1));
  table.rows.resize(x.cols(), x.rows() + phi.rows());
  table.rows.leftCols(x.rows()) = x.transpose();
  table.rows.rightCols(phi.rows()) = phi.transpose();
  const fs::path path = out_dir(config) / "eval.csv";
  io::write_csv(path, table);
  out << "evaluated " << phi.rows() << " functions at " << x.cols() << " points -> "
      << path.string() << "\n";
}

void cmd_cluster(const RunConfig& config, const Inputs& inputs, std::ostream& out) {
  require(!inputs.model.empty(), ErrorKind::InvalidArgument, "cluster needs --model");
  require(!inputs.data.empty() || !inputs.points.empty(), ErrorKind::InvalidArgument,
          "cluster needs --data or --points");
  const SpectralModel model = io::load_model(inputs.model);
  Inputs points_only = inputs;
  points_only.grid.clear();
  if (!points_only.data.empty()) points_only.points.clear();
  const Matrix x = points_input(points_only, model.rfm.input_dim());
  const auto& c = config.cluster;
  const ClusterAssignment assignment =
      spectral_cluster(model, x, c.k, c.include_first, c.seed, c.weight_by_values);

  io::CsvTable table;
  table.header = {"index"};
  for (const auto& name : coordinate_header(x.rows())) table.header.push_back(name);
  table.header.push_back("label");
  table.rows.resize(x.cols(), x.rows() + 2);
  std::vector<Index> sizes(static_cast<std::size_t>(c.k), 0);
  for (Index j = 0; j < x.cols(); ++j) {
    const int label = assignment.labels[static_cast<std::size_t>(j)];
    table.rows(j, 0) = static_cast<double>(j);
    table.rows.block(j, 1, 1, x.rows()) = x.col(j).transpose();
    table.rows(j, x.rows() + 1) = label;
    ++sizes[static_cast<std::size_t>(label)];
  }
  const fs::path csv_path = out_dir(config) / "clusters.csv";
  io::write_csv(csv_path, table);
  const fs::path json_path = out_dir(config) / "clusters.json";
  write_json(json_path, {{"command", "cluster"},
                         {"library", library_info()},
                         {"config", echo(config)},
                         {"model", inputs.model.string()},
                         {"k", c.k},
                         {"points", x.cols()},
                         {"inertia", assignment.inertia},
                         {"restart", assignment.restart},
                         {"cluster_sizes", sizes},
                         {"artifacts", {{"csv", csv_path.string()}}}});

  out << "k-means with k=" << c.k << ": inertia " << io::format_double(assignment.inertia)
      << ", sizes";
  for (Index s : sizes) out << " " << s;
  out << " -> " << csv_path.string() << "\n";
}

void cmd_benchmark(const RunConfig& config, std::ostream& out) {
  struct Row {
    std::string system;
    double closed = NAN;
    double iterative = NAN;
    std::string status = "ok";
    json closed_values = nullptr;
    json iterative_values = nullptr;
  };
  std::vector<Row> rows;
  const Index n = config.model.n;
  for (const auto& name : config.benchmark.systems) {
    Row row;
    row.system = name;
    try {
      RunConfig cell = config;
      cell.system.name = name;
      const SnapshotDataset data = simulate_system(cell, name);
      const RandomFeatureMap rfm = build_rfm(cell, data.dim());
      std::vector<double> closed_times, iterative_times;
      for (int r = 0; r < config.benchmark.repeats; ++r) {
        try {
          const auto start = Clock::now();
          const SpectralModel model = fit_eigen(rfm, data, n, fit_options(cell));
          closed_times.push_back(seconds_since(start));
          row.closed_values = to_json(model.values);
        } catch (const Error& e) {
          row.status = "closed-form " + std::string(e.name()) + ": " + e.what();
          break;
        }
      }
      for (int r = 0; r < config.benchmark.repeats; ++r) {
        try {
          const auto start = Clock::now();
          const TrainedBasisModel trained =
              fit_iterative_basis(rfm, data, n, iterative_options(cell));
          iterative_times.push_back(seconds_since(start));
          row.iterative_values = to_json(trained.spectral.values);
        } catch (const Error& e) {
          row.status = "iterative " + std::string(e.name()) + ": " + e.what();
          break;
        }
      }
      if (!closed_times.empty()) row.closed = median(closed_times);
      if (!iterative_times.empty()) row.iterative = median(iterative_times);
    } catch (const Error& e) {
      row.status = std::string(e.name()) + ": " + e.what();
    }
    rows.push_back(row);
  }

  Index feature_dim = config.model.widths.back();
  std::ostringstream csv;
  csv << "system,m,N,closed_form_seconds,iterative_seconds,speedup,status\n";
  json cells = json::array();
  for (const auto& row : rows) {
    const double speedup = row.iterative / row.closed;
    std::string status = row.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    csv << row.system << "," << config.data.m << "," << feature_dim << ","
        << io::format_double(row.closed) << "," << io::format_double(row.iterative) << ","
        << io::format_double(speedup) << "," << status << "\n";
    cells.push_back({{"system", row.system},
                     {"closed_form_seconds", std::isnan(row.closed) ? json(nullptr) : json(row.closed)},
                     {"iterative_seconds",
                      std::isnan(row.iterative) ? json(nullptr) : json(row.iterative)},
                     {"closed_form_values", row.closed_values},
                     {"iterative_values", row.iterative_values},
                     {"status", row.status}});
  }
  const fs::path csv_path = out_dir(config) / "benchmark.csv";
  io::write_file_atomic(csv_path, csv.str());
  write_json(out_dir(config) / "benchmark.json",
             {{"command", "benchmark"},
              {"library", library_info()},
              {"config", echo(config)},
              {"repeats", config.benchmark.repeats},
              {"rows", cells},
              {"artifacts", {{"csv", csv_path.string()}}}});

  out << "median of " << config.benchmark.repeats << " repetitions, m=" << config.data.m
      << ", N=" << feature_dim << ", " << config.training.epochs << " epochs\n";
  out << std::left << std::setw(14) << "system" << std::right << std::setw(16) << "closed-form s"
      << std::setw(16) << "iterative s" << std::setw(12) << "speedup"
      << "  status\n";
  for (const auto& row : rows) {
    out << std::left << std::setw(14) << row.system << std::right << std::setw(16)
        << fixed(row.closed, 3) << std::setw(16) << fixed(row.iterative, 3) << std::setw(12)
        << fixed(row.iterative / row.closed, 1) << "  " << row.status << "\n";
  }
  out << "-> " << csv_path.string() << "\n";
}

}  // namespace transferop::cli
