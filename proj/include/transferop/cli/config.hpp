#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "transferop/types.hpp"

namespace transferop::cli {

struct SystemConfig {
  std::string name = "ou";
  double alpha = 1.0;
  std::optional<double> beta;
  int wells = 5;
  double omega = 1.0;
  double hbar = 1.0;
  double mass = 1.0;
};

struct DataConfig {
  Index m = 20000;
  std::optional<double> lag_time;
  std::optional<Index> lag_steps;
  std::optional<double> h;  ///< 0.005 for Langevin systems, 0.01 for the Bickley jet
  Index stride = 0;
  Index burn_in = 1000;
  std::uint64_t seed = 0;
  double t0 = 0.0;
  double t1 = 40.0;
  std::vector<double> lower{-5.0};
  std::vector<double> upper{5.0};
  std::string sampling = "uniform_random";
};

struct ModelConfig {
  std::vector<Index> widths{256, 512, 256};
  std::string activation = "tanh";
  std::string distribution = "normal";
  double weight_scale = 1.0;
  double bias_scale = 1.0;
  double tol = 1e-6;
  std::string mode = "koopman_eigen";
  Index n = 4;
  bool symmetrize = true;
  std::uint64_t seed = 0;
  Index chunk = 1024;
};

struct TrainingConfig {
  Index epochs = 100;
  double step = 1.0;
  double armijo = 1e-4;
  std::string optimizer = "backtracking";
  std::string output_activation = "tanh";
  std::uint64_t seed = 0;
};

struct EnsembleConfig {
  Index members = 10;
  std::uint64_t base_seed = 0;
  bool bootstrap = false;
  std::string eval = "data";      ///< data | grid
  Index eval_count = 2000;        ///< data mode: first points of the dataset
  std::vector<Index> grid{41, 41};
  std::vector<double> lower{-2.0, -1.5};
  std::vector<double> upper{2.0, 2.5};
};

struct ClusterConfig {
  int k = 5;
  bool include_first = true;
  bool weight_by_values = false;
  std::uint64_t seed = 0;
};

struct BenchmarkConfig {
  std::vector<std::string> systems{"ou", "lemon_slice", "triple_well"};
  int repeats = 3;
};

struct OutputConfig {
  std::string dir = ".";
};

struct RunConfig {
  SystemConfig system;
  DataConfig data;
  ModelConfig model;
  TrainingConfig training;
  EnsembleConfig ensemble;
  ClusterConfig cluster;
  BenchmarkConfig benchmark;
  OutputConfig output;
  std::string source;  ///< config file path, empty when defaults only
};

/// Sets "section.key" from its textual value. `where` prefixes diagnostics.
void set_value(RunConfig& config, const std::string& key, const std::string& value,
               const std::string& where);

/// Parses a config file with [section] headers, key = value lines, '#'
/// comments, quoted or bare strings and [a, b] arrays. Unknown keys are rejected.
void load_config_file(RunConfig& config, const std::filesystem::path& path);

/// Checks ranges and names; throws ConfigError naming the key.
void validate(const RunConfig& config);

/// Effective step size and lag steps for Langevin systems.
double langevin_step(const RunConfig& config);
Index langevin_lag_steps(const RunConfig& config);

/// Every "section.key" name, in section order.
std::vector<std::string> known_keys();

/// All keys with their current values, grouped by section.
nlohmann::json echo(const RunConfig& config);

/// Sets every seed (data, model, training, ensemble, cluster).
void set_all_seeds(RunConfig& config, std::uint64_t seed);

}  // namespace transferop::cli
