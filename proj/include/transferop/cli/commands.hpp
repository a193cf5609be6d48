#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "transferop/cli/config.hpp"
#include "transferop/datasets.hpp"
#include "transferop/types.hpp"

namespace transferop::cli {

/// Per-invocation inputs that are not part of the experiment record.
struct Inputs {
  std::filesystem::path data;    ///< dataset prefix; empty means simulate from the config
  std::filesystem::path model;   ///< model prefix
  std::filesystem::path points;  ///< CSV with header x1,…,xd
  std::string grid;              ///< "lo:hi:count" per axis, comma separated
};

/// Builds the dataset described by [system] and [data].
SnapshotDataset simulate_dataset(const RunConfig& config);

/// Parses a grid spec such as "-2:2:401" or "-2:2:41,-1.5:2.5:41".
Matrix parse_grid_spec(const std::string& spec);

// Each command writes its artifacts under config.output.dir and a short
// summary to `out`. Errors propagate as transferop::Error.
void cmd_simulate(const RunConfig& config, std::ostream& out);
void cmd_fit(const RunConfig& config, const Inputs& inputs, std::ostream& out);
void cmd_fit_iterative(const RunConfig& config, const Inputs& inputs, std::ostream& out);
void cmd_ensemble(const RunConfig& config, const Inputs& inputs, std::ostream& out);
void cmd_eval(const RunConfig& config, const Inputs& inputs, std::ostream& out);
void cmd_cluster(const RunConfig& config, const Inputs& inputs, std::ostream& out);
void cmd_benchmark(const RunConfig& config, std::ostream& out);

}  // namespace transferop::cli
