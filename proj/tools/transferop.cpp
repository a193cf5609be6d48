// transferop command-line front end.
//
//   transferop {simulate|fit|fit-iterative|ensemble|eval|cluster|benchmark}
//              [--config PATH] [--seed S] [--out DIR] [--threads T] [--<key> VALUE ...]
//
// Every config key "section.name" is also a flag --section-name; keys whose
// last component is unique get a short form (--alpha, --lag-time, --epochs).
// Exit codes: 0 success, 2 invalid input, 3 numerical or solver failure.

#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "transferop/cli/commands.hpp"
#include "transferop/cli/config.hpp"
#include "transferop/error.hpp"

namespace {

using namespace transferop;

std::string flag_form(std::string text) {
  for (char& ch : text) {
    if (ch == '_' || ch == '.') ch = '-';
  }
  return text;
}

struct KeyFlag {
  std::string key;
  std::string names;  // CLI11 name list
  std::optional<std::string> value;
};

std::vector<KeyFlag> key_flags() {
  const auto keys = cli::known_keys();
  std::map<std::string, int> last_count;
  for (const auto& key : keys) ++last_count[key.substr(key.find('.') + 1)];
  std::vector<KeyFlag> flags;
  for (const auto& key : keys) {
    const std::string last = key.substr(key.find('.') + 1);
    std::string names = "--" + flag_form(key);
    if (key == "system.name") {
      names += ",--system";
    } else if (key == "output.dir") {
      continue;  // --out
    } else if (last_count[last] == 1 && last != "name") {
      names += ",--" + flag_form(last);
    }
    flags.push_back({key, names, std::nullopt});
  }
  return flags;
}

int exit_code_for(ErrorKind kind) { return is_validation_error(kind) ? 2 : 3; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transfer-operator spectra from random feature maps"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<int> threads;
  app.add_option("--config", config_path, "Config file with [section] key = value entries");
  app.add_option("--seed", seed, "Seed for data, model, training, ensemble and clustering");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker threads (default: TRANSFEROP_THREADS)")
      ->check(CLI::PositiveNumber);

  std::vector<KeyFlag> flags = key_flags();
  for (auto& flag : flags) {
    app.add_option(flag.names, flag.value, "Sets " + flag.key)->group("Config overrides");
  }

  cli::Inputs inputs;
  std::string data_path, model_path, points_path;
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", data_path, "Dataset prefix (default: simulate from the config)");
  };
  auto* simulate = app.add_subcommand("simulate", "Generate a dataset");
  auto* fit = app.add_subcommand("fit", "Closed-form spectral fit");
  auto* fit_iter = app.add_subcommand("fit-iterative", "Gradient-trained basis for comparison");
  auto* ensemble = app.add_subcommand("ensemble", "Ensemble of independently sampled maps");
  auto* eval = app.add_subcommand("eval", "Evaluate a fitted model on points");
  auto* cluster = app.add_subcommand("cluster", "k-means on spectral coordinates");
  auto* bench = app.add_subcommand("benchmark", "Closed-form vs iterative fit timings");
  add_data(fit);
  add_data(fit_iter);
  add_data(ensemble);
  for (auto* sub : {eval, cluster}) {
    sub->add_option("--model", model_path, "Model prefix")->required();
    sub->add_option("--data", data_path, "Dataset prefix whose X columns are the points");
    sub->add_option("--points", points_path, "CSV file with header x1,...,xd");
  }
  eval->add_option("--grid", inputs.grid, "Regular grid lo:hi:count[,lo:hi:count...]");
  (void)simulate;
  (void)bench;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cli::RunConfig config;
    if (!config_path.empty()) cli::load_config_file(config, config_path);
    if (seed) cli::set_all_seeds(config, *seed);
    for (const auto& flag : flags) {
      if (flag.value) cli::set_value(config, flag.key, *flag.value, "--" + flag_form(flag.key));
    }
    if (!out_dir.empty()) config.output.dir = out_dir;
    cli::validate(config);

    if (!threads) {
      if (const char* env = std::getenv("TRANSFEROP_THREADS")) {
        try {
          threads = std::stoi(env);
        } catch (const std::exception&) {
          fail(ErrorKind::ConfigError, "TRANSFEROP_THREADS: not an integer");
        }
        require(*threads >= 1, ErrorKind::ConfigError, "TRANSFEROP_THREADS: must be positive");
      }
    }
    if (threads) omp_set_num_threads(*threads);

    inputs.data = data_path;
    inputs.model = model_path;
    inputs.points = points_path;

    if (simulate->parsed()) cli::cmd_simulate(config, std::cout);
    else if (fit->parsed()) cli::cmd_fit(config, inputs, std::cout);
    else if (fit_iter->parsed()) cli::cmd_fit_iterative(config, inputs, std::cout);
    else if (ensemble->parsed()) cli::cmd_ensemble(config, inputs, std::cout);
    else if (eval->parsed()) cli::cmd_eval(config, inputs, std::cout);
    else if (cluster->parsed()) cli::cmd_cluster(config, inputs, std::cout);
    else cli::cmd_benchmark(config, std::cout);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
