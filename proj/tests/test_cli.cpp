#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"
#include "transferop/cli/commands.hpp"
#include "transferop/cli/config.hpp"
#include "transferop/error.hpp"
#include "transferop/io.hpp"

using namespace transferop;
using namespace transferop::cli;
using transferop::testing::TempDir;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::string error_message(const std::function<void()>& f, ErrorKind expected) {
  try {
    f();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), expected) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "expected an Error";
  return {};
}

RunConfig tiny_ou(const std::filesystem::path& out) {
  RunConfig c;
  c.data.m = 600;
  c.data.lag_steps = 20;
  c.data.burn_in = 100;
  c.model.widths = {40};
  c.model.n = 3;
  c.output.dir = out.string();
  return c;
}

}  // namespace

TEST(Config, DefaultsValidate) {
  RunConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(langevin_lag_steps(c), 100);
  EXPECT_DOUBLE_EQ(langevin_step(c), 0.005);
}

TEST(Config, FileWithSectionsCommentsListsAndQuotes) {
  TempDir dir("cli_file");
  write_text(dir / "run.toml",
             "# experiment\n"
             "[system]\n"
             "name = \"triple_well\"   # trailing comment\n"
             "\n"
             "[data]\n"
             "m = 1234\n"
             "lag_time = 0.1\n"
             "lower = [-2, -1.5]\n"
             "upper = [2, 2.5]\n"
             "[model]\n"
             "widths = [16, 8]\n"
             "activation = 'gaussian'\n"
             "symmetrize = false\n"
             "tol = 1e-8\n"
             "[benchmark]\n"
             "systems = [\"ou\", \"lemon_slice\"]\n"
             "[output]\n"
             "dir = \"out#1\"\n");
  RunConfig c;
  load_config_file(c, dir / "run.toml");
  EXPECT_EQ(c.system.name, "triple_well");
  EXPECT_EQ(c.data.m, 1234);
  ASSERT_TRUE(c.data.lag_time.has_value());
  EXPECT_DOUBLE_EQ(*c.data.lag_time, 0.1);
  EXPECT_EQ(c.data.lower, (std::vector<double>{-2, -1.5}));
  EXPECT_EQ(c.model.widths, (std::vector<Index>{16, 8}));
  EXPECT_EQ(c.model.activation, "gaussian");
  EXPECT_FALSE(c.model.symmetrize);
  EXPECT_DOUBLE_EQ(c.model.tol, 1e-8);
  EXPECT_EQ(c.benchmark.systems, (std::vector<std::string>{"ou", "lemon_slice"}));
  EXPECT_EQ(c.output.dir, "out#1");
  EXPECT_EQ(c.source, (dir / "run.toml").string());
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(langevin_lag_steps(c), 20);
}

TEST(Config, UnknownKeysAndSectionsReportTheLine) {
  TempDir dir("cli_unknown");
  write_text(dir / "a.toml", "[model]\nn = 3\nbogus = 1\n");
  RunConfig c;
  const std::string msg = error_message([&] { load_config_file(c, dir / "a.toml"); },
                                        ErrorKind::ConfigError);
  EXPECT_NE(msg.find("a.toml:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("model.bogus"), std::string::npos) << msg;

  write_text(dir / "b.toml", "\n[solver]\n");
  const std::string msg2 = error_message([&] { load_config_file(c, dir / "b.toml"); },
                                         ErrorKind::ConfigError);
  EXPECT_NE(msg2.find("b.toml:2"), std::string::npos) << msg2;

  write_text(dir / "c.toml", "m = 5\n");
  error_message([&] { load_config_file(c, dir / "c.toml"); }, ErrorKind::ConfigError);

  write_text(dir / "d.toml", "[data]\nm = ten\n");
  error_message([&] { load_config_file(c, dir / "d.toml"); }, ErrorKind::ConfigError);

  error_message([&] { load_config_file(c, dir / "missing.toml"); }, ErrorKind::IoError);
}

TEST(Config, LaterValuesOverrideTheFile) {
  TempDir dir("cli_override");
  write_text(dir / "run.toml", "[data]\nseed = 4\n[model]\nn = 6\n");
  RunConfig c;
  load_config_file(c, dir / "run.toml");
  set_all_seeds(c, 11);
  set_value(c, "model.n", "2", "--n");
  set_value(c, "model.seed", "12", "--model-seed");
  EXPECT_EQ(c.model.n, 2);
  EXPECT_EQ(c.data.seed, 11u);
  EXPECT_EQ(c.model.seed, 12u);
  EXPECT_EQ(c.training.seed, 11u);
  EXPECT_EQ(c.ensemble.base_seed, 11u);
  EXPECT_EQ(c.cluster.seed, 11u);
}

TEST(Config, ValidationRejectsOutOfRangeValues) {
  const std::vector<std::pair<std::string, std::string>> bad = {
      {"data.m", "0"},           {"cluster.k", "1"},         {"ensemble.members", "1"},
      {"model.tol", "0"},        {"model.mode", "svd"},       {"system.name", "lorenz"},
      {"model.activation", "x"}, {"benchmark.repeats", "2"},  {"data.lag_time", "0.0123"},
      {"model.widths", "[]"},    {"benchmark.systems", "qho"}, {"training.armijo", "1"},
  };
  for (const auto& [key, value] : bad) {
    RunConfig c;
    set_value(c, key, value, "test");
    const std::string msg = error_message([&] { validate(c); }, ErrorKind::ConfigError);
    EXPECT_NE(msg.find(key), std::string::npos) << key << ": " << msg;
  }
}

TEST(Config, LagStepsAndLagTimeMustAgree) {
  RunConfig c;
  c.data.lag_time = 0.5;
  EXPECT_EQ(langevin_lag_steps(c), 100);
  c.data.lag_steps = 100;
  EXPECT_EQ(langevin_lag_steps(c), 100);
  c.data.lag_steps = 50;
  error_message([&] { langevin_lag_steps(c); }, ErrorKind::ConfigError);
  c.data.lag_steps.reset();
  c.data.h = 0.01;
  EXPECT_EQ(langevin_lag_steps(c), 50);
}

TEST(Config, EchoCoversEveryKnownKey) {
  RunConfig c;
  const auto j = echo(c);
  for (const auto& key : known_keys()) {
    const auto dot = key.find('.');
    ASSERT_TRUE(j.contains(key.substr(0, dot))) << key;
    EXPECT_TRUE(j[key.substr(0, dot)].contains(key.substr(dot + 1))) << key;
  }
  EXPECT_TRUE(j["data"]["lag_time"].is_null());
  EXPECT_EQ(j["model"]["widths"], nlohmann::json({256, 512, 256}));
}

TEST(GridSpec, ParsesAxesAndRejectsMalformedInput) {
  const Matrix g = parse_grid_spec("-2:2:5");
  ASSERT_EQ(g.rows(), 1);
  ASSERT_EQ(g.cols(), 5);
  EXPECT_DOUBLE_EQ(g(0, 1), -1.0);
  const Matrix g2 = parse_grid_spec("0:1:3,10:20:2");
  EXPECT_EQ(g2.rows(), 2);
  EXPECT_EQ(g2.cols(), 6);
  EXPECT_DOUBLE_EQ(g2(1, 5), 20.0);
  EXPECT_THROW(parse_grid_spec("0:1"), Error);
  EXPECT_THROW(parse_grid_spec("a:1:3"), Error);
  EXPECT_THROW(parse_grid_spec("0:1:0"), Error);
  EXPECT_THROW(parse_grid_spec("2:1:3"), Error);
}

TEST(Commands, SimulateFitEvalPipeline) {
  TempDir dir("cli_pipeline");
  RunConfig c = tiny_ou(dir.path());
  validate(c);
  std::ostringstream log;
  cmd_simulate(c, log);
  ASSERT_TRUE(std::filesystem::exists(dir / "dataset.X.topd"));

  Inputs in;
  in.data = dir / "dataset";
  cmd_fit(c, in, log);
  const auto report = nlohmann::json::parse(io::read_file(dir / "report.json"));
  EXPECT_EQ(report["command"], "fit");
  EXPECT_EQ(report["values"].size(), 3u);
  // Constants are only approximately in the span of 40 tanh features.
  EXPECT_NEAR(report["values"][0].get<double>(), 1.0, 1e-3);
  EXPECT_EQ(report["config"]["model"]["n"], 3);

  // Fitting from the saved dataset matches fitting from a fresh simulation.
  const auto first_values = report["values"];
  cmd_fit(c, Inputs{}, log);
  const auto again = nlohmann::json::parse(io::read_file(dir / "report.json"));
  EXPECT_EQ(again["values"], first_values);

  Inputs ev;
  ev.model = dir / "model";
  ev.grid = "-1:1:11";
  cmd_eval(c, ev, log);
  const auto table = io::read_csv(dir / "eval.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"x1", "phi_1", "phi_2", "phi_3"}));
  EXPECT_EQ(table.rows.rows(), 11);

  ev.grid = "-1:1:3,-1:1:3";
  error_message([&] { cmd_eval(c, ev, log); }, ErrorKind::InvalidShape);
}

TEST(Commands, SchrodingerModeNeedsUnpairedData) {
  TempDir dir("cli_mode");
  RunConfig c = tiny_ou(dir.path());
  c.model.mode = "schrodinger";
  std::ostringstream log;
  error_message([&] { cmd_fit(c, Inputs{}, log); }, ErrorKind::ModeMismatch);
}
