#include "transferop/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "transferop/activation.hpp"
#include "transferop/datasets.hpp"
#include "transferop/error.hpp"
#include "transferop/operator_learning.hpp"
#include "transferop/random_features.hpp"

namespace transferop::cli {
namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& where, const std::string& message) {
  fail(ErrorKind::ConfigError, where.empty() ? message : where + ": " + message);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// "[a, b]" or "a,b" → {"a", "b"}; an empty list is "[]".
std::vector<std::string> split_list(const std::string& text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') throw std::invalid_argument("unterminated list");
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  if (trim(body).empty()) return items;
  std::stringstream stream(body);
  std::string item;
  while (std::getline(stream, item, ',')) items.push_back(unquote(trim(item)));
  return items;
}

double parse_real(const std::string& text) {
  const std::string t = unquote(trim(text));
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  double value = 0.0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw std::invalid_argument("expected a number, got '" + t + "'");
  }
  return value;
}

long long parse_integer(const std::string& text) {
  const std::string t = unquote(trim(text));
  long long value = 0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw std::invalid_argument("expected an integer, got '" + t + "'");
  }
  return value;
}

std::uint64_t parse_seed(const std::string& text) {
  const std::string t = unquote(trim(text));
  std::uint64_t value = 0;
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + t + "'");
  }
  return value;
}

bool parse_bool(const std::string& text) {
  const std::string t = unquote(trim(text));
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + t + "'");
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_real(item));
  return out;
}

std::vector<Index> parse_counts(const std::string& text) {
  std::vector<Index> out;
  for (const auto& item : split_list(text)) out.push_back(static_cast<Index>(parse_integer(item)));
  return out;
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<json(const RunConfig&)> get;
};

#define TOP_REAL(key, member) \
  Field{key, [](RunConfig& c, const std::string& v) { c.member = parse_real(v); }, \
        [](const RunConfig& c) { return json(c.member); }}
#define TOP_INT(key, member, type) \
  Field{key, [](RunConfig& c, const std::string& v) { c.member = static_cast<type>(parse_integer(v)); }, \
        [](const RunConfig& c) { return json(c.member); }}
#define TOP_SEED(key, member) \
  Field{key, [](RunConfig& c, const std::string& v) { c.member = parse_seed(v); }, \
        [](const RunConfig& c) { return json(c.member); }}
#define TOP_BOOL(key, member) \
  Field{key, [](RunConfig& c, const std::string& v) { c.member = parse_bool(v); }, \
        [](const RunConfig& c) { return json(c.member); }}
#define TOP_STRING(key, member) \
  Field{key, [](RunConfig& c, const std::string& v) { c.member = unquote(trim(v)); }, \
        [](const RunConfig& c) { return json(c.member); }}
#define TOP_REALS(key, member) \
  Field{key, [](RunConfig& c, const std::string& v) { c.member = parse_reals(v); }, \
        [](const RunConfig& c) { return json(c.member); }}
#define TOP_COUNTS(key, member) \
  Field{key, [](RunConfig& c, const std::string& v) { c.member = parse_counts(v); }, \
        [](const RunConfig& c) { return json(c.member); }}

template <class T>
json optional_json(const std::optional<T>& value) {
  if (!value) return nullptr;
  if constexpr (std::is_floating_point_v<T>) {
    if (std::isinf(*value)) return "inf";
  }
  return json(*value);
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      TOP_STRING("system.name", system.name),
      TOP_REAL("system.alpha", system.alpha),
      Field{"system.beta",
            [](RunConfig& c, const std::string& v) { c.system.beta = parse_real(v); },
            [](const RunConfig& c) { return optional_json(c.system.beta); }},
      TOP_INT("system.wells", system.wells, int),
      TOP_REAL("system.omega", system.omega),
      TOP_REAL("system.hbar", system.hbar),
      TOP_REAL("system.mass", system.mass),

      TOP_INT("data.m", data.m, Index),
      Field{"data.lag_time",
            [](RunConfig& c, const std::string& v) { c.data.lag_time = parse_real(v); },
            [](const RunConfig& c) { return optional_json(c.data.lag_time); }},
      Field{"data.lag_steps",
            [](RunConfig& c, const std::string& v) {
              c.data.lag_steps = static_cast<Index>(parse_integer(v));
            },
            [](const RunConfig& c) { return optional_json(c.data.lag_steps); }},
      Field{"data.h", [](RunConfig& c, const std::string& v) { c.data.h = parse_real(v); },
            [](const RunConfig& c) { return optional_json(c.data.h); }},
      TOP_INT("data.stride", data.stride, Index),
      TOP_INT("data.burn_in", data.burn_in, Index),
      TOP_SEED("data.seed", data.seed),
      TOP_REAL("data.t0", data.t0),
      TOP_REAL("data.t1", data.t1),
      TOP_REALS("data.lower", data.lower),
      TOP_REALS("data.upper", data.upper),
      TOP_STRING("data.sampling", data.sampling),

      TOP_COUNTS("model.widths", model.widths),
      TOP_STRING("model.activation", model.activation),
      TOP_STRING("model.distribution", model.distribution),
      TOP_REAL("model.weight_scale", model.weight_scale),
      TOP_REAL("model.bias_scale", model.bias_scale),
      TOP_REAL("model.tol", model.tol),
      TOP_STRING("model.mode", model.mode),
      TOP_INT("model.n", model.n, Index),
      TOP_BOOL("model.symmetrize", model.symmetrize),
      TOP_SEED("model.seed", model.seed),
      TOP_INT("model.chunk", model.chunk, Index),

      TOP_INT("training.epochs", training.epochs, Index),
      TOP_REAL("training.step", training.step),
      TOP_REAL("training.armijo", training.armijo),
      TOP_STRING("training.optimizer", training.optimizer),
      TOP_STRING("training.output_activation", training.output_activation),
      TOP_SEED("training.seed", training.seed),

      TOP_INT("ensemble.members", ensemble.members, Index),
      TOP_SEED("ensemble.base_seed", ensemble.base_seed),
      TOP_BOOL("ensemble.bootstrap", ensemble.bootstrap),
      TOP_STRING("ensemble.eval", ensemble.eval),
      TOP_INT("ensemble.eval_count", ensemble.eval_count, Index),
      TOP_COUNTS("ensemble.grid", ensemble.grid),
      TOP_REALS("ensemble.lower", ensemble.lower),
      TOP_REALS("ensemble.upper", ensemble.upper),

      TOP_INT("cluster.k", cluster.k, int),
      TOP_BOOL("cluster.include_first", cluster.include_first),
      TOP_BOOL("cluster.weight_by_values", cluster.weight_by_values),
      TOP_SEED("cluster.seed", cluster.seed),

      Field{"benchmark.systems",
            [](RunConfig& c, const std::string& v) { c.benchmark.systems = split_list(v); },
            [](const RunConfig& c) { return json(c.benchmark.systems); }},
      TOP_INT("benchmark.repeats", benchmark.repeats, int),

      TOP_STRING("output.dir", output.dir),
  };
  return table;
}

#undef TOP_REAL
#undef TOP_INT
#undef TOP_SEED
#undef TOP_BOOL
#undef TOP_STRING
#undef TOP_REALS
#undef TOP_COUNTS

bool is_langevin(const std::string& name) {
  return name == "ou" || name == "lemon_slice" || name == "triple_well";
}

template <class Parse>
void check_name(const std::string& key, const std::string& value, Parse parse) {
  try {
    parse(value);
  } catch (const Error&) {
    config_error(key, "unknown value '" + value + "'");
  }
}

void check(bool ok, const std::string& key, const std::string& message) {
  if (!ok) config_error(key, message);
}

}  // namespace

void set_value(RunConfig& config, const std::string& key, const std::string& value,
               const std::string& where) {
  const std::string prefix = where.empty() ? key : where + ": " + key;
  for (const auto& field : fields()) {
    if (field.key != key) continue;
    try {
      field.set(config, value);
    } catch (const std::invalid_argument& e) {
      config_error(prefix, e.what());
    }
    return;
  }
  config_error(where, "unknown key '" + key + "'");
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config file " + path.string());
  config.source = path.string();
  std::string section;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = path.string() + ":" + std::to_string(number);
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') config_error(where, "malformed section header");
      section = trim(text.substr(1, text.size() - 2));
      static const std::vector<std::string> sections = {"system",   "data",    "model",
                                                        "training", "ensemble", "cluster",
                                                        "benchmark", "output"};
      if (std::find(sections.begin(), sections.end(), section) == sections.end()) {
        config_error(where, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) config_error(where, "expected key = value");
    if (section.empty()) config_error(where, "key outside of a section");
    const std::string key = section + "." + trim(text.substr(0, eq));
    set_value(config, key, trim(text.substr(eq + 1)), where);
  }
}

void validate(const RunConfig& c) {
  const auto& s = c.system;
  static const std::vector<std::string> systems = {"ou",       "lemon_slice", "triple_well",
                                                   "harmonic", "qho",         "bickley"};
  check(std::find(systems.begin(), systems.end(), s.name) != systems.end(), "system.name",
        "unknown system '" + s.name + "'");
  check(s.alpha > 0.0, "system.alpha", "must be positive");
  check(!s.beta || *s.beta > 0.0, "system.beta", "must be positive");
  check(s.wells >= 1, "system.wells", "must be at least 1");
  check(s.omega > 0.0, "system.omega", "must be positive");
  check(s.hbar > 0.0, "system.hbar", "must be positive");
  check(s.mass > 0.0, "system.mass", "must be positive");

  const auto& d = c.data;
  check(d.m >= 1, "data.m", "must be at least 1");
  check(!d.lag_time || (std::isfinite(*d.lag_time) && *d.lag_time > 0.0), "data.lag_time",
        "must be positive");
  check(!d.lag_steps || *d.lag_steps >= 1, "data.lag_steps", "must be at least 1");
  check(!d.h || (std::isfinite(*d.h) && *d.h > 0.0), "data.h", "must be positive");
  check(d.stride >= 0, "data.stride", "must be non-negative");
  check(d.burn_in >= 0, "data.burn_in", "must be non-negative");
  check(std::isfinite(d.t0) && std::isfinite(d.t1) && d.t1 >= d.t0, "data.t1",
        "must be finite and not before data.t0");
  check(!d.lower.empty() && d.lower.size() == d.upper.size(), "data.upper",
        "must have the same length as data.lower");
  for (std::size_t i = 0; i < d.lower.size(); ++i) {
    check(d.lower[i] < d.upper[i], "data.upper", "must exceed data.lower in every coordinate");
  }
  check_name("data.sampling", d.sampling, [](const std::string& v) { parse_grid_mode(v); });
  if (is_langevin(s.name)) langevin_lag_steps(c);

  const auto& m = c.model;
  check(!m.widths.empty(), "model.widths", "needs at least one layer");
  for (Index w : m.widths) check(w >= 1, "model.widths", "every width must be at least 1");
  check_name("model.activation", m.activation, [](const std::string& v) { Activation::parse(v); });
  check_name("model.distribution", m.distribution,
             [](const std::string& v) { parse_weight_family(v); });
  check(m.weight_scale >= 0.0 && std::isfinite(m.weight_scale), "model.weight_scale",
        "must be finite and non-negative");
  check(m.bias_scale >= 0.0 && std::isfinite(m.bias_scale), "model.bias_scale",
        "must be finite and non-negative");
  check(m.tol > 0.0 && m.tol < 1.0, "model.tol", "must lie in (0, 1)");
  check_name("model.mode", m.mode, [](const std::string& v) { parse_mode(v); });
  check(m.n >= 1, "model.n", "must be at least 1");
  check(m.chunk >= 1, "model.chunk", "must be at least 1");

  const auto& t = c.training;
  check(t.epochs >= 0, "training.epochs", "must be non-negative");
  check(t.step > 0.0 && std::isfinite(t.step), "training.step", "must be positive");
  check(t.armijo > 0.0 && t.armijo < 1.0, "training.armijo", "must lie in (0, 1)");
  check(t.optimizer == "backtracking", "training.optimizer",
        "only 'backtracking' gradient ascent is available");
  check_name("training.output_activation", t.output_activation,
             [](const std::string& v) { parse_output_activation(v); });

  const auto& e = c.ensemble;
  check(e.members >= 2, "ensemble.members", "needs at least 2 members");
  check(e.eval == "data" || e.eval == "grid", "ensemble.eval", "must be 'data' or 'grid'");
  check(e.eval_count >= 1, "ensemble.eval_count", "must be at least 1");
  check(!e.grid.empty(), "ensemble.grid", "needs at least one axis");
  for (Index g : e.grid) check(g >= 1, "ensemble.grid", "every count must be at least 1");
  check(e.lower.size() == e.grid.size() && e.upper.size() == e.grid.size(), "ensemble.lower",
        "ensemble.lower and ensemble.upper need one entry per grid axis");
  for (std::size_t i = 0; i < e.lower.size(); ++i) {
    check(e.lower[i] < e.upper[i], "ensemble.upper", "must exceed ensemble.lower in every coordinate");
  }

  check(c.cluster.k >= 2, "cluster.k", "must be at least 2");

  check(!c.benchmark.systems.empty(), "benchmark.systems", "needs at least one system");
  for (const auto& name : c.benchmark.systems) {
    check(is_langevin(name), "benchmark.systems",
          "'" + name + "' is not one of ou, lemon_slice, triple_well");
  }
  check(c.benchmark.repeats >= 3, "benchmark.repeats", "must be at least 3");
  check(!c.output.dir.empty(), "output.dir", "must not be empty");
}

double langevin_step(const RunConfig& config) { return config.data.h.value_or(0.005); }

Index langevin_lag_steps(const RunConfig& config) {
  const double h = langevin_step(config);
  if (config.data.lag_steps) {
    if (config.data.lag_time) {
      const double implied = static_cast<double>(*config.data.lag_steps) * h;
      check(std::abs(implied - *config.data.lag_time) <= 1e-9 * std::max(1.0, implied),
            "data.lag_time", "disagrees with data.lag_steps × data.h");
    }
    return *config.data.lag_steps;
  }
  if (!config.data.lag_time) return 100;
  const double ratio = *config.data.lag_time / h;
  const double steps = std::round(ratio);
  check(steps >= 1.0 && std::abs(ratio - steps) <= 1e-9 * std::max(1.0, ratio), "data.lag_time",
        "must be a positive integer multiple of data.h");
  return static_cast<Index>(steps);
}

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& field : fields()) keys.push_back(field.key);
  return keys;
}

json echo(const RunConfig& config) {
  json out = json::object();
  for (const auto& field : fields()) {
    const auto dot = field.key.find('.');
    out[field.key.substr(0, dot)][field.key.substr(dot + 1)] = field.get(config);
  }
  return out;
}

void set_all_seeds(RunConfig& config, std::uint64_t seed) {
  config.data.seed = seed;
  config.model.seed = seed;
  config.training.seed = seed;
  config.ensemble.base_seed = seed;
  config.cluster.seed = seed;
}

}  // namespace transferop::cli
