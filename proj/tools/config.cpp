#include "config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace shearstab::cli {

using nlohmann::json;

namespace {

enum Bits : unsigned {
  kEnergy = 1u,
  kLinear = 2u,
  kEvolve = 4u,
  kMaximize = 8u,
  kSweep = 16u,
  kAll = 31u,
};

unsigned bit(Command c) {
  switch (c) {
    case Command::Energy: return kEnergy;
    case Command::Linear: return kLinear;
    case Command::Evolve: return kEvolve;
    case Command::Maximize: return kMaximize;
    case Command::Sweep: return kSweep;
  }
  return 0;
}

enum class Type { Int, Real, Bool, Text, Seed };

struct KeySpec {
  std::string name;
  Type type;
  unsigned commands;
  std::string help;
  std::function<void(RunConfig&, const json&)> set;
  std::function<json(const RunConfig&)> get;
};

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Registry of every configuration key. Flags are the key with '-' for '_'.
const std::vector<KeySpec>& registry() {
  using C = RunConfig;
  static const std::vector<KeySpec> keys = {
      {"profile", Type::Text, kAll, "base flow: couette | poiseuille | custom",
       [](C& c, const json& v) { c.profile = v.get<std::string>(); },
       [](const C& c) { return json(c.profile); }},
      {"profile_file", Type::Text, kAll,
       "custom profile: whitespace/comma separated samples of f on a Chebyshev-Lobatto grid, "
       "z = +1 first",
       [](C& c, const json& v) { c.profile_file = v.get<std::string>(); },
       [](const C& c) { return json(c.profile_file); }},
      {"n_modes", Type::Int, kAll, "collocation points (default 64)",
       [](C& c, const json& v) { c.n_modes = v.get<int>(); },
       [](const C& c) { return json(c.n_modes); }},
      {"check_modes", Type::Int, kAll,
       "second resolution for the agreement fields, 0 disables (default 48)",
       [](C& c, const json& v) { c.check_modes = v.get<int>(); },
       [](const C& c) { return json(c.check_modes); }},
      {"output", Type::Text, kAll, "output prefix for <output>.json and <output>.csv (default: "
                                   "JSON summary on stdout)",
       [](C& c, const json& v) { c.output = v.get<std::string>(); },
       [](const C& c) { return json(c.output); }},
      {"format", Type::Text, kAll, "json | csv | both (default both)",
       [](C& c, const json& v) { c.format = v.get<std::string>(); },
       [](const C& c) { return json(c.format); }},
      {"timestamp", Type::Bool, kAll, "include a timestamp in the summary (default true)",
       [](C& c, const json& v) { c.timestamp = v.get<bool>(); },
       [](const C& c) { return json(c.timestamp); }},
      {"mode", Type::Text, kEnergy | kSweep, "energy problem: spanwise | full (default spanwise)",
       [](C& c, const json& v) { c.mode = v.get<std::string>(); },
       [](const C& c) { return json(c.mode); }},
      {"search", Type::Bool, kEnergy, "minimize over wavenumbers instead of solving at (a, b)",
       [](C& c, const json& v) { c.search = v.get<bool>(); },
       [](const C& c) { return json(c.search); }},
      {"critical", Type::Bool, kLinear, "search the critical point (minimum neutral Re over a)",
       [](C& c, const json& v) { c.critical = v.get<bool>(); },
       [](const C& c) { return json(c.critical); }},
      {"scan", Type::Bool, kLinear, "largest growth rate over an (a, Re) grid",
       [](C& c, const json& v) { c.scan = v.get<bool>(); },
       [](const C& c) { return json(c.scan); }},
      {"a", Type::Real, kEnergy | kLinear | kMaximize | kEvolve,
       "streamwise wavenumber (default 1; evolve with initial=orr: energy-optimal a)",
       [](C& c, const json& v) { c.a = v.get<double>(); },
       [](const C& c) { return opt(c.a); }},
      {"b", Type::Real, kEnergy | kLinear, "spanwise wavenumber (default 0)",
       [](C& c, const json& v) { c.b = v.get<double>(); },
       [](const C& c) { return opt(c.b); }},
      {"re", Type::Real, kLinear | kEvolve, "Reynolds number (linear 1e4, evolve 40)",
       [](C& c, const json& v) { c.re = v.get<double>(); },
       [](const C& c) { return opt(c.re); }},
      {"tol", Type::Real, kEnergy | kMaximize,
       "search tolerance (energy 1e-7) / ascent tolerance (maximize 1e-12)",
       [](C& c, const json& v) { c.tol = v.get<double>(); },
       [](const C& c) { return opt(c.tol); }},
      {"a_min", Type::Real, kEnergy | kSweep | kLinear, "lower a of the search/sweep box",
       [](C& c, const json& v) { c.a_min = v.get<double>(); },
       [](const C& c) { return opt(c.a_min); }},
      {"a_max", Type::Real, kEnergy | kSweep | kLinear, "upper a of the search/sweep box",
       [](C& c, const json& v) { c.a_max = v.get<double>(); },
       [](const C& c) { return opt(c.a_max); }},
      {"b_min", Type::Real, kEnergy | kSweep, "lower b (full mode; the full sweep starts at 0.2 when a_min = 0)",
       [](C& c, const json& v) { c.b_min = v.get<double>(); },
       [](const C& c) { return opt(c.b_min); }},
      {"b_max", Type::Real, kEnergy | kSweep, "upper b (full mode)",
       [](C& c, const json& v) { c.b_max = v.get<double>(); },
       [](const C& c) { return opt(c.b_max); }},
      {"coarse_step", Type::Real, kEnergy, "coarse scan spacing of the search (default 0.2)",
       [](C& c, const json& v) { c.coarse_step = v.get<double>(); },
       [](const C& c) { return opt(c.coarse_step); }},
      {"a_points", Type::Int, kSweep | kLinear, "grid points in a (sweep 20, scan 40)",
       [](C& c, const json& v) { c.a_points = v.get<int>(); },
       [](const C& c) { return opt(c.a_points); }},
      {"b_points", Type::Int, kSweep, "grid points in b (full mode, default 20)",
       [](C& c, const json& v) { c.b_points = v.get<int>(); },
       [](const C& c) { return opt(c.b_points); }},
      {"re_min", Type::Real, kLinear, "lower Re (critical 1e3, scan 1e2)",
       [](C& c, const json& v) { c.re_min = v.get<double>(); },
       [](const C& c) { return opt(c.re_min); }},
      {"re_max", Type::Real, kLinear, "upper Re (default 1e5)",
       [](C& c, const json& v) { c.re_max = v.get<double>(); },
       [](const C& c) { return opt(c.re_max); }},
      {"re_points", Type::Int, kLinear, "log-spaced Re values of the scan (default 4)",
       [](C& c, const json& v) { c.re_points = v.get<int>(); },
       [](const C& c) { return opt(c.re_points); }},
      {"re_scan_points", Type::Int, kLinear, "Re bracketing points per a (critical, default 25)",
       [](C& c, const json& v) { c.re_scan_points = v.get<int>(); },
       [](const C& c) { return opt(c.re_scan_points); }},
      {"a_tol", Type::Real, kLinear, "wavenumber tolerance of the critical search (1e-6)",
       [](C& c, const json& v) { c.a_tol = v.get<double>(); },
       [](const C& c) { return json(c.a_tol); }},
      {"re_tol", Type::Real, kLinear, "Reynolds tolerance of the neutral bisection (1e-6)",
       [](C& c, const json& v) { c.re_tol = v.get<double>(); },
       [](const C& c) { return json(c.re_tol); }},
      {"patience", Type::Int, kMaximize, "quiet iterations before the ascent stops (3)",
       [](C& c, const json& v) { c.patience = v.get<int>(); },
       [](const C& c) { return json(c.patience); }},
      {"max_iters", Type::Int, kMaximize, "ascent iteration limit (500)",
       [](C& c, const json& v) { c.max_iters = v.get<int>(); },
       [](const C& c) { return json(c.max_iters); }},
      {"dt", Type::Real, kEvolve, "time step (1e-3)",
       [](C& c, const json& v) { c.dt = v.get<double>(); },
       [](const C& c) { return json(c.dt); }},
      {"t_final", Type::Real, kEvolve, "integration time (20)",
       [](C& c, const json& v) { c.t_final = v.get<double>(); },
       [](const C& c) { return json(c.t_final); }},
      {"nx", Type::Int, kEvolve, "x grid points, even (32)",
       [](C& c, const json& v) { c.nx = v.get<int>(); },
       [](const C& c) { return json(c.nx); }},
      {"sample_every", Type::Int, kEvolve, "steps between trajectory samples (100)",
       [](C& c, const json& v) { c.sample_every = v.get<int>(); },
       [](const C& c) { return json(c.sample_every); }},
      {"initial", Type::Text, kEvolve,
       "initial field: orr (energy-optimal spanwise mode) | random (default orr)",
       [](C& c, const json& v) { c.initial = v.get<std::string>(); },
       [](const C& c) { return json(c.initial); }},
      {"amplitude", Type::Real, kEvolve, "scale factor of the initial field (1)",
       [](C& c, const json& v) { c.amplitude = v.get<double>(); },
       [](const C& c) { return json(c.amplitude); }},
      {"seed", Type::Seed, kEvolve, "random seed (1)",
       [](C& c, const json& v) { c.seed = v.get<std::uint64_t>(); },
       [](const C& c) { return json(c.seed); }},
  };
  return keys;
}

const KeySpec* find_key(const std::string& name) {
  for (const KeySpec& k : registry())
    if (k.name == name) return &k;
  return nullptr;
}

bool type_matches(Type type, const json& v) {
  switch (type) {
    case Type::Int:
      return v.is_number_integer() && v.get<std::int64_t>() >= std::numeric_limits<int>::min() &&
             v.get<std::int64_t>() <= std::numeric_limits<int>::max();
    case Type::Real: return v.is_number() && std::isfinite(v.get<double>());
    case Type::Bool: return v.is_boolean();
    case Type::Text: return v.is_string();
    case Type::Seed: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  }
  return false;
}

std::string type_name(Type type) {
  switch (type) {
    case Type::Int: return "an integer";
    case Type::Real: return "a finite number";
    case Type::Bool: return "a boolean";
    case Type::Text: return "a string";
    case Type::Seed: return "a nonnegative integer";
  }
  return "?";
}

std::optional<ConfigError> apply_key(RunConfig& config, const std::string& name, const json& v) {
  const KeySpec* spec = find_key(name);
  if (!spec) return ConfigError{name, "unknown key '" + name + "'"};
  if (!(spec->commands & bit(config.command)))
    return ConfigError{name, "key '" + name + "' does not apply to '" + to_string(config.command) +
                                 "'"};
  if (!type_matches(spec->type, v))
    return ConfigError{name, "key '" + name + "' must be " + type_name(spec->type)};
  spec->set(config, v);
  return std::nullopt;
}

// Strict conversion of a flag value to the key's JSON type.
std::optional<json> flag_value(Type type, const std::string& text) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  switch (type) {
    case Type::Int: {
      int v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) return std::nullopt;
      return json(v);
    }
    case Type::Seed: {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last) return std::nullopt;
      return json(v);
    }
    case Type::Real: {
      double v = 0.0;
      auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || p != last || !std::isfinite(v)) return std::nullopt;
      return json(v);
    }
    case Type::Text: return json(text);
    case Type::Bool: break;
  }
  return std::nullopt;
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (char& ch : f)
    if (ch == '_') ch = '-';
  return f;
}

ConfigError range_error(const std::string& key, const std::string& what) {
  return ConfigError{key, "invalid value for '" + key + "': " + what};
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::Energy: return "energy";
    case Command::Linear: return "linear";
    case Command::Evolve: return "evolve";
    case Command::Maximize: return "maximize";
    case Command::Sweep: return "sweep";
  }
  return "unknown";
}

std::vector<std::string> keys_for(Command command) {
  std::vector<std::string> out;
  for (const KeySpec& k : registry())
    if (k.commands & bit(command)) out.push_back(k.name);
  return out;
}

std::optional<ConfigError> apply_json(RunConfig& config, const json& object) {
  if (!object.is_object()) return ConfigError{"", "config file must hold a JSON object"};
  for (const auto& [key, value] : object.items())
    if (auto err = apply_key(config, key, value)) return err;
  return std::nullopt;
}

std::optional<ConfigError> resolve_defaults(RunConfig& c) {
  if (c.profile != "couette" && c.profile != "poiseuille" && c.profile != "custom")
    return range_error("profile", "expected couette, poiseuille or custom");
  if (c.profile == "custom" && c.profile_file.empty())
    return range_error("profile_file", "required for the custom profile");
  if (c.profile != "custom" && !c.profile_file.empty())
    return range_error("profile_file", "only valid with profile = custom");
  if (c.n_modes < 8 || c.n_modes > 256) return range_error("n_modes", "must lie in [8, 256]");
  if (c.check_modes != 0 && (c.check_modes < 8 || c.check_modes > 256))
    return range_error("check_modes", "must be 0 or lie in [8, 256]");
  if (c.check_modes == c.n_modes) return range_error("check_modes", "must differ from n_modes");
  if (c.format != "json" && c.format != "csv" && c.format != "both")
    return range_error("format", "expected json, csv or both");
  const bool full = c.mode == "full";
  if (c.mode != "spanwise" && !full) return range_error("mode", "expected spanwise or full");

  auto positive = [](const std::optional<double>& v) { return !v || *v > 0.0; };

  switch (c.command) {
    case Command::Energy:
      if (!c.search) {
        if (!c.a) c.a = 1.0;
        if (!c.b) c.b = 0.0;
        if (full ? *c.a < 0.0 : *c.a <= 0.0)
          return range_error("a", full ? "must be nonnegative" : "must be positive");
        if (*c.b < 0.0) return range_error("b", "must be nonnegative");
        if (!full && *c.b != 0.0) return range_error("b", "spanwise mode has b = 0");
        if (*c.a == 0.0 && *c.b == 0.0) return range_error("a", "a and b cannot both vanish");
      } else {
        if (c.a) return range_error("a", "not used with search");
        if (c.b) return range_error("b", "not used with search");
        if (!c.tol) c.tol = 1e-7;
        if (!c.a_min) c.a_min = full ? 0.0 : 0.2;
        if (!c.a_max) c.a_max = 4.0;
        if (!full && (c.b_min || c.b_max)) return range_error(c.b_min ? "b_min" : "b_max", "spanwise mode has b = 0");
        if (!c.b_min) c.b_min = 0.0;
        if (!c.b_max) c.b_max = full ? 4.0 : 0.0;
        if (!c.coarse_step) c.coarse_step = 0.2;
        if (*c.tol <= 0.0) return range_error("tol", "must be positive");
        if (*c.coarse_step <= 0.0) return range_error("coarse_step", "must be positive");
        if (full ? *c.a_min < 0.0 : *c.a_min <= 0.0)
          return range_error("a_min", full ? "must be nonnegative" : "must be positive");
        if (*c.a_max > 6.0 || *c.a_max <= *c.a_min) return range_error("a_max", "must lie in (a_min, 6]");
        if (*c.b_min < 0.0) return range_error("b_min", "must be nonnegative");
        if (full && (*c.b_max > 6.0 || *c.b_max < *c.b_min))
          return range_error("b_max", "must lie in [b_min, 6]");
      }
      break;
    case Command::Sweep:
      if (!c.a_min) c.a_min = full ? 0.0 : 0.2;
      if (!c.a_max) c.a_max = 4.0;
      if (!c.a_points) c.a_points = 20;
      if (!full && (c.b_min || c.b_max || c.b_points))
        return range_error(c.b_min ? "b_min" : c.b_max ? "b_max" : "b_points",
                           "spanwise mode has b = 0");
      // The full grid starts at b = 0.2 unless a starts above zero, which
      // keeps the degenerate point a = b = 0 out of the default grid.
      if (!c.b_min) c.b_min = full && *c.a_min == 0.0 ? 0.2 : 0.0;
      if (!c.b_max) c.b_max = full ? 4.0 : 0.0;
      if (!c.b_points) c.b_points = full ? 20 : 1;
      if (full ? *c.a_min < 0.0 : *c.a_min <= 0.0)
        return range_error("a_min", full ? "must be nonnegative" : "must be positive");
      if (*c.a_max < *c.a_min) return range_error("a_max", "must be at least a_min");
      if (*c.b_min < 0.0) return range_error("b_min", "must be nonnegative");
      if (*c.b_max < *c.b_min) return range_error("b_max", "must be at least b_min");
      if (*c.a_points < 1 || *c.a_points > 10000) return range_error("a_points", "must lie in [1, 10000]");
      if (*c.b_points < 1 || *c.b_points > 10000) return range_error("b_points", "must lie in [1, 10000]");
      if (full && *c.a_min == 0.0 && *c.b_min == 0.0)
        return range_error("b_min", "the grid point a = b = 0 is not admissible; raise a_min or b_min");
      break;
    case Command::Linear:
      if (c.critical && c.scan) return range_error("scan", "cannot be combined with critical");
      if (c.critical) {
        if (c.a || c.b || c.re) return range_error(c.a ? "a" : c.b ? "b" : "re", "not used with critical");
        if (c.a_points || c.re_points) return range_error(c.a_points ? "a_points" : "re_points", "only used with scan");
        if (!c.a_min) c.a_min = 0.5;
        if (!c.a_max) c.a_max = 1.5;
        if (!c.re_min) c.re_min = 1e3;
        if (!c.re_max) c.re_max = 1e5;
        if (!c.re_scan_points) c.re_scan_points = 25;
        if (*c.re_scan_points < 2) return range_error("re_scan_points", "must be at least 2");
        if (c.a_tol <= 0.0) return range_error("a_tol", "must be positive");
        if (c.re_tol <= 0.0) return range_error("re_tol", "must be positive");
      } else if (c.scan) {
        if (c.a || c.b || c.re) return range_error(c.a ? "a" : c.b ? "b" : "re", "not used with scan");
        if (c.re_scan_points) return range_error("re_scan_points", "only used with critical");
        if (!c.a_min) c.a_min = 0.1;
        if (!c.a_max) c.a_max = 4.0;
        if (!c.a_points) c.a_points = 40;
        if (!c.re_min) c.re_min = 1e2;
        if (!c.re_max) c.re_max = 1e5;
        if (!c.re_points) c.re_points = 4;
        if (*c.a_points < 1 || *c.a_points > 10000) return range_error("a_points", "must lie in [1, 10000]");
        if (*c.re_points < 1 || *c.re_points > 10000) return range_error("re_points", "must lie in [1, 10000]");
      } else {
        if (c.a_min || c.a_max || c.re_min || c.re_max || c.a_points || c.re_points || c.re_scan_points)
          return ConfigError{"a_min", "box keys need critical or scan"};
        if (!c.a) c.a = 1.0;
        if (!c.b) c.b = 0.0;
        if (!c.re) c.re = 1e4;
        if (*c.a <= 0.0) return range_error("a", "must be positive");
        if (*c.b < 0.0) return range_error("b", "must be nonnegative");
        if (*c.re <= 0.0) return range_error("re", "must be positive");
        break;
      }
      if (*c.a_min <= 0.0) return range_error("a_min", "must be positive");
      if (*c.a_max < *c.a_min || (c.critical && *c.a_max == *c.a_min))
        return range_error("a_max", "must exceed a_min");
      if (*c.re_min <= 0.0) return range_error("re_min", "must be positive");
      if (*c.re_max < *c.re_min || (c.critical && *c.re_max == *c.re_min))
        return range_error("re_max", "must exceed re_min");
      break;
    case Command::Maximize:
      if (!c.a) c.a = 1.0;
      if (!c.tol) c.tol = 1e-12;
      if (*c.a <= 0.0) return range_error("a", "must be positive");
      if (*c.tol <= 0.0) return range_error("tol", "must be positive");
      if (c.patience < 1) return range_error("patience", "must be at least 1");
      if (c.max_iters < 1) return range_error("max_iters", "must be at least 1");
      break;
    case Command::Evolve:
      if (!c.re) c.re = 40.0;
      if (c.initial != "orr" && c.initial != "random")
        return range_error("initial", "expected orr or random");
      if (c.initial == "random" && !c.a) c.a = 1.0;
      if (!positive(c.a)) return range_error("a", "must be positive");
      if (*c.re <= 0.0) return range_error("re", "must be positive");
      if (c.dt <= 0.0) return range_error("dt", "must be positive");
      if (c.t_final <= 0.0) return range_error("t_final", "must be positive");
      if (std::llround(c.t_final / c.dt) < 4) return range_error("t_final", "needs at least 4 steps");
      if (c.nx < 8 || c.nx % 2 != 0 || c.nx > 1024) return range_error("nx", "must be even and in [8, 1024]");
      if (c.sample_every < 1) return range_error("sample_every", "must be at least 1");
      if (!(c.amplitude > 0.0)) return range_error("amplitude", "must be positive");
      break;
  }
  return std::nullopt;
}

json config_echo(const RunConfig& config) {
  json out = json::object();
  out["command"] = to_string(config.command);
  for (const KeySpec& k : registry())
    if (k.commands & bit(config.command)) out[k.name] = k.get(config);
  return out;
}

ParseOutcome parse_config(const std::vector<std::string>& args) {
  ParseOutcome outcome;
  CLI::App app{"Energy and linear stability of plane shear flows", "shearstab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  struct Sub {
    Command command;
    CLI::App* app;
    std::string config_path;
    std::map<std::string, std::string> text;
    std::map<std::string, CLI::Option*> options;
    std::map<std::string, bool> flags;
  };
  const std::vector<std::pair<Command, std::string>> commands = {
      {Command::Energy, "Critical energy Reynolds number, at (a, b) or minimized over a box"},
      {Command::Linear, "Orr-Sommerfeld spectrum, critical point or growth scan"},
      {Command::Evolve, "Two-dimensional spanwise simulation with energy diagnostics"},
      {Command::Maximize, "Gradient ascent of production / dissipation (spanwise)"},
      {Command::Sweep, "Critical energy Reynolds numbers on an (a, b) grid"},
  };
  std::vector<std::unique_ptr<Sub>> subs;
  for (const auto& [command, description] : commands) {
    auto sub = std::make_unique<Sub>();
    sub->command = command;
    sub->app = app.add_subcommand(to_string(command), description);
    sub->app->add_option("--config", sub->config_path, "JSON file of settings; flags override it")
        ->check(CLI::ExistingFile);
    for (const KeySpec& k : registry()) {
      if (!(k.commands & bit(command))) continue;
      const std::string flag = "--" + flag_name(k.name);
      if (k.type == Type::Bool) {
        sub->flags[k.name] = false;
        sub->options[k.name] =
            sub->app->add_flag(flag + ",!--no-" + flag_name(k.name), sub->flags[k.name], k.help);
      } else {
        sub->options[k.name] = sub->app->add_option(flag, sub->text[k.name], k.help);
      }
    }
    subs.push_back(std::move(sub));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream help;
    app.exit(e, help, help);
    outcome.kind = ParseOutcome::Kind::Help;
    outcome.text = help.str();
    return outcome;
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream help;
    app.exit(e, help, help);
    outcome.kind = ParseOutcome::Kind::Help;
    outcome.text = help.str();
    return outcome;
  } catch (const CLI::ParseError& e) {
    outcome.text = e.what();
    return outcome;
  }

  Sub* chosen = nullptr;
  for (auto& s : subs)
    if (s->app->parsed()) chosen = s.get();
  if (!chosen) {
    outcome.text = "a subcommand is required";
    return outcome;
  }

  RunConfig config;
  config.command = chosen->command;
  auto error = [&](const ConfigError& e) {
    outcome.kind = ParseOutcome::Kind::Error;
    outcome.text = e.message;
    return outcome;
  };

  if (!chosen->config_path.empty()) {
    std::ifstream in(chosen->config_path);
    json file;
    try {
      file = json::parse(in, nullptr, true, false);
    } catch (const json::parse_error& e) {
      return error({"config", "cannot parse config file '" + chosen->config_path + "': " + e.what()});
    }
    if (auto err = apply_json(config, file)) return error(*err);
  }

  for (const KeySpec& k : registry()) {
    if (!(k.commands & bit(config.command))) continue;
    if (chosen->options.at(k.name)->count() == 0) continue;
    json value;
    if (k.type == Type::Bool) {
      value = chosen->flags.at(k.name);
    } else {
      auto v = flag_value(k.type, chosen->text.at(k.name));
      if (!v)
        return error({k.name, "invalid value for '" + k.name + "' (--" + flag_name(k.name) +
                                  "): expected " + type_name(k.type)});
      value = *v;
    }
    if (auto err = apply_key(config, k.name, value)) return error(*err);
  }

  if (auto err = resolve_defaults(config)) return error(*err);
  outcome.kind = ParseOutcome::Kind::Run;
  outcome.config = std::move(config);
  return outcome;
}

}  // namespace shearstab::cli
