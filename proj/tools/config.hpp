#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shearstab::cli {

enum class Command { Energy, Linear, Evolve, Maximize, Sweep };

std::string to_string(Command command);

/// Everything a run needs. Optional fields fall back to per-command defaults
/// in resolve_defaults(); after that every field used by the command is set.
struct RunConfig {
  Command command = Command::Energy;

  std::string profile = "couette";
  std::string profile_file;  // custom: samples of f on a Chebyshev-Lobatto grid
  int n_modes = 64;
  int check_modes = 48;  // second resolution for agreement fields, 0 disables
  std::string output;    // prefix for <output>.json / <output>.csv; empty: stdout
  std::string format = "both";  // json | csv | both
  bool timestamp = true;

  std::string mode = "spanwise";  // energy, sweep
  bool search = false;            // energy
  bool critical = false;          // linear
  bool scan = false;              // linear

  std::optional<double> a, b, re;
  std::optional<double> tol;
  std::optional<double> a_min, a_max, b_min, b_max, coarse_step;
  std::optional<double> re_min, re_max;
  std::optional<int> a_points, b_points, re_points, re_scan_points;
  double a_tol = 1e-6;
  double re_tol = 1e-6;
  int patience = 3;
  int max_iters = 500;

  double dt = 1e-3;
  double t_final = 20.0;
  int nx = 32;
  int sample_every = 100;
  std::string initial = "orr";  // orr | random
  double amplitude = 1.0;
  std::uint64_t seed = 1;
};

struct ConfigError {
  std::string key;
  std::string message;
};

struct ParseOutcome {
  enum class Kind { Run, Help, Error } kind = Kind::Error;
  RunConfig config;
  std::string text;  // help text or error message
  int exit_code() const { return kind == Kind::Error ? 2 : 0; }
};

/// Subcommand, optional --config FILE (JSON object of the same keys as the
/// flags, with underscores) and flags. Flags override the file. Unknown keys,
/// keys that do not apply to the subcommand, type errors and out-of-range
/// values are errors naming the key.
ParseOutcome parse_config(const std::vector<std::string>& args);

/// Apply one JSON object of settings; throws nothing, returns the first error.
std::optional<ConfigError> apply_json(RunConfig& config, const nlohmann::json& object);

/// Range checks plus per-command defaults.
std::optional<ConfigError> resolve_defaults(RunConfig& config);

/// Keys accepted by a subcommand.
std::vector<std::string> keys_for(Command command);

/// The resolved settings used by the run, for the summary.
nlohmann::json config_echo(const RunConfig& config);

}  // namespace shearstab::cli
