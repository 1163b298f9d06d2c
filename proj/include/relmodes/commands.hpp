// CLI subcommands as library functions: each writes its artifacts into an
// output directory and returns a JSON report.
#pragma once

#include "relmodes/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace relmodes {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level from RELMODES_LOG (error|warn|info|debug); warn when unset or unknown.
LogLevel log_level_from_env();
void log_message(LogLevel level, const std::string& msg);

struct CommandOptions {
  std::string out_dir = ".";
  std::optional<Domain> rep;
  std::optional<double> periods;
  std::optional<double> tol;
};

struct CommandResult {
  Json report = Json::object();
  std::vector<std::string> files;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;

  int exit_code() const { return errors.empty() ? 0 : 1; }
};

/// Applies the command-line overrides to a config.
RunConfig apply_options(RunConfig cfg, const CommandOptions& opts);

/// mode_<i>.csv (normalized) for i = 1..6 and modes.json. The drift mode spans
/// three times the requested number of periods.
CommandResult cmd_modes(const RunConfig& cfg, const CommandOptions& opts);
/// decompose.json, modes_contributions.csv (modes 1..6 and "sum"), trajectory.csv.
CommandResult cmd_decompose(const RunConfig& cfg, const CommandOptions& opts);
/// reconstruct.json and trajectory.csv from constants or an initial state.
CommandResult cmd_reconstruct(const RunConfig& cfg, const CommandOptions& opts);
/// family_<k>.csv per member and sweep.json (Cartesian).
CommandResult cmd_sweep(const RunConfig& cfg, const CommandOptions& opts);
/// floquet.json and lf_samples.csv for the cw, cartesian or qns plant.
CommandResult cmd_floquet_numeric(const RunConfig& cfg, const CommandOptions& opts);
/// validate.json with one entry per invariant suite. Failed suites are errors.
CommandResult cmd_validate(const RunConfig& cfg, const CommandOptions& opts);

}  // namespace relmodes
