#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace anyon::cli {

enum ExitCode : int { kOk = 0, kAssertion = 1, kConfig = 2, kRuntime = 3, kResource = 4 };

struct Options {
  std::string command;
  std::optional<std::string> config_path;
  std::vector<std::string> sets;
  std::string output_dir = ".";
  int workers = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> preset;
};

std::vector<std::string> command_names();
std::string default_preset(const std::string& command);

/// Preset, then the --config file (a bare config or a result envelope), then
/// --set overrides, then --seed.
json resolve_config(const Options& opts);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct CommandResult {
  json payload;
  std::optional<Table> table;
  int exit_code = kOk;
  std::string summary;
};

/// Runs one command on a resolved config. Library and config errors
/// propagate as exceptions.
CommandResult run_command(const std::string& command, const json& config, int workers);

/// Full pipeline: resolve, run, write `<command>.json` (and `.csv`) under
/// output_dir, map errors to exit codes. Diagnostics go to stderr.
int execute(const Options& opts);

/// 17 significant digits, `inf`/`-inf`/`nan` for non-finite values.
std::string format_double(double x);

}  // namespace anyon::cli
