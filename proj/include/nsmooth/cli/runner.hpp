#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "nsmooth/cli/config.hpp"
#include "nsmooth/cli/json_out.hpp"

namespace nsmooth::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kHypothesisFailure = 2 };

struct RunResult {
  Json report;
  std::string csv;
  int exit_code = kOk;
};

/// The subcommands: probe, scan, smooth, fibrate, reeb, selftest.
bool known_subcommand(const std::string& name);

/// Runs a subcommand on a validated configuration without touching the filesystem.
RunResult execute(const std::string& subcommand, const RunConfig& cfg);

struct RunOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
};

/// Loads the config, executes, writes report.json and grid.csv into out_dir and returns
/// the exit code. Diagnostics go to `log`.
int run(const RunOptions& options, std::ostream& log);

}  // namespace nsmooth::cli
