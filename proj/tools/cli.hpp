#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "reap/harvest.hpp"

namespace reap::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kInfeasible = 2 };

enum class OutputFormat { kJson, kCsv };

struct RunConfig {
  std::string command;
  std::string catalog = "builtin:table1";
  double period = 3600.0;
  std::optional<double> off_power;  // overrides the catalog's value
  double alpha = 1.0;
  std::optional<double> budget;
  std::optional<std::string> budget_range;
  std::optional<std::string> trace;
  std::vector<double> alpha_list;
  PanelModel panel;
  std::optional<OutputFormat> format;  // per-command default when unset
  std::optional<std::string> output;
  bool pivot_trace = false;
};

/// Parses `key=value` lines (blank lines and `#` comments skipped) into
/// `--key=value` arguments.
std::vector<std::string> read_config_file(const std::string& path);

/// Runs one subcommand. `args` excludes the program name. Returns the exit
/// code; results go to `out` (or --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_optimize(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_pareto(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace reap::cli
