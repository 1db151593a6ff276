#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rtsched::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct GenerateOptions {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<int> instances;
};

struct SimulateOptions {
  std::string config_path;
  std::vector<std::string> inputs;  // instance files or directories of them
  std::optional<std::string> policy;
  std::optional<std::string> grid;  // "scd" or "mnda"
  std::optional<double> budget_secs;
  std::optional<std::int64_t> node_budget;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string out;
};

struct CompareOptions {
  std::string config_path;
  std::vector<std::string> dirs;
  std::optional<double> alpha;
  std::optional<int> replications;
  std::optional<std::string> strategy;
  bool uncorrected = false;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::optional<std::string> out;  // directory for report.txt / report.tsv
};

struct ExportOptions {
  std::string config_path;
  std::string instance;
  int day = 1;
  std::optional<std::string> policy;
  int objective = 1;
  std::optional<double> budget_secs;
  std::optional<std::int64_t> node_budget;
  std::string out;
};

// Each command throws DataError for bad input and std::invalid_argument for
// unusable option values; main() maps them to exit codes.
void cmd_generate(const GenerateOptions& options);
void cmd_simulate(const SimulateOptions& options);
/// Returns the rendered table (also printed by main).
std::string cmd_compare(const CompareOptions& options);
void cmd_export_lp(const ExportOptions& options);

/// Directory name for a policy label, e.g. "scd2-1_mndainf-inf".
std::string policy_dir_name(const std::string& label);

/// Parses argv and runs a command; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace rtsched::cli
