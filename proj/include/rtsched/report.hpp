#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtsched/simulator.hpp"
#include "rtsched/stats.hpp"

namespace rtsched {

inline constexpr const char* kToolVersion = "0.1.0";

/// Per-instance aggregates of one configuration:
/// `# config=<label>` then instance, patients, breach_pct, jmax_pct, jgood_pct, waiting.
void write_summary(std::ostream& out, const std::string& label,
                   std::span<const SimulationOutcome> outcomes);
ConfigResults read_summary(std::istream& in, const std::string& source = "<summary>");

/// Solver statistics over every batch: count, batches where the solver
/// improved on the warm start, and batches where it was worse (should be 0).
struct BatchStatistics {
  std::size_t batches = 0;
  std::size_t improved = 0;
  std::size_t worse = 0;
};
BatchStatistics batch_statistics(std::span<const SimulationOutcome> outcomes);

/// Everything needed to rerun a command: key=value lines in a fixed order.
struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::vector<std::string> policies;
  std::optional<double> budget_secs;
  std::optional<std::int64_t> node_budget;
  std::string out_dir;
  std::map<std::string, std::string> extra;

  std::string to_text() const;
};

}  // namespace rtsched
