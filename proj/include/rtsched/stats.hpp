#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rtsched/domain.hpp"
#include "rtsched/model.hpp"
#include "rtsched/parallel.hpp"

namespace rtsched {

class EmptySample : public Error {
 public:
  using Error::Error;
};

enum class MwwMethod { Auto, Exact, Normal };

/// Sizes below which Auto uses the exact null distribution.
inline constexpr std::size_t kExactThreshold = 8;

struct MwwResult {
  /// Pairs (a_i, b_j) with a_i > b_j, ties counting 1/2.
  double u = 0.0;
  /// Two-sided: min(1, 2 min(P(U <= u), P(U >= u))).
  double p = 1.0;
  bool exact = false;
};

/// Rank-sum test with midranks. The exact mode enumerates the permutation
/// distribution of the rank sum given the observed ties; the normal mode
/// uses the tie-corrected variance and a continuity correction.
MwwResult mww_u(std::span<const double> a, std::span<const double> b,
                MwwMethod method = MwwMethod::Auto);

enum class Verdict { ABetter, BBetter, NoEvidence };
std::string_view to_string(Verdict v);

enum class BootstrapStrategy {
  /// Median replicate p-value below alpha; direction from the full-sample U.
  MedianP,
  /// Percentile interval of the replicate U excludes n_a n_b / 2.
  PercentileU,
};
std::string_view to_string(BootstrapStrategy s);
BootstrapStrategy parse_strategy(std::string_view text);

struct BootstrapOptions {
  int replications = 1000;
  /// Per-comparison significance level.
  double alpha = 0.05;
  BootstrapStrategy strategy = BootstrapStrategy::MedianP;
  Execution exec = Execution::Parallel;
};

/// Lower values are better. Rows are paired by instance and resampled
/// together; replicate r uses derive_seed(seed, r).
Verdict bootstrap_compare(std::span<const double> a, std::span<const double> b,
                          const BootstrapOptions& options, std::uint64_t seed);

/// One configuration's per-instance aggregates (Breach %, JMax %, JGood %, Waiting).
struct ConfigResults {
  std::string label;
  std::vector<std::string> instances;
  std::vector<std::array<double, 4>> rows;

  std::vector<double> column(Objective o) const;
};

struct MarkOptions {
  double alpha_overall = 0.10;
  /// Bonferroni over the K(K-1)/2 pairs; false compares each pair at alpha_overall.
  bool corrected = true;
  BootstrapOptions bootstrap;
};

struct BestMarks {
  std::vector<bool> best;  // per configuration
  std::vector<int> lost;   // comparisons where another configuration was better
};

/// Configurations that no other configuration beats significantly. Never
/// empty: if every configuration loses somewhere, the ones losing fewest
/// comparisons are marked.
BestMarks mark_best(std::span<const ConfigResults> configs, Objective criterion,
                    const MarkOptions& options, std::uint64_t seed);

struct ComparisonReport {
  std::vector<std::string> labels;
  std::array<std::vector<double>, 4> means;
  std::array<BestMarks, 4> marks;
  MarkOptions options;
  std::uint64_t seed = 0;
};

/// Throws DataError when the configurations do not share the instance set.
ComparisonReport compare_configs(std::span<const ConfigResults> configs,
                                 const MarkOptions& options, std::uint64_t seed);

/// Fixed-width table: label, Breach %, JMax %, JGood %, Waiting; a `*` marks best.
std::string render_table(const ComparisonReport& report);

/// config, criterion, mean, best-mark, comparisons-lost
std::string render_tsv(const ComparisonReport& report);

}  // namespace rtsched
