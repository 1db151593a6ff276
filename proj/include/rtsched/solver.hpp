#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rtsched/model.hpp"
#include "rtsched/parallel.hpp"

namespace rtsched {

class NoFeasiblePlacement : public Error {
 public:
  using Error::Error;
};

/// Days added after the constructive schedule's last session.
inline constexpr int kHorizonSlackDays = 14;

/// Days the constructive heuristic searches before giving up on a patient.
inline constexpr int kConstructiveSearchDays = 3650;

struct SolveBudget {
  /// Wall-clock limit for a whole batch, split across the three sub-problems.
  double total_seconds = 10.0;
  /// Optional per-stage node limit; makes runs reproducible.
  std::optional<std::int64_t> node_limit;
  /// Give the share of empty sub-problems to the others (default: strict thirds).
  bool redistribute_idle = false;

  static SolveBudget unlimited() {
    return SolveBudget{std::numeric_limits<double>::infinity(), std::nullopt, false};
  }
  static SolveBudget nodes(std::int64_t limit) {
    return SolveBudget{std::numeric_limits<double>::infinity(), limit, false};
  }

  /// Seconds available to each non-empty sub-problem.
  double share(int active_groups) const;
};

struct StageResult {
  Objective objective = Objective::Breach;
  std::int64_t value = 0;
  bool proven_optimal = false;
  std::int64_t nodes = 0;
  double elapsed_seconds = 0.0;
};

struct StageLimits {
  double seconds = std::numeric_limits<double>::infinity();
  std::optional<std::int64_t> node_limit;
};

struct LexicographicResult {
  Schedule schedule;
  std::array<StageResult, 4> stages;
  /// The final ordering among equal optima completed within the limits.
  bool tie_break_complete = false;
  std::int64_t tie_break_nodes = 0;
};

/// Batch positions sorted by status priority, breach date, JCCO maximum,
/// session count (descending) and id.
std::vector<std::size_t> constructive_order(std::span<const PatientCase> batch);

/// Places each patient, in constructive_order(), at the earliest feasible
/// (day, linac) on or after `first_day`.
Schedule constructive_schedule(std::span<const PatientCase> batch, const BookingState& state,
                               Day first_day);

/// T = last session day of the schedule - first_day + 1 + 14.
int compute_horizon(const Schedule& schedule, std::span<const PatientCase> batch,
                    Calendar calendar, Day first_day);

/// Batch positions per machine type A, B, C.
std::array<std::vector<std::size_t>, 3> decompose(std::span<const PatientCase> batch);

/// Four sequential stages, each minimizing one criterion under caps on the
/// earlier ones, followed by a tie-break towards earliest starts and lowest
/// linac in patient id order. Each stage is seeded with the previous best.
LexicographicResult lexicographic_solve(const CompactModel& model,
                                        std::span<const PatientCase> batch, StageLimits limits,
                                        const Schedule& warm_start);

struct GroupReport {
  MachineType group = MachineType::A;
  std::size_t patients = 0;
  int horizon = 0;
  CriteriaVector constructive;
  CriteriaVector solved;
  std::array<StageResult, 4> stages;
};

struct BatchSolution {
  Schedule schedule;
  std::vector<GroupReport> groups;  // non-empty groups only, in A, B, C order

  CriteriaVector constructive() const;
  CriteriaVector solved() const;
};

/// decompose -> constructive -> horizon -> compact model -> lexicographic
/// solve per group, merged back into batch order.
BatchSolution solve_batch(std::span<const PatientCase> batch, const BookingState& state,
                          Day first_day, const SolveBudget& budget,
                          Execution exec = Execution::Parallel);

/// Horizon covering every group's constructive schedule (for model export).
Horizon planning_horizon(std::span<const PatientCase> batch, const BookingState& state,
                         Day first_day);

}  // namespace rtsched
