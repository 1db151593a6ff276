#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtsched/capacity.hpp"
#include "rtsched/domain.hpp"
#include "rtsched/parallel.hpp"

namespace rtsched {

class HorizonTooShort : public Error {
 public:
  using Error::Error;
};

class UnassignedPatient : public Error {
 public:
  using Error::Error;
};

/// The four criteria in order of importance.
enum class Objective : int { Breach = 1, JccoMax = 2, JccoGood = 3, Waiting = 4 };

inline constexpr std::array<Objective, 4> kObjectives = {
    Objective::Breach, Objective::JccoMax, Objective::JccoGood, Objective::Waiting};

std::string_view to_string(Objective o);

/// (f1, f2, f3, f4). Comparison is lexicographic in that order.
struct CriteriaVector {
  std::int64_t breach = 0;         // patients starting after d1
  std::int64_t jcco_max = 0;       // weighted, after d2
  std::int64_t jcco_good = 0;      // weighted, after d3
  std::int64_t waiting = 0;        // weighted squared days from booking

  std::int64_t operator[](Objective o) const;
  std::int64_t& operator[](Objective o);

  CriteriaVector& operator+=(const CriteriaVector& o);
  friend CriteriaVector operator+(CriteriaVector a, const CriteriaVector& b) { return a += b; }
  auto operator<=>(const CriteriaVector&) const = default;

  /// Componentwise a <= b.
  bool dominated_by(const CriteriaVector& cap) const;
  std::string to_string() const;
};

/// Criteria contributed by one patient starting on `start`.
CriteriaVector start_contribution(const PatientCase& patient, Day start);

/// Days [first, first + length - 1]. Relative index k = 1..T maps to first + k - 1.
struct Horizon {
  Day first = 1;
  int length = 0;

  Day last() const { return first + length - 1; }
  bool contains(Day d) const { return d >= first && d <= last(); }
  int relative(Day d) const { return d - first + 1; }
  Day absolute(int k) const { return first + k - 1; }
};

struct Assignment {
  std::size_t linac = 0;  // index into the fleet
  Day start = 0;
  bool operator==(const Assignment&) const = default;
};

/// One entry per batch patient, in batch order.
struct Schedule {
  std::vector<std::optional<Assignment>> assignments;

  Schedule() = default;
  explicit Schedule(std::size_t n) : assignments(n) {}
  std::size_t size() const { return assignments.size(); }
  bool complete() const;
  bool operator==(const Schedule&) const = default;
};

/// One session on one machine and day (absolute day, 1-based session).
struct SessionPlacement {
  std::size_t linac = 0;
  std::size_t patient = 0;
  Day day = 0;
  int session = 1;
  auto operator<=>(const SessionPlacement&) const = default;
};

/// Expands every assignment into its sessions. When a start weekday cannot
/// host the pattern, sessions are emitted up to the undefined gap.
std::vector<SessionPlacement> expand(const Schedule& schedule,
                                     std::span<const PatientCase> batch, Calendar calendar);

/// Last session day of the schedule, or nullopt if empty.
std::optional<Day> last_session_day(const Schedule& schedule,
                                    std::span<const PatientCase> batch, Calendar calendar);

CriteriaVector evaluate_criteria(const Schedule& schedule, std::span<const PatientCase> batch);

// ---------------------------------------------------------------------------
// Verifier
// ---------------------------------------------------------------------------

/// Constraint families of the 4-index model, numbered as in the formulation.
enum class ConstraintFamily : int {
  Eligibility = 1,   // machine emits the radiation
  Release = 2,       // no session before the release date
  StartWeekday = 3,  // first session on an allowed weekday
  FirstDay = 4,      // only first sessions on horizon day 1
  Sequence = 5,      // fixed gaps, same machine, inside the horizon
  Assignment = 6,    // every session exactly once
  Capacity = 7,      // linac minutes per day
};

std::string_view to_string(ConstraintFamily f);

struct Violation {
  ConstraintFamily family;
  std::optional<std::size_t> linac;    // 0-based
  std::optional<std::size_t> patient;  // 0-based batch position
  std::optional<int> day;              // horizon-relative k
  std::optional<int> session;          // 1-based

  /// `<family> i=<i> j=<j> k=<k> l=<l>` with 1-based i, j and `-` when absent.
  std::string to_string() const;
  auto operator<=>(const Violation&) const = default;
};

/// Evaluates constraints (1)-(7) on a 0/1 session placement. Placements
/// outside the horizon are not variables of the model and count as absent.
std::vector<Violation> check_placements(std::span<const SessionPlacement> placements,
                                        std::span<const PatientCase> batch,
                                        const BookingState& state, Horizon horizon);

std::vector<Violation> check_feasibility(const Schedule& schedule,
                                         std::span<const PatientCase> batch,
                                         const BookingState& state, Horizon horizon);

/// True when some session after the first would fall on horizon day 1.
bool hits_first_day(const SessionExpansion& sessions, Day start, Day horizon_first);

// ---------------------------------------------------------------------------
// Compact start-day model
// ---------------------------------------------------------------------------

struct SessionLoad {
  std::uint32_t cell = 0;  // linac * T + (day - first)
  int minutes = 0;
};

struct Candidate {
  std::size_t linac = 0;
  Day start = 0;
  CriteriaVector contribution;
  std::vector<SessionLoad> loads;
};

/// Every patient picks one (linac, start day); sessions follow deterministically.
struct CompactModel {
  Horizon horizon;
  std::size_t num_linacs = 0;
  std::vector<std::vector<Candidate>> candidates;  // per batch patient, by (day, linac)
  std::vector<int> residual;                       // per cell: capacity minus ledger load

  std::uint32_t cell(std::size_t linac, Day day) const {
    return static_cast<std::uint32_t>(linac * static_cast<std::size_t>(horizon.length) +
                                      static_cast<std::size_t>(day - horizon.first));
  }
  std::size_t num_patients() const { return candidates.size(); }

  /// Position of the candidate with this assignment, or nullopt.
  std::optional<std::size_t> find(std::size_t patient, const Assignment& a) const;
};

/// Throws HorizonTooShort when a patient has no candidate.
CompactModel build_compact_model(std::span<const PatientCase> batch, const BookingState& state,
                                 Horizon horizon, Execution exec = Execution::Serial);

/// Capacity-feasibility of a full candidate choice (one index per patient).
bool fits_capacity(const CompactModel& model, std::span<const std::size_t> choice);

Schedule to_schedule(const CompactModel& model, std::span<const std::size_t> choice);

}  // namespace rtsched
