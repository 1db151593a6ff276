#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtsched/capacity.hpp"
#include "rtsched/instance.hpp"
#include "rtsched/parallel.hpp"
#include "rtsched/solver.hpp"

namespace rtsched {

/// Weekday sets on which a batch may be created: 7 (every day), 5 (Mon-Fri),
/// 3 (Mon, Wed, Fri), 2 (Tue, Fri), 1 (Fri).
WeekdaySet scd_days(int code);

/// Scheduling policy for urgent and routine patients. Emergencies are always
/// scheduled every day without deferral.
struct PolicyConfig {
  int scd_urgent = 7;
  int scd_routine = 7;
  std::optional<int> mnda_urgent;   // nullopt: no deferral
  std::optional<int> mnda_routine;

  int scd(WaitingListStatus s) const;
  std::optional<int> mnda(WaitingListStatus s) const;

  /// Throws std::invalid_argument on codes outside {7,5,3,2,1} / {0,7,14,21}.
  void validate() const;

  /// "scd=2,1 mnda=inf,7"
  std::string label() const;
  /// Accepts the label format; "scd=" and "mnda=" parts are optional.
  static PolicyConfig parse(std::string_view text);

  bool operator==(const PolicyConfig&) const = default;
};

inline constexpr std::array<int, 5> kScdCodes = {7, 5, 3, 2, 1};
inline constexpr std::array<std::optional<int>, 5> kMndaCodes = {std::nullopt, 21, 14, 7, 0};

/// 16 rows: urgent x routine over {5, 3, 2, 1}, MNDA off.
std::vector<PolicyConfig> scd_grid();
/// 25 rows: urgent x routine over {inf, 21, 14, 7, 0}, SCD fixed at 2/1.
std::vector<PolicyConfig> mnda_grid();

bool eligible_for_scheduling(const PatientCase& patient, Day today, Weekday weekday,
                             const PolicyConfig& policy);

struct SimulationOptions {
  SolveBudget budget;
  WeeklyHours hours;
  std::vector<Linac> fleet = default_fleet();
};

struct PatientOutcome {
  std::string id;
  WaitingListStatus status = WaitingListStatus::Routine;
  int weight = 1;
  Day booking = 0;
  Day release = 0;
  Day scheduled_on = 0;  // batch day
  Day start = 0;
  int linac = 0;  // fleet id
  bool breach = false;
  bool jcco_max = false;
  bool jcco_good = false;
  std::int64_t wait = 0;  // start - booking
  bool scored = false;    // arrived after the warm-up

  bool operator==(const PatientOutcome&) const = default;
};

/// Criteria of one batch before and after optimization.
struct BatchRecord {
  Day day = 0;
  std::size_t patients = 0;
  CriteriaVector constructive;
  CriteriaVector solved;
  bool operator==(const BatchRecord&) const = default;
};

/// Table-style aggregates over scored patients.
struct Aggregates {
  std::size_t patients = 0;
  double breach_pct = 0.0;
  double jmax_pct = 0.0;
  double jgood_pct = 0.0;
  double waiting = 0.0;

  double operator[](Objective o) const;
  bool operator==(const Aggregates&) const = default;
};

Aggregates aggregate(std::span<const PatientOutcome> patients);

struct SimulationOutcome {
  std::string instance;
  std::vector<PatientOutcome> patients;  // in commit order
  std::vector<BatchRecord> batches;
  std::vector<SessionRecord> sessions;  // final ledger

  Aggregates aggregates() const { return aggregate(patients); }
};

/// Called after each commit with the batch day, the batch, its schedule and the ledger.
using CommitObserver = std::function<void(Day, std::span<const PatientCase>, const Schedule&,
                                          const BookingLedger&)>;

/// Books `schedule` into the ledger. Throws CapacityViolation if it does not fit.
void commit(BookingLedger& ledger, const CapacityGrid& capacity, const Schedule& schedule,
            std::span<const PatientCase> batch, Calendar calendar);

/// Day-by-day booking: each day, eligible waiting patients are solved as one
/// batch starting tomorrow and committed.
class Simulation {
 public:
  Simulation(const Instance& instance, PolicyConfig policy, SimulationOptions options);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// True once every arrival has been booked.
  bool finished() const;
  /// The day the next step() processes.
  Day today() const { return today_; }
  /// Patients that today's batch would contain (arrived, waiting, eligible).
  std::vector<PatientCase> batch() const;
  /// Solves and commits today's batch, then advances to the next day.
  void step(const CommitObserver& observer = {});

  const BookingLedger& ledger() const { return ledger_; }
  const CapacityGrid& capacity() const { return capacity_; }
  BookingState state() const { return {options_.fleet, ledger_, capacity_, calendar_}; }
  const SimulationOutcome& outcome() const { return outcome_; }
  SimulationOutcome take_outcome();

 private:
  std::vector<std::size_t> eligible_today() const;

  const Instance& instance_;
  PolicyConfig policy_;
  SimulationOptions options_;
  Calendar calendar_;
  CapacityGrid capacity_;
  BookingLedger ledger_;
  std::vector<std::size_t> waiting_;
  std::size_t next_arrival_ = 0;
  Day today_ = 1;
  Day end_ = 0;
  SimulationOutcome outcome_;
};

/// Runs a Simulation until every patient is booked.
SimulationOutcome run_simulation(const Instance& instance, const PolicyConfig& policy,
                                 const SimulationOptions& options,
                                 const CommitObserver& observer = {});

/// Receives each finished outcome; may be called concurrently from worker threads.
using OutcomeSink = std::function<void(std::size_t, const SimulationOutcome&)>;

/// One outcome per instance, in input order.
std::vector<SimulationOutcome> simulate_instances(std::span<const Instance> instances,
                                                  const PolicyConfig& policy,
                                                  const SimulationOptions& options,
                                                  Execution exec = Execution::Parallel,
                                                  const OutcomeSink& on_done = {});

// ---------------------------------------------------------------------------
// Event log
// ---------------------------------------------------------------------------

/// `day  patient_id  linac  start_day  flags` where flags is three characters
/// (B breach, M maximum acceptable, G good practice, - when met).
void write_events(std::ostream& out, const SimulationOutcome& outcome);

struct Event {
  Day day = 0;
  std::string patient_id;
  int linac = 0;
  Day start = 0;
};

std::vector<Event> read_events(std::istream& in, const std::string& source = "<events>");

/// Rebuilds the outcome by booking the logged schedules against a fresh ledger.
SimulationOutcome replay(const Instance& instance, std::span<const Event> events,
                         const SimulationOptions& options);

/// Per-patient rows of an outcome.
void write_outcome(std::ostream& out, const SimulationOutcome& outcome);

}  // namespace rtsched
