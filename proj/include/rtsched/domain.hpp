#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rtsched {

/// Integer day index. Day 1 is the first day of the instance calendar.
using Day = int;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Instance data that violates a domain invariant (exit code 2 in the CLI).
class DataError : public Error {
 public:
  using Error::Error;
};

class InvalidWeekdayForPattern : public DataError {
 public:
  using DataError::DataError;
};

class EmptyStartDaySet : public DataError {
 public:
  using DataError::DataError;
};

class InvalidPatient : public DataError {
 public:
  using DataError::DataError;
};

// ---------------------------------------------------------------------------
// Weekdays
// ---------------------------------------------------------------------------

enum class Weekday : std::uint8_t { Mon, Tue, Wed, Thu, Fri, Sat, Sun };

inline constexpr std::array<Weekday, 7> kAllWeekdays = {
    Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu,
    Weekday::Fri, Weekday::Sat, Weekday::Sun};

constexpr Weekday advance(Weekday w, int days) {
  int v = (static_cast<int>(w) + days) % 7;
  if (v < 0) v += 7;
  return static_cast<Weekday>(v);
}

constexpr bool is_weekend(Weekday w) {
  return w == Weekday::Sat || w == Weekday::Sun;
}

std::string_view to_string(Weekday w);
std::optional<Weekday> parse_weekday(std::string_view text);

/// Small bitset over the seven weekdays.
class WeekdaySet {
 public:
  constexpr WeekdaySet() = default;
  constexpr WeekdaySet(std::initializer_list<Weekday> days) {
    for (Weekday d : days) insert(d);
  }

  static constexpr WeekdaySet all() { return from_bits(0x7f); }
  static constexpr WeekdaySet weekdays() { return from_bits(0x1f); }
  static constexpr WeekdaySet from_bits(std::uint8_t bits) {
    WeekdaySet s;
    s.bits_ = bits & 0x7f;
    return s;
  }

  constexpr void insert(Weekday d) { bits_ |= bit(d); }
  constexpr void erase(Weekday d) { bits_ &= static_cast<std::uint8_t>(~bit(d)); }
  constexpr bool contains(Weekday d) const { return (bits_ & bit(d)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return __builtin_popcount(bits_); }
  constexpr std::uint8_t bits() const { return bits_; }

  constexpr WeekdaySet operator&(WeekdaySet o) const { return from_bits(bits_ & o.bits_); }
  constexpr WeekdaySet operator|(WeekdaySet o) const { return from_bits(bits_ | o.bits_); }
  constexpr bool subset_of(WeekdaySet o) const { return (bits_ & ~o.bits_) == 0; }
  constexpr bool operator==(const WeekdaySet&) const = default;

  std::vector<Weekday> members() const;

  /// Comma-separated three-letter names, e.g. "Mon,Thu"; "-" when empty.
  std::string to_string() const;
  /// Inverse of to_string(). Throws DataError on unknown names.
  static WeekdaySet parse(std::string_view text);

 private:
  static constexpr std::uint8_t bit(Weekday d) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
  }
  std::uint8_t bits_ = 0;
};

// ---------------------------------------------------------------------------
// Patient categories
// ---------------------------------------------------------------------------

/// Declared in increasing priority.
enum class WaitingListStatus : std::uint8_t { Routine, Urgent, Emergency };
enum class TreatmentIntent : std::uint8_t { Radical, Palliative };
enum class RadiationNeed : std::uint8_t {
  LowEnergyPhotonOnly,
  ElectronGroup,
  HighEnergyPhotonGroup
};
enum class MachineType : std::uint8_t { A, B, C };

inline constexpr int priority(WaitingListStatus s) { return static_cast<int>(s); }

/// A emits low energy photons, B adds electrons, C emits all three types.
/// Patients are routed to the single type matching their group.
constexpr MachineType machine_type_for(RadiationNeed need) {
  switch (need) {
    case RadiationNeed::LowEnergyPhotonOnly: return MachineType::A;
    case RadiationNeed::ElectronGroup: return MachineType::B;
    case RadiationNeed::HighEnergyPhotonGroup: return MachineType::C;
  }
  return MachineType::C;
}

std::string_view to_string(WaitingListStatus s);
std::string_view to_string(TreatmentIntent i);
std::string_view to_string(RadiationNeed r);
std::string_view to_string(MachineType t);
WaitingListStatus parse_status(std::string_view text);
TreatmentIntent parse_intent(std::string_view text);
RadiationNeed parse_radiation(std::string_view text);
MachineType parse_machine_type(std::string_view text);

// ---------------------------------------------------------------------------
// Session patterns
// ---------------------------------------------------------------------------

enum class TwoDayAnchor : std::uint8_t { None, MonThu, TueFri };

std::string_view to_string(TwoDayAnchor a);
TwoDayAnchor parse_anchor(std::string_view text);

struct SessionPattern {
  int days_per_week = 5;
  int sessions_per_day = 1;
  TwoDayAnchor anchor = TwoDayAnchor::None;
  bool chart = false;

  static constexpr int kChartSessionsPerDay = 3;
  static constexpr int kChartDays = 12;

  static SessionPattern weekly(int days_per_week,
                               TwoDayAnchor anchor = TwoDayAnchor::None) {
    return SessionPattern{days_per_week, 1, anchor, false};
  }
  static SessionPattern chart_pattern() {
    return SessionPattern{7, kChartSessionsPerDay, TwoDayAnchor::None, true};
  }

  bool operator==(const SessionPattern&) const = default;
};

/// Throws InvalidPatient when the pattern fields are inconsistent.
void validate(const SessionPattern& pattern);

// ---------------------------------------------------------------------------
// Patients, linacs, calendar
// ---------------------------------------------------------------------------

struct PatientCase {
  std::string id;
  WaitingListStatus status = WaitingListStatus::Routine;
  TreatmentIntent intent = TreatmentIntent::Radical;
  RadiationNeed radiation = RadiationNeed::HighEnergyPhotonGroup;
  int weight = 1;
  Day booking = 0;     // decision to treat
  Day release = 0;     // pre-treatment finished
  Day breach = 0;      // 31-day target
  Day jcco_max = 0;    // maximum acceptable
  Day jcco_good = 0;   // good practice
  std::vector<int> durations;  // minutes, one per session
  SessionPattern pattern;
  int min_sessions_before_weekend = 0;
  std::optional<WeekdaySet> doctor_days;
  bool weekend_ok = false;

  int num_sessions() const { return static_cast<int>(durations.size()); }
  MachineType machine_type() const { return machine_type_for(radiation); }
};

/// Throws InvalidPatient naming the first broken invariant.
void validate(const PatientCase& patient);

struct Linac {
  int id = 0;
  MachineType type = MachineType::C;
};

/// The four-machine fleet: one A, one B, two C.
std::vector<Linac> default_fleet();

/// Maps absolute day indices to weekdays.
struct Calendar {
  Weekday day_one = Weekday::Mon;

  constexpr Weekday weekday(Day day) const { return advance(day_one, day - 1); }
  bool operator==(const Calendar&) const = default;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Relative importance used by the weighted criteria: 10 / 3 / 1.
int patient_weight(WaitingListStatus status);

struct JccoTargets {
  int good_practice_days = 0;
  int max_acceptable_days = 0;
  bool operator==(const JccoTargets&) const = default;
};

/// Offsets from the decision-to-treat date (hour targets rounded to days).
JccoTargets jcco_targets(WaitingListStatus status, TreatmentIntent intent);

inline constexpr int kBreachDays = 31;

/// Days between session `session` (1-based) and the next one when `session`
/// falls on `weekday`. Zero for a further fraction on the same day.
int session_gap(const SessionPattern& pattern, Weekday weekday, int session);

struct SessionSlot {
  int offset = 0;  // days after the first session
  int duration = 0;
  bool operator==(const SessionSlot&) const = default;
};

using SessionExpansion = std::vector<SessionSlot>;

/// All sessions of the patient relative to a first session on `start`.
SessionExpansion session_expansion(const PatientCase& patient, Weekday start);

/// W_j: weekdays on which the first session may take place.
WeekdaySet allowed_start_days(const PatientCase& patient);

/// First-session weekdays the pattern alone admits.
WeekdaySet pattern_start_days(const PatientCase& patient);

}  // namespace rtsched
