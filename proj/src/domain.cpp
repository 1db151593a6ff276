#include "rtsched/domain.hpp"

#include <algorithm>
#include <sstream>

namespace rtsched {

namespace {

constexpr std::array<std::string_view, 7> kWeekdayNames = {
    "Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

[[noreturn]] void bad_token(std::string_view what, std::string_view text) {
  throw DataError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

}  // namespace

std::string_view to_string(Weekday w) {
  return kWeekdayNames[static_cast<std::size_t>(w)];
}

std::optional<Weekday> parse_weekday(std::string_view text) {
  for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
    if (kWeekdayNames[i] == text) return static_cast<Weekday>(i);
  }
  return std::nullopt;
}

std::vector<Weekday> WeekdaySet::members() const {
  std::vector<Weekday> out;
  for (Weekday d : kAllWeekdays) {
    if (contains(d)) out.push_back(d);
  }
  return out;
}

std::string WeekdaySet::to_string() const {
  if (empty()) return "-";
  std::string out;
  for (Weekday d : members()) {
    if (!out.empty()) out += ',';
    out += rtsched::to_string(d);
  }
  return out;
}

WeekdaySet WeekdaySet::parse(std::string_view text) {
  WeekdaySet s;
  if (text == "-" || text.empty()) return s;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view token = text.substr(pos, comma - pos);
    auto day = parse_weekday(token);
    if (!day) bad_token("weekday", token);
    s.insert(*day);
    pos = comma + 1;
  }
  return s;
}

std::string_view to_string(WaitingListStatus s) {
  switch (s) {
    case WaitingListStatus::Emergency: return "emergency";
    case WaitingListStatus::Urgent: return "urgent";
    case WaitingListStatus::Routine: return "routine";
  }
  return "?";
}

std::string_view to_string(TreatmentIntent i) {
  return i == TreatmentIntent::Radical ? "radical" : "palliative";
}

std::string_view to_string(RadiationNeed r) {
  switch (r) {
    case RadiationNeed::LowEnergyPhotonOnly: return "low";
    case RadiationNeed::ElectronGroup: return "electron";
    case RadiationNeed::HighEnergyPhotonGroup: return "high";
  }
  return "?";
}

std::string_view to_string(MachineType t) {
  switch (t) {
    case MachineType::A: return "A";
    case MachineType::B: return "B";
    case MachineType::C: return "C";
  }
  return "?";
}

WaitingListStatus parse_status(std::string_view text) {
  for (auto s : {WaitingListStatus::Emergency, WaitingListStatus::Urgent,
                 WaitingListStatus::Routine}) {
    if (to_string(s) == text) return s;
  }
  bad_token("status", text);
}

TreatmentIntent parse_intent(std::string_view text) {
  for (auto i : {TreatmentIntent::Radical, TreatmentIntent::Palliative}) {
    if (to_string(i) == text) return i;
  }
  bad_token("intent", text);
}

RadiationNeed parse_radiation(std::string_view text) {
  for (auto r : {RadiationNeed::LowEnergyPhotonOnly, RadiationNeed::ElectronGroup,
                 RadiationNeed::HighEnergyPhotonGroup}) {
    if (to_string(r) == text) return r;
  }
  bad_token("radiation", text);
}

MachineType parse_machine_type(std::string_view text) {
  for (auto t : {MachineType::A, MachineType::B, MachineType::C}) {
    if (to_string(t) == text) return t;
  }
  bad_token("machine type", text);
}

std::string_view to_string(TwoDayAnchor a) {
  switch (a) {
    case TwoDayAnchor::None: return "-";
    case TwoDayAnchor::MonThu: return "MonThu";
    case TwoDayAnchor::TueFri: return "TueFri";
  }
  return "?";
}

TwoDayAnchor parse_anchor(std::string_view text) {
  for (auto a : {TwoDayAnchor::None, TwoDayAnchor::MonThu, TwoDayAnchor::TueFri}) {
    if (to_string(a) == text) return a;
  }
  bad_token("anchor", text);
}

void validate(const SessionPattern& p) {
  switch (p.days_per_week) {
    case 1: case 2: case 3: case 5: case 7: break;
    default:
      throw InvalidPatient("days_per_week must be one of 1,2,3,5,7");
  }
  if (p.sessions_per_day < 1) throw InvalidPatient("sessions_per_day must be positive");
  if (p.sessions_per_day > 1 && !p.chart) {
    throw InvalidPatient("multiple sessions per day require a CHART pattern");
  }
  if (p.chart && (p.sessions_per_day != SessionPattern::kChartSessionsPerDay ||
                  p.days_per_week != 7)) {
    throw InvalidPatient("CHART is 3 sessions per day, 7 days per week");
  }
  if ((p.days_per_week == 2) != (p.anchor != TwoDayAnchor::None)) {
    throw InvalidPatient("a two-day anchor is required exactly for 2 days/week");
  }
}

void validate(const PatientCase& p) {
  auto fail = [&](const std::string& what) {
    throw InvalidPatient("patient " + p.id + ": " + what);
  };
  try {
    validate(p.pattern);
  } catch (const InvalidPatient& e) {
    fail(e.what());
  }
  if (p.weight <= 0) fail("weight must be positive");
  if (p.release < p.booking) fail("release date precedes booking date");
  if (p.jcco_good > p.jcco_max) fail("good-practice date after maximum-acceptable date");
  if (p.durations.empty()) fail("at least one session is required");
  for (int d : p.durations) {
    if (d <= 0) fail("session durations must be positive");
  }
  if (p.pattern.chart &&
      p.num_sessions() != SessionPattern::kChartDays * SessionPattern::kChartSessionsPerDay) {
    fail("CHART requires 36 sessions over 12 days");
  }
  if (p.min_sessions_before_weekend < 0) fail("min_sessions_before_weekend is negative");
  if (p.doctor_days && p.doctor_days->empty()) fail("doctor_days present but empty");
  if (p.pattern.days_per_week == 7 && !p.weekend_ok) {
    fail("7 session days per week requires weekend treatment");
  }
}

std::vector<Linac> default_fleet() {
  return {{1, MachineType::A}, {2, MachineType::B}, {3, MachineType::C}, {4, MachineType::C}};
}

int patient_weight(WaitingListStatus status) {
  switch (status) {
    case WaitingListStatus::Emergency: return 10;
    case WaitingListStatus::Urgent: return 3;
    case WaitingListStatus::Routine: return 1;
  }
  return 1;
}

JccoTargets jcco_targets(WaitingListStatus status, TreatmentIntent intent) {
  if (status == WaitingListStatus::Emergency) return {1, 2};
  if (intent == TreatmentIntent::Palliative) return {2, 14};
  return {14, 28};
}

int session_gap(const SessionPattern& pattern, Weekday weekday, int session) {
  if (session < 1) throw std::invalid_argument("session index is 1-based");
  if (session % pattern.sessions_per_day != 0) return 0;

  auto invalid = [&]() -> int {
    throw InvalidWeekdayForPattern(std::string(to_string(weekday)) + " cannot host a " +
                                   std::to_string(pattern.days_per_week) +
                                   "-day/week session");
  };
  using W = Weekday;
  switch (pattern.days_per_week) {
    case 1:
      return 7;
    case 2:
      if (pattern.anchor == TwoDayAnchor::MonThu) {
        if (weekday == W::Mon) return 3;
        if (weekday == W::Thu) return 4;
      } else if (pattern.anchor == TwoDayAnchor::TueFri) {
        if (weekday == W::Tue) return 3;
        if (weekday == W::Fri) return 4;
      }
      return invalid();
    case 3:
      if (weekday == W::Mon || weekday == W::Wed) return 2;
      if (weekday == W::Fri) return 3;
      return invalid();
    case 5:
      if (is_weekend(weekday)) return invalid();
      return weekday == W::Fri ? 3 : 1;
    case 7:
      return 1;
    default:
      return invalid();
  }
}

SessionExpansion session_expansion(const PatientCase& patient, Weekday start) {
  SessionExpansion out;
  out.reserve(patient.durations.size());
  int offset = 0;
  for (int l = 1; l <= patient.num_sessions(); ++l) {
    out.push_back({offset, patient.durations[static_cast<std::size_t>(l - 1)]});
    if (l < patient.num_sessions()) {
      offset += session_gap(patient.pattern, advance(start, offset), l);
    }
  }
  return out;
}

WeekdaySet pattern_start_days(const PatientCase& patient) {
  using W = Weekday;
  const SessionPattern& p = patient.pattern;
  if (p.chart) return {W::Mon};
  if (patient.num_sessions() == 1 || p.days_per_week == 1) {
    return patient.weekend_ok ? WeekdaySet::all() : WeekdaySet::weekdays();
  }
  switch (p.days_per_week) {
    case 2:
      return p.anchor == TwoDayAnchor::MonThu ? WeekdaySet{W::Mon, W::Thu}
                                              : WeekdaySet{W::Tue, W::Fri};
    case 3:
      return {W::Mon, W::Wed, W::Fri};
    case 5:
      return WeekdaySet::weekdays();
    default:
      return WeekdaySet::all();
  }
}

namespace {

// Distinct session days strictly before the first weekend reached from `start`.
int session_days_before_weekend(const PatientCase& patient, Weekday start) {
  if (is_weekend(start)) return 0;
  const int until_weekend = static_cast<int>(Weekday::Sat) - static_cast<int>(start);
  int count = 0;
  int last = -1;
  for (const SessionSlot& s : session_expansion(patient, start)) {
    if (s.offset >= until_weekend) break;
    if (s.offset != last) ++count;
    last = s.offset;
  }
  return count;
}

}  // namespace

WeekdaySet allowed_start_days(const PatientCase& patient) {
  WeekdaySet pattern_days = pattern_start_days(patient);
  WeekdaySet out;
  for (Weekday d : pattern_days.members()) {
    if (patient.min_sessions_before_weekend > 0 &&
        session_days_before_weekend(patient, d) < patient.min_sessions_before_weekend) {
      continue;
    }
    out.insert(d);
  }
  if (patient.doctor_days) out = out & *patient.doctor_days;
  if (out.empty()) {
    throw EmptyStartDaySet("patient " + patient.id + " has no admissible first-session weekday");
  }
  return out;
}

}  // namespace rtsched
