#include "rtsched/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <omp.h>

namespace rtsched {

int max_threads() { return omp_get_max_threads(); }

void set_threads(int threads) { omp_set_num_threads(std::max(1, threads)); }

std::string_view to_string(Objective o) {
  switch (o) {
    case Objective::Breach: return "breach";
    case Objective::JccoMax: return "jcco_max";
    case Objective::JccoGood: return "jcco_good";
    case Objective::Waiting: return "waiting";
  }
  return "?";
}

std::int64_t CriteriaVector::operator[](Objective o) const {
  switch (o) {
    case Objective::Breach: return breach;
    case Objective::JccoMax: return jcco_max;
    case Objective::JccoGood: return jcco_good;
    case Objective::Waiting: return waiting;
  }
  return 0;
}

std::int64_t& CriteriaVector::operator[](Objective o) {
  switch (o) {
    case Objective::Breach: return breach;
    case Objective::JccoMax: return jcco_max;
    case Objective::JccoGood: return jcco_good;
    case Objective::Waiting: break;
  }
  return waiting;
}

CriteriaVector& CriteriaVector::operator+=(const CriteriaVector& o) {
  breach += o.breach;
  jcco_max += o.jcco_max;
  jcco_good += o.jcco_good;
  waiting += o.waiting;
  return *this;
}

bool CriteriaVector::dominated_by(const CriteriaVector& cap) const {
  return breach <= cap.breach && jcco_max <= cap.jcco_max && jcco_good <= cap.jcco_good &&
         waiting <= cap.waiting;
}

std::string CriteriaVector::to_string() const {
  std::ostringstream os;
  os << '(' << breach << ", " << jcco_max << ", " << jcco_good << ", " << waiting << ')';
  return os.str();
}

CriteriaVector start_contribution(const PatientCase& p, Day start) {
  CriteriaVector c;
  if (start > p.breach) c.breach = 1;
  if (start > p.jcco_max) c.jcco_max = p.weight;
  if (start > p.jcco_good) c.jcco_good = p.weight;
  if (start > p.booking) {
    const std::int64_t wait = start - p.booking;
    c.waiting = wait * wait * p.weight;
  }
  return c;
}

bool Schedule::complete() const {
  return std::all_of(assignments.begin(), assignments.end(),
                     [](const auto& a) { return a.has_value(); });
}

std::vector<SessionPlacement> expand(const Schedule& schedule, std::span<const PatientCase> batch,
                                     Calendar calendar) {
  if (schedule.size() != batch.size()) {
    throw std::invalid_argument("schedule and batch sizes differ");
  }
  std::vector<SessionPlacement> out;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto& a = schedule.assignments[j];
    if (!a) continue;
    const PatientCase& p = batch[j];
    Day day = a->start;
    for (int l = 1; l <= p.num_sessions(); ++l) {
      out.push_back({a->linac, j, day, l});
      if (l == p.num_sessions()) break;
      try {
        day += session_gap(p.pattern, calendar.weekday(day), l);
      } catch (const InvalidWeekdayForPattern&) {
        break;
      }
    }
  }
  return out;
}

std::optional<Day> last_session_day(const Schedule& schedule, std::span<const PatientCase> batch,
                                    Calendar calendar) {
  std::optional<Day> last;
  for (const SessionPlacement& s : expand(schedule, batch, calendar)) {
    if (!last || s.day > *last) last = s.day;
  }
  return last;
}

CriteriaVector evaluate_criteria(const Schedule& schedule, std::span<const PatientCase> batch) {
  if (schedule.size() != batch.size()) {
    throw UnassignedPatient("schedule covers " + std::to_string(schedule.size()) + " of " +
                            std::to_string(batch.size()) + " patients");
  }
  CriteriaVector total;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto& a = schedule.assignments[j];
    if (!a) throw UnassignedPatient("patient " + batch[j].id + " is not assigned");
    total += start_contribution(batch[j], a->start);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Verifier
// ---------------------------------------------------------------------------

std::string_view to_string(ConstraintFamily f) {
  switch (f) {
    case ConstraintFamily::Eligibility: return "eligibility";
    case ConstraintFamily::Release: return "release";
    case ConstraintFamily::StartWeekday: return "start_weekday";
    case ConstraintFamily::FirstDay: return "first_day";
    case ConstraintFamily::Sequence: return "sequence";
    case ConstraintFamily::Assignment: return "assignment";
    case ConstraintFamily::Capacity: return "capacity";
  }
  return "?";
}

std::string Violation::to_string() const {
  std::ostringstream os;
  auto field = [&os](const char* name, const auto& v, int shift) {
    os << ' ' << name << '=';
    if (v) {
      os << static_cast<long long>(*v) + shift;
    } else {
      os << '-';
    }
  };
  os << rtsched::to_string(family);
  field("i", linac, 1);
  field("j", patient, 1);
  field("k", day, 0);
  field("l", session, 0);
  return os.str();
}

bool hits_first_day(const SessionExpansion& sessions, Day start, Day horizon_first) {
  for (std::size_t l = 1; l < sessions.size(); ++l) {
    if (start + sessions[l].offset == horizon_first) return true;
  }
  return false;
}

namespace {

std::optional<int> try_gap(const SessionPattern& pattern, Weekday w, int session) {
  try {
    return session_gap(pattern, w, session);
  } catch (const InvalidWeekdayForPattern&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<Violation> check_placements(std::span<const SessionPlacement> placements,
                                        std::span<const PatientCase> batch,
                                        const BookingState& state, Horizon horizon) {
  const std::size_t num_linacs = state.fleet.size();
  std::set<SessionPlacement> present;
  for (const SessionPlacement& s : placements) {
    if (s.linac >= num_linacs || s.patient >= batch.size() || s.session < 1 ||
        s.session > batch[s.patient].num_sessions()) {
      throw std::invalid_argument("placement refers to an unknown linac, patient or session");
    }
    if (horizon.contains(s.day)) present.insert(s);
  }
  auto is_present = [&](std::size_t i, std::size_t j, Day day, int l) {
    return present.count(SessionPlacement{i, j, day, l}) > 0;
  };

  std::vector<WeekdaySet> start_days;
  start_days.reserve(batch.size());
  for (const PatientCase& p : batch) start_days.push_back(allowed_start_days(p));

  std::vector<Violation> out;
  auto report = [&](ConstraintFamily f, std::optional<std::size_t> i,
                    std::optional<std::size_t> j, std::optional<Day> day,
                    std::optional<int> l) {
    std::optional<int> k;
    if (day) k = horizon.relative(*day);
    out.push_back(Violation{f, i, j, k, l});
  };

  std::set<std::tuple<std::size_t, std::size_t, Day, int>> sequence_rows;
  std::map<std::pair<std::size_t, int>, int> assigned;
  std::map<std::pair<std::size_t, Day>, int> used;

  for (const SessionPlacement& s : present) {
    const PatientCase& p = batch[s.patient];
    if (state.fleet[s.linac].type != p.machine_type()) {
      report(ConstraintFamily::Eligibility, s.linac, s.patient, s.day, s.session);
    }
    if (s.day < p.release) {
      report(ConstraintFamily::Release, s.linac, s.patient, s.day, s.session);
    }
    if (s.session == 1 && !start_days[s.patient].contains(state.calendar.weekday(s.day))) {
      report(ConstraintFamily::StartWeekday, s.linac, s.patient, s.day, s.session);
    }
    if (s.session >= 2 && s.day == horizon.first) {
      report(ConstraintFamily::FirstDay, s.linac, s.patient, s.day, s.session);
    }
    if (s.session < p.num_sessions()) sequence_rows.insert({s.linac, s.patient, s.day, s.session});
    if (s.session >= 2) {
      // Rows whose successor side is this variable.
      for (Day k0 = std::max(horizon.first, s.day - 7); k0 <= s.day; ++k0) {
        auto u = try_gap(p.pattern, state.calendar.weekday(k0), s.session - 1);
        if (u && k0 + *u == s.day) sequence_rows.insert({s.linac, s.patient, k0, s.session - 1});
      }
    }
    assigned[{s.patient, s.session}] += 1;
    used[{s.linac, s.day}] += p.durations[static_cast<std::size_t>(s.session - 1)];
  }

  for (const auto& [i, j, day, l] : sequence_rows) {
    const PatientCase& p = batch[j];
    const bool here = is_present(i, j, day, l);
    auto u = try_gap(p.pattern, state.calendar.weekday(day), l);
    bool violated;
    if (!u || day + *u > horizon.last()) {
      violated = here;
    } else {
      violated = here != is_present(i, j, day + *u, l + 1);
    }
    if (violated) report(ConstraintFamily::Sequence, i, j, day, l);
  }

  for (std::size_t j = 0; j < batch.size(); ++j) {
    for (int l = 1; l <= batch[j].num_sessions(); ++l) {
      auto it = assigned.find({j, l});
      const int count = it == assigned.end() ? 0 : it->second;
      if (count != 1) report(ConstraintFamily::Assignment, std::nullopt, j, std::nullopt, l);
    }
  }

  for (const auto& [cell, minutes] : used) {
    const auto& [i, day] = cell;
    if (minutes + state.ledger.load(i, day) > state.capacity.minutes(i, day)) {
      report(ConstraintFamily::Capacity, i, std::nullopt, day, std::nullopt);
    }
  }

  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Violation> check_feasibility(const Schedule& schedule,
                                         std::span<const PatientCase> batch,
                                         const BookingState& state, Horizon horizon) {
  const auto placements = expand(schedule, batch, state.calendar);
  return check_placements(placements, batch, state, horizon);
}

// ---------------------------------------------------------------------------
// Compact model
// ---------------------------------------------------------------------------

std::optional<std::size_t> CompactModel::find(std::size_t patient, const Assignment& a) const {
  const auto& list = candidates.at(patient);
  for (std::size_t c = 0; c < list.size(); ++c) {
    if (list[c].linac == a.linac && list[c].start == a.start) return c;
  }
  return std::nullopt;
}

namespace {

std::vector<Candidate> patient_candidates(const PatientCase& p, const BookingState& state,
                                          const CompactModel& model) {
  const Horizon& h = model.horizon;
  const WeekdaySet allowed = allowed_start_days(p);
  std::array<std::optional<SessionExpansion>, 7> by_weekday;
  for (Weekday w : allowed.members()) {
    by_weekday[static_cast<std::size_t>(w)] = session_expansion(p, w);
  }
  std::vector<Candidate> out;
  for (Day start = std::max(h.first, p.release); start <= h.last(); ++start) {
    const auto& sessions = by_weekday[static_cast<std::size_t>(state.calendar.weekday(start))];
    if (!sessions) continue;
    if (start + sessions->back().offset > h.last()) continue;
    if (hits_first_day(*sessions, start, h.first)) continue;
    const CriteriaVector contribution = start_contribution(p, start);
    for (std::size_t i = 0; i < state.fleet.size(); ++i) {
      if (state.fleet[i].type != p.machine_type()) continue;
      Candidate c;
      c.linac = i;
      c.start = start;
      c.contribution = contribution;
      c.loads.reserve(sessions->size());
      for (const SessionSlot& s : *sessions) {
        c.loads.push_back({model.cell(i, start + s.offset), s.duration});
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

CompactModel build_compact_model(std::span<const PatientCase> batch, const BookingState& state,
                                 Horizon horizon, Execution exec) {
  if (horizon.length < 1) throw HorizonTooShort("horizon must contain at least one day");
  CompactModel model;
  model.horizon = horizon;
  model.num_linacs = state.fleet.size();
  model.residual.resize(model.num_linacs * static_cast<std::size_t>(horizon.length));
  for (std::size_t i = 0; i < model.num_linacs; ++i) {
    for (Day d = horizon.first; d <= horizon.last(); ++d) {
      model.residual[model.cell(i, d)] = state.ledger.remaining(state.capacity, i, d);
    }
  }
  model.candidates.resize(batch.size());

  const auto n = static_cast<std::ptrdiff_t>(batch.size());
  if (exec == Execution::Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      try {
        model.candidates[static_cast<std::size_t>(j)] =
            patient_candidates(batch[static_cast<std::size_t>(j)], state, model);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      model.candidates[static_cast<std::size_t>(j)] =
          patient_candidates(batch[static_cast<std::size_t>(j)], state, model);
    }
  }

  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (model.candidates[j].empty()) {
      throw HorizonTooShort("patient " + batch[j].id + " has no feasible start within " +
                            std::to_string(horizon.length) + " days");
    }
  }
  return model;
}

bool fits_capacity(const CompactModel& model, std::span<const std::size_t> choice) {
  std::vector<int> residual = model.residual;
  for (std::size_t j = 0; j < choice.size(); ++j) {
    for (const SessionLoad& load : model.candidates[j][choice[j]].loads) {
      residual[load.cell] -= load.minutes;
      if (residual[load.cell] < 0) return false;
    }
  }
  return true;
}

Schedule to_schedule(const CompactModel& model, std::span<const std::size_t> choice) {
  Schedule s(model.num_patients());
  for (std::size_t j = 0; j < choice.size(); ++j) {
    const Candidate& c = model.candidates[j][choice[j]];
    s.assignments[j] = Assignment{c.linac, c.start};
  }
  return s;
}

}  // namespace rtsched
