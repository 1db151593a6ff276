#include "rtsched/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace rtsched {

WeekdaySet scd_days(int code) {
  using W = Weekday;
  switch (code) {
    case 7: return WeekdaySet::all();
    case 5: return WeekdaySet::weekdays();
    case 3: return {W::Mon, W::Wed, W::Fri};
    case 2: return {W::Tue, W::Fri};
    case 1: return {W::Fri};
    default: throw std::invalid_argument("SCD code must be one of 7,5,3,2,1");
  }
}

int PolicyConfig::scd(WaitingListStatus s) const {
  switch (s) {
    case WaitingListStatus::Emergency: return 7;
    case WaitingListStatus::Urgent: return scd_urgent;
    case WaitingListStatus::Routine: return scd_routine;
  }
  return 7;
}

std::optional<int> PolicyConfig::mnda(WaitingListStatus s) const {
  switch (s) {
    case WaitingListStatus::Emergency: return std::nullopt;
    case WaitingListStatus::Urgent: return mnda_urgent;
    case WaitingListStatus::Routine: return mnda_routine;
  }
  return std::nullopt;
}

void PolicyConfig::validate() const {
  scd_days(scd_urgent);
  scd_days(scd_routine);
  for (const auto& m : {mnda_urgent, mnda_routine}) {
    if (m && std::find(kMndaCodes.begin(), kMndaCodes.end(), m) == kMndaCodes.end()) {
      throw std::invalid_argument("MNDA must be one of inf,21,14,7,0");
    }
  }
}

namespace {

std::string mnda_text(const std::optional<int>& m) { return m ? std::to_string(*m) : "inf"; }

std::pair<std::string_view, std::string_view> split_pair(std::string_view v) {
  const auto comma = v.find(',');
  if (comma == std::string_view::npos) throw std::invalid_argument("expected U,R");
  return {v.substr(0, comma), v.substr(comma + 1)};
}

int parse_int(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

std::optional<int> parse_mnda(std::string_view text) {
  if (text == "inf" || text == "∞") return std::nullopt;
  return parse_int(text);
}

}  // namespace

std::string PolicyConfig::label() const {
  return "scd=" + std::to_string(scd_urgent) + "," + std::to_string(scd_routine) +
         " mnda=" + mnda_text(mnda_urgent) + "," + mnda_text(mnda_routine);
}

PolicyConfig PolicyConfig::parse(std::string_view text) {
  PolicyConfig p;
  std::istringstream in{std::string(text)};
  std::string part;
  while (in >> part) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed policy '" + part + "'");
    const std::string key = part.substr(0, eq);
    const auto [u, r] = split_pair(std::string_view(part).substr(eq + 1));
    if (key == "scd") {
      p.scd_urgent = parse_int(u);
      p.scd_routine = parse_int(r);
    } else if (key == "mnda") {
      p.mnda_urgent = parse_mnda(u);
      p.mnda_routine = parse_mnda(r);
    } else {
      throw std::invalid_argument("unknown policy key '" + key + "'");
    }
  }
  p.validate();
  return p;
}

std::vector<PolicyConfig> scd_grid() {
  std::vector<PolicyConfig> grid;
  for (int u : {5, 3, 2, 1}) {
    for (int r : {5, 3, 2, 1}) grid.push_back(PolicyConfig{u, r, std::nullopt, std::nullopt});
  }
  return grid;
}

std::vector<PolicyConfig> mnda_grid() {
  std::vector<PolicyConfig> grid;
  for (const auto& u : kMndaCodes) {
    for (const auto& r : kMndaCodes) grid.push_back(PolicyConfig{2, 1, u, r});
  }
  return grid;
}

bool eligible_for_scheduling(const PatientCase& patient, Day today, Weekday weekday,
                             const PolicyConfig& policy) {
  if (!scd_days(policy.scd(patient.status)).contains(weekday)) return false;
  const auto mnda = policy.mnda(patient.status);
  return !mnda || patient.release - today <= *mnda;
}

double Aggregates::operator[](Objective o) const {
  switch (o) {
    case Objective::Breach: return breach_pct;
    case Objective::JccoMax: return jmax_pct;
    case Objective::JccoGood: return jgood_pct;
    case Objective::Waiting: return waiting;
  }
  return 0.0;
}

Aggregates aggregate(std::span<const PatientOutcome> patients) {
  Aggregates a;
  std::int64_t breaches = 0, jmax = 0, jgood = 0, weight = 0, waiting = 0;
  for (const PatientOutcome& p : patients) {
    if (!p.scored) continue;
    ++a.patients;
    weight += p.weight;
    breaches += p.breach;
    if (p.jcco_max) jmax += p.weight;
    if (p.jcco_good) jgood += p.weight;
    if (p.wait > 0) waiting += p.weight * p.wait * p.wait;
  }
  if (a.patients == 0) return a;
  const auto n = static_cast<double>(a.patients);
  a.breach_pct = 100.0 * static_cast<double>(breaches) / n;
  a.jmax_pct = 100.0 * static_cast<double>(jmax) / static_cast<double>(weight);
  a.jgood_pct = 100.0 * static_cast<double>(jgood) / static_cast<double>(weight);
  a.waiting = static_cast<double>(waiting) / n;
  return a;
}

namespace {

std::vector<SessionRecord> session_records(const Schedule& schedule,
                                           std::span<const PatientCase> batch,
                                           Calendar calendar) {
  std::vector<SessionRecord> records;
  for (const SessionPlacement& s : expand(schedule, batch, calendar)) {
    const PatientCase& p = batch[s.patient];
    records.push_back(SessionRecord{p.id, s.linac, s.day,
                                    p.durations[static_cast<std::size_t>(s.session - 1)]});
  }
  return records;
}

PatientOutcome outcome_row(const PatientCase& p, const Linac& linac, Day day, Day start,
                           Day warmup_days) {
  const CriteriaVector c = start_contribution(p, start);
  PatientOutcome o;
  o.id = p.id;
  o.status = p.status;
  o.weight = p.weight;
  o.booking = p.booking;
  o.release = p.release;
  o.scheduled_on = day;
  o.start = start;
  o.linac = linac.id;
  o.breach = c.breach > 0;
  o.jcco_max = c.jcco_max > 0;
  o.jcco_good = c.jcco_good > 0;
  o.wait = start - p.booking;
  o.scored = p.booking > warmup_days;
  return o;
}

// Arrivals are processed for the whole span; afterwards only the backlog remains.
constexpr int kDrainLimitDays = 3650;

}  // namespace

void commit(BookingLedger& ledger, const CapacityGrid& capacity, const Schedule& schedule,
            std::span<const PatientCase> batch, Calendar calendar) {
  if (!schedule.complete()) throw UnassignedPatient("cannot commit an incomplete schedule");
  const auto records = session_records(schedule, batch, calendar);
  ledger.book(records, capacity);
}

Simulation::Simulation(const Instance& instance, PolicyConfig policy, SimulationOptions options)
    : instance_(instance),
      policy_(policy),
      options_(std::move(options)),
      calendar_(instance.calendar()),
      capacity_(options_.fleet.size(), calendar_, options_.hours),
      ledger_(options_.fleet.size()) {
  policy_.validate();
  outcome_.instance = instance.name;
  const Day last_arrival = instance.patients.empty() ? 0 : instance.patients.back().booking;
  end_ = std::max(instance.span_days, last_arrival);
}

bool Simulation::finished() const {
  return next_arrival_ == instance_.patients.size() && waiting_.empty();
}

std::vector<std::size_t> Simulation::eligible_today() const {
  const auto& all = instance_.patients;
  const Weekday weekday = calendar_.weekday(today_);
  std::vector<std::size_t> out;
  auto consider = [&](std::size_t idx) {
    if (eligible_for_scheduling(all[idx], today_, weekday, policy_)) out.push_back(idx);
  };
  for (std::size_t idx : waiting_) consider(idx);
  for (std::size_t idx = next_arrival_; idx < all.size() && all[idx].booking <= today_; ++idx) {
    consider(idx);
  }
  return out;
}

std::vector<PatientCase> Simulation::batch() const {
  std::vector<PatientCase> out;
  for (std::size_t idx : eligible_today()) out.push_back(instance_.patients[idx]);
  return out;
}

void Simulation::step(const CommitObserver& observer) {
  if (today_ > end_ + kDrainLimitDays) throw Error("simulation failed to drain the backlog");
  const auto& all = instance_.patients;
  const std::vector<std::size_t> chosen = eligible_today();
  while (next_arrival_ < all.size() && all[next_arrival_].booking <= today_) {
    waiting_.push_back(next_arrival_++);
  }
  const Day today = today_++;
  if (chosen.empty()) return;
  std::erase_if(waiting_, [&](std::size_t idx) {
    return std::find(chosen.begin(), chosen.end(), idx) != chosen.end();
  });

  std::vector<PatientCase> batch;
  for (std::size_t idx : chosen) batch.push_back(all[idx]);
  const BatchSolution solution =
      solve_batch(batch, state(), today + 1, options_.budget, Execution::Serial);
  commit(ledger_, capacity_, solution.schedule, batch, calendar_);
  outcome_.batches.push_back(
      BatchRecord{today, batch.size(), solution.constructive(), solution.solved()});
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Assignment& a = *solution.schedule.assignments[j];
    outcome_.patients.push_back(
        outcome_row(batch[j], options_.fleet[a.linac], today, a.start, instance_.warmup_days));
  }
  if (observer) observer(today, batch, solution.schedule, ledger_);
}

SimulationOutcome Simulation::take_outcome() {
  outcome_.sessions = ledger_.records();
  return std::move(outcome_);
}

SimulationOutcome run_simulation(const Instance& instance, const PolicyConfig& policy,
                                 const SimulationOptions& options,
                                 const CommitObserver& observer) {
  Simulation sim(instance, policy, options);
  while (!sim.finished()) sim.step(observer);
  return sim.take_outcome();
}

std::vector<SimulationOutcome> simulate_instances(std::span<const Instance> instances,
                                                  const PolicyConfig& policy,
                                                  const SimulationOptions& options,
                                                  Execution exec, const OutcomeSink& on_done) {
  std::vector<SimulationOutcome> out(instances.size());
  auto run_one = [&](std::size_t i) {
    out[i] = run_simulation(instances[i], policy, options);
    if (on_done) on_done(i, out[i]);
  };
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < instances.size(); ++i) run_one(i);
    return out;
  }
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(instances.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      run_one(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Event log
// ---------------------------------------------------------------------------

void write_events(std::ostream& out, const SimulationOutcome& outcome) {
  for (const PatientOutcome& p : outcome.patients) {
    out << p.scheduled_on << '\t' << p.id << '\t' << p.linac << '\t' << p.start << '\t'
        << (p.breach ? 'B' : '-') << (p.jcco_max ? 'M' : '-') << (p.jcco_good ? 'G' : '-')
        << '\n';
  }
}

std::vector<Event> read_events(std::istream& in, const std::string& source) {
  std::vector<Event> events;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::istringstream fields(line);
    Event e;
    std::string flags;
    if (!(fields >> e.day >> e.patient_id >> e.linac >> e.start >> flags)) {
      throw ParseError(source, number, "expected day, patient, linac, start and flags");
    }
    events.push_back(std::move(e));
  }
  return events;
}

SimulationOutcome replay(const Instance& instance, std::span<const Event> events,
                         const SimulationOptions& options) {
  const Calendar calendar = instance.calendar();
  const CapacityGrid capacity(options.fleet.size(), calendar, options.hours);
  BookingLedger ledger(options.fleet.size());
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t j = 0; j < instance.patients.size(); ++j) by_id[instance.patients[j].id] = j;
  std::unordered_map<int, std::size_t> linac_index;
  for (std::size_t i = 0; i < options.fleet.size(); ++i) linac_index[options.fleet[i].id] = i;

  SimulationOutcome outcome;
  outcome.instance = instance.name;
  std::vector<bool> booked(instance.patients.size(), false);
  for (std::size_t e = 0; e < events.size();) {
    // One commit per batch day.
    std::vector<PatientCase> batch;
    Schedule schedule;
    const Day day = events[e].day;
    for (; e < events.size() && events[e].day == day; ++e) {
      const auto p = by_id.find(events[e].patient_id);
      const auto l = linac_index.find(events[e].linac);
      if (p == by_id.end()) throw DataError("unknown patient " + events[e].patient_id);
      if (l == linac_index.end()) throw DataError("unknown linac in event log");
      if (booked[p->second]) throw DataError("patient " + events[e].patient_id + " booked twice");
      booked[p->second] = true;
      batch.push_back(instance.patients[p->second]);
      schedule.assignments.push_back(Assignment{l->second, events[e].start});
    }
    commit(ledger, capacity, schedule, batch, calendar);
    for (std::size_t j = 0; j < batch.size(); ++j) {
      const Assignment& a = *schedule.assignments[j];
      outcome.patients.push_back(
          outcome_row(batch[j], options.fleet[a.linac], day, a.start, instance.warmup_days));
    }
  }
  outcome.sessions = ledger.records();
  return outcome;
}

void write_outcome(std::ostream& out, const SimulationOutcome& outcome) {
  out << "#id\tstatus\tweight\tbooking\trelease\tscheduled_on\tstart\tlinac\twait\tbreach"
         "\tjcco_max\tjcco_good\tscored\n";
  for (const PatientOutcome& p : outcome.patients) {
    out << p.id << '\t' << to_string(p.status) << '\t' << p.weight << '\t' << p.booking << '\t'
        << p.release << '\t' << p.scheduled_on << '\t' << p.start << '\t' << p.linac << '\t'
        << p.wait << '\t' << p.breach << '\t' << p.jcco_max << '\t' << p.jcco_good << '\t'
        << p.scored << '\n';
  }
}

}  // namespace rtsched
