#include "rtsched/solver.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_map>

namespace rtsched {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::int64_t kUnreachable = std::numeric_limits<std::int64_t>::max() / 4;

Clock::time_point deadline_after(double seconds) {
  if (!(seconds < 1e9)) return Clock::time_point::max();
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(std::max(0.0, seconds)));
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double SolveBudget::share(int active_groups) const {
  if (redistribute_idle) return active_groups > 0 ? total_seconds / active_groups : total_seconds;
  return total_seconds / 3.0;
}

// ---------------------------------------------------------------------------
// Constructive heuristic
// ---------------------------------------------------------------------------

std::vector<std::size_t> constructive_order(std::span<const PatientCase> batch) {
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const PatientCase& x = batch[a];
    const PatientCase& y = batch[b];
    if (x.status != y.status) return priority(x.status) > priority(y.status);
    if (x.breach != y.breach) return x.breach < y.breach;
    if (x.jcco_max != y.jcco_max) return x.jcco_max < y.jcco_max;
    if (x.num_sessions() != y.num_sessions()) return x.num_sessions() > y.num_sessions();
    if (x.id != y.id) return x.id < y.id;
    return a < b;
  });
  return order;
}

Schedule constructive_schedule(std::span<const PatientCase> batch, const BookingState& state,
                               Day first_day) {
  Schedule schedule(batch.size());
  std::unordered_map<std::uint64_t, int> tentative;
  auto cell = [](std::size_t linac, Day day) {
    return (static_cast<std::uint64_t>(linac) << 32) | static_cast<std::uint32_t>(day);
  };
  auto free_minutes = [&](std::size_t linac, Day day) {
    auto it = tentative.find(cell(linac, day));
    const int used = it == tentative.end() ? 0 : it->second;
    return state.ledger.remaining(state.capacity, linac, day) - used;
  };

  for (std::size_t j : constructive_order(batch)) {
    const PatientCase& p = batch[j];
    const WeekdaySet allowed = allowed_start_days(p);
    std::array<std::optional<SessionExpansion>, 7> by_weekday;
    for (Weekday w : allowed.members()) {
      by_weekday[static_cast<std::size_t>(w)] = session_expansion(p, w);
    }
    bool placed = false;
    const Day earliest = std::max(first_day, p.release);
    for (Day start = earliest; start < earliest + kConstructiveSearchDays && !placed; ++start) {
      const auto& sessions = by_weekday[static_cast<std::size_t>(state.calendar.weekday(start))];
      if (!sessions || hits_first_day(*sessions, start, first_day)) continue;
      for (std::size_t i = 0; i < state.fleet.size() && !placed; ++i) {
        if (state.fleet[i].type != p.machine_type()) continue;
        bool fits = true;
        for (std::size_t s = 0; s < sessions->size() && fits;) {
          // Same-day fractions are checked together.
          const int offset = (*sessions)[s].offset;
          int need = 0;
          for (; s < sessions->size() && (*sessions)[s].offset == offset; ++s) {
            need += (*sessions)[s].duration;
          }
          fits = free_minutes(i, start + offset) >= need;
        }
        if (!fits) continue;
        for (const SessionSlot& s : *sessions) tentative[cell(i, start + s.offset)] += s.duration;
        schedule.assignments[j] = Assignment{i, start};
        placed = true;
      }
    }
    if (!placed) {
      throw NoFeasiblePlacement("patient " + p.id + " cannot be placed within " +
                                std::to_string(kConstructiveSearchDays) + " days");
    }
  }
  return schedule;
}

int compute_horizon(const Schedule& schedule, std::span<const PatientCase> batch,
                    Calendar calendar, Day first_day) {
  const auto last = last_session_day(schedule, batch, calendar);
  const Day end = last ? *last : first_day;
  return end - first_day + 1 + kHorizonSlackDays;
}

std::array<std::vector<std::size_t>, 3> decompose(std::span<const PatientCase> batch) {
  std::array<std::vector<std::size_t>, 3> groups;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    groups[static_cast<std::size_t>(batch[j].machine_type())].push_back(j);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Branch and bound over candidate assignments
// ---------------------------------------------------------------------------

namespace {

struct SearchSpec {
  std::vector<std::size_t> patient_order;
  std::vector<std::vector<std::uint32_t>> candidate_order;  // per patient
  std::optional<Objective> minimize;  // nullopt: first feasible leaf under the caps
  std::array<std::optional<std::int64_t>, 4> caps;
};

struct SearchOutcome {
  bool improved = false;
  bool complete = false;  // search space exhausted (or first leaf found)
  std::int64_t nodes = 0;
};

class Search {
 public:
  Search(const CompactModel& model, const SearchSpec& spec, std::vector<std::size_t>& incumbent,
         std::int64_t& incumbent_value, Clock::time_point deadline,
         std::optional<std::int64_t> node_limit)
      : model_(model),
        spec_(spec),
        incumbent_(incumbent),
        best_(incumbent_value),
        deadline_(deadline),
        node_limit_(node_limit),
        residual_(model.residual),
        choice_(model.num_patients(), 0) {
    const std::size_t n = spec.patient_order.size();
    suffix_.assign(n + 1, CriteriaVector{});
    for (std::size_t pos = n; pos-- > 0;) {
      CriteriaVector lo{kUnreachable, kUnreachable, kUnreachable, kUnreachable};
      const std::size_t p = spec.patient_order[pos];
      for (std::uint32_t c : spec.candidate_order[p]) {
        const CriteriaVector& v = model.candidates[p][c].contribution;
        for (Objective o : kObjectives) lo[o] = std::min(lo[o], v[o]);
      }
      suffix_[pos] = lo + suffix_[pos + 1];
    }
  }

  SearchOutcome run() {
    if (root_pruned()) return {false, true, 0};
    dfs(0);
    return {improved_, !aborted_, nodes_};
  }

 private:
  bool root_pruned() const {
    for (Objective o : kObjectives) {
      const auto& cap = spec_.caps[idx(o)];
      if (cap && suffix_[0][o] > *cap) return true;
    }
    return spec_.minimize && suffix_[0][*spec_.minimize] >= best_;
  }

  static std::size_t idx(Objective o) { return static_cast<std::size_t>(static_cast<int>(o) - 1); }

  bool out_of_budget() {
    ++nodes_;
    if (node_limit_ && nodes_ > *node_limit_) return true;
    return deadline_ != Clock::time_point::max() && Clock::now() >= deadline_;
  }

  void dfs(std::size_t pos) {
    if (pos == spec_.patient_order.size()) {
      if (spec_.minimize) best_ = partial_[*spec_.minimize];
      incumbent_ = choice_;
      improved_ = true;
      if (!spec_.minimize) done_ = true;
      return;
    }
    const std::size_t p = spec_.patient_order[pos];
    const CriteriaVector& rest = suffix_[pos + 1];
    for (std::uint32_t c : spec_.candidate_order[p]) {
      const Candidate& cand = model_.candidates[p][c];
      const CriteriaVector& v = cand.contribution;
      if (spec_.minimize) {
        const Objective m = *spec_.minimize;
        if (partial_[m] + v[m] + rest[m] >= best_) break;  // candidates sorted by v[m]
      }
      bool capped = false;
      for (Objective o : kObjectives) {
        const auto& cap = spec_.caps[idx(o)];
        if (cap && partial_[o] + v[o] + rest[o] > *cap) {
          capped = true;
          break;
        }
      }
      if (capped) continue;
      if (out_of_budget()) {
        aborted_ = true;
        return;
      }
      if (!apply(cand)) continue;
      choice_[p] = c;
      partial_ += v;
      dfs(pos + 1);
      partial_.breach -= v.breach;
      partial_.jcco_max -= v.jcco_max;
      partial_.jcco_good -= v.jcco_good;
      partial_.waiting -= v.waiting;
      undo(cand);
      if (aborted_ || done_) return;
    }
  }

  bool apply(const Candidate& cand) {
    for (std::size_t s = 0; s < cand.loads.size(); ++s) {
      const SessionLoad& load = cand.loads[s];
      residual_[load.cell] -= load.minutes;
      if (residual_[load.cell] < 0) {
        for (std::size_t r = 0; r <= s; ++r) residual_[cand.loads[r].cell] += cand.loads[r].minutes;
        return false;
      }
    }
    return true;
  }

  void undo(const Candidate& cand) {
    for (const SessionLoad& load : cand.loads) residual_[load.cell] += load.minutes;
  }

  const CompactModel& model_;
  const SearchSpec& spec_;
  std::vector<std::size_t>& incumbent_;
  std::int64_t& best_;
  Clock::time_point deadline_;
  std::optional<std::int64_t> node_limit_;
  std::vector<int> residual_;
  std::vector<std::size_t> choice_;
  std::vector<CriteriaVector> suffix_;
  CriteriaVector partial_;
  std::int64_t nodes_ = 0;
  bool aborted_ = false;
  bool improved_ = false;
  bool done_ = false;
};

// Candidates that fit the residual capacity on their own.
std::vector<std::uint32_t> attainable(const CompactModel& model, std::size_t p) {
  std::vector<std::uint32_t> out;
  const auto& list = model.candidates[p];
  for (std::uint32_t c = 0; c < list.size(); ++c) {
    std::unordered_map<std::uint32_t, int> need;
    bool ok = true;
    for (const SessionLoad& load : list[c].loads) {
      if ((need[load.cell] += load.minutes) > model.residual[load.cell]) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(c);
  }
  return out;
}

CriteriaVector value_of(const CompactModel& model, std::span<const std::size_t> choice) {
  CriteriaVector total;
  for (std::size_t p = 0; p < choice.size(); ++p) total += model.candidates[p][choice[p]].contribution;
  return total;
}

}  // namespace

LexicographicResult lexicographic_solve(const CompactModel& model,
                                        std::span<const PatientCase> batch, StageLimits limits,
                                        const Schedule& warm_start) {
  const std::size_t n = model.num_patients();
  if (batch.size() != n || warm_start.size() != n) {
    throw std::invalid_argument("model, batch and warm start sizes differ");
  }
  std::vector<std::size_t> incumbent(n);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& a = warm_start.assignments[p];
    auto pos = a ? model.find(p, *a) : std::nullopt;
    if (!pos) throw std::invalid_argument("warm start is not a candidate of the model");
    incumbent[p] = *pos;
  }
  if (!fits_capacity(model, incumbent)) {
    throw std::invalid_argument("warm start exceeds the available capacity");
  }

  std::vector<std::vector<std::uint32_t>> usable(n);
  for (std::size_t p = 0; p < n; ++p) usable[p] = attainable(model, p);

  const Clock::time_point deadline_all = deadline_after(limits.seconds);
  auto stage_deadline = [&](int remaining_stages) {
    if (deadline_all == Clock::time_point::max()) return deadline_all;
    const auto left = deadline_all - Clock::now();
    return Clock::now() + left / remaining_stages;
  };

  LexicographicResult result;
  SearchSpec spec;
  spec.patient_order = constructive_order(batch);
  spec.candidate_order.resize(n);

  for (std::size_t s = 0; s < kObjectives.size(); ++s) {
    const Objective m = kObjectives[s];
    const auto stage_start = Clock::now();
    for (std::size_t p = 0; p < n; ++p) {
      auto order = usable[p];
      const auto& list = model.candidates[p];
      std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const Candidate& x = list[a];
        const Candidate& y = list[b];
        if (x.contribution[m] != y.contribution[m]) return x.contribution[m] < y.contribution[m];
        if (x.start != y.start) return x.start < y.start;
        return x.linac < y.linac;
      });
      spec.candidate_order[p] = std::move(order);
    }
    spec.minimize = m;
    std::int64_t value = value_of(model, incumbent)[m];
    Search search(model, spec, incumbent, value, stage_deadline(5 - static_cast<int>(s)),
                  limits.node_limit);
    const SearchOutcome out = search.run();
    result.stages[s] = StageResult{m, value, out.complete, out.nodes, seconds_since(stage_start)};
    spec.caps[s] = value;
  }

  // Among solutions meeting every cap, the first in (start, linac) order by id.
  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::stable_sort(by_id.begin(), by_id.end(),
                   [&](std::size_t a, std::size_t b) { return batch[a].id < batch[b].id; });
  spec.patient_order = by_id;
  spec.minimize.reset();
  for (std::size_t p = 0; p < n; ++p) spec.candidate_order[p] = usable[p];
  std::vector<std::size_t> canonical = incumbent;
  std::int64_t unused = 0;
  Search tie_break(model, spec, canonical, unused, stage_deadline(1), limits.node_limit);
  const SearchOutcome out = tie_break.run();
  result.tie_break_complete = out.complete && out.improved;
  result.tie_break_nodes = out.nodes;
  if (out.improved) incumbent = canonical;

  result.schedule = to_schedule(model, incumbent);
  return result;
}

// ---------------------------------------------------------------------------
// Batch orchestration
// ---------------------------------------------------------------------------

CriteriaVector BatchSolution::constructive() const {
  CriteriaVector total;
  for (const GroupReport& g : groups) total += g.constructive;
  return total;
}

CriteriaVector BatchSolution::solved() const {
  CriteriaVector total;
  for (const GroupReport& g : groups) total += g.solved;
  return total;
}

namespace {

std::vector<PatientCase> subset(std::span<const PatientCase> batch,
                                const std::vector<std::size_t>& idx) {
  std::vector<PatientCase> out;
  out.reserve(idx.size());
  for (std::size_t j : idx) out.push_back(batch[j]);
  return out;
}

}  // namespace

BatchSolution solve_batch(std::span<const PatientCase> batch, const BookingState& state,
                          Day first_day, const SolveBudget& budget, Execution exec) {
  BatchSolution solution;
  solution.schedule = Schedule(batch.size());
  if (batch.empty()) return solution;

  const auto groups = decompose(batch);
  const int active = static_cast<int>(
      std::count_if(groups.begin(), groups.end(), [](const auto& g) { return !g.empty(); }));
  const StageLimits limits{budget.share(active), budget.node_limit};

  std::array<std::optional<GroupReport>, 3> reports;
  std::array<Schedule, 3> schedules;
  std::exception_ptr failure;

  auto solve_group = [&](std::size_t g) {
    const std::vector<PatientCase> sub = subset(batch, groups[g]);
    const Schedule warm = constructive_schedule(sub, state, first_day);
    const int T = compute_horizon(warm, sub, state.calendar, first_day);
    const CompactModel model = build_compact_model(sub, state, Horizon{first_day, T});
    LexicographicResult lex = lexicographic_solve(model, sub, limits, warm);
    GroupReport report;
    report.group = static_cast<MachineType>(g);
    report.patients = sub.size();
    report.horizon = T;
    report.constructive = evaluate_criteria(warm, sub);
    report.solved = evaluate_criteria(lex.schedule, sub);
    report.stages = lex.stages;
    reports[g] = report;
    schedules[g] = std::move(lex.schedule);
  };

  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int g = 0; g < 3; ++g) {
      if (groups[static_cast<std::size_t>(g)].empty()) continue;
      try {
        solve_group(static_cast<std::size_t>(g));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::size_t g = 0; g < 3; ++g) {
      if (!groups[g].empty()) solve_group(g);
    }
  }

  for (std::size_t g = 0; g < 3; ++g) {
    if (!reports[g]) continue;
    for (std::size_t p = 0; p < groups[g].size(); ++p) {
      solution.schedule.assignments[groups[g][p]] = schedules[g].assignments[p];
    }
    solution.groups.push_back(*reports[g]);
  }
  return solution;
}

Horizon planning_horizon(std::span<const PatientCase> batch, const BookingState& state,
                         Day first_day) {
  int T = 1;
  for (const auto& idx : decompose(batch)) {
    if (idx.empty()) continue;
    const std::vector<PatientCase> sub = subset(batch, idx);
    const Schedule warm = constructive_schedule(sub, state, first_day);
    T = std::max(T, compute_horizon(warm, sub, state.calendar, first_day));
  }
  return Horizon{first_day, T};
}

}  // namespace rtsched
