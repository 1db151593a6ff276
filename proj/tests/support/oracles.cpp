#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <set>

namespace rtsched::testing {

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

RadiationNeed need_for(MachineType t) {
  switch (t) {
    case MachineType::A: return RadiationNeed::LowEnergyPhotonOnly;
    case MachineType::B: return RadiationNeed::ElectronGroup;
    case MachineType::C: return RadiationNeed::HighEnergyPhotonGroup;
  }
  return RadiationNeed::HighEnergyPhotonGroup;
}

// Start days inside the horizon whose sessions all fit, ignoring capacity.
bool has_start(const PatientCase& p, Calendar calendar, Horizon h) {
  const WeekdaySet allowed = allowed_start_days(p);
  for (Day s = std::max(h.first, p.release); s <= h.last(); ++s) {
    const Weekday w = calendar.weekday(s);
    if (!allowed.contains(w)) continue;
    const SessionExpansion e = session_expansion(p, w);
    if (s + e.back().offset > h.last()) continue;
    bool first_day_clash = false;
    for (std::size_t l = 1; l < e.size(); ++l) first_day_clash |= s + e[l].offset == h.first;
    if (!first_day_clash) return true;
  }
  return false;
}

}  // namespace

PatientCase random_patient(std::mt19937_64& rng, const std::string& id, Day first, int horizon,
                           int max_sessions, RadiationNeed need) {
  static constexpr int kDaysPerWeek[] = {1, 2, 3, 5, 7};
  for (;;) {
    PatientCase p;
    p.id = id;
    p.status = static_cast<WaitingListStatus>(uniform(rng, 0, 2));
    p.intent = static_cast<TreatmentIntent>(uniform(rng, 0, 1));
    p.radiation = need;
    p.weight = patient_weight(p.status);
    p.booking = std::max(1, first - uniform(rng, 0, 5));
    p.release = std::max(p.booking, first - 2 + uniform(rng, 0, horizon / 2));
    p.breach = p.release + uniform(rng, 0, horizon);
    p.jcco_max = p.release + uniform(rng, 0, horizon);
    p.jcco_good = p.jcco_max - uniform(rng, 0, 4);

    const int sessions = uniform(rng, 1, max_sessions);
    for (int l = 0; l < sessions; ++l) p.durations.push_back(uniform(rng, 5, 25));
    const int dpw = kDaysPerWeek[uniform(rng, 0, 4)];
    p.pattern = SessionPattern::weekly(
        dpw, dpw == 2 ? (coin(rng, 0.5) ? TwoDayAnchor::MonThu : TwoDayAnchor::TueFri)
                      : TwoDayAnchor::None);
    p.weekend_ok = dpw == 7 || (sessions == 1 && coin(rng, 0.3));
    if (sessions > 1 && coin(rng, 0.3)) p.min_sessions_before_weekend = uniform(rng, 1, sessions);
    if (coin(rng, 0.2)) {
      p.doctor_days = WeekdaySet::from_bits(static_cast<std::uint8_t>(uniform(rng, 1, 127)));
    }
    try {
      validate(p);
      (void)allowed_start_days(p);
    } catch (const DataError&) {
      continue;
    }
    return p;
  }
}

SmallCase random_small_case(std::mt19937_64& rng, const SmallCaseLimits& limits) {
  static constexpr MachineType kTypes[] = {MachineType::A, MachineType::B, MachineType::C};
  SmallCase c;
  const int linacs = uniform(rng, 1, limits.max_linacs);
  const bool same_type = coin(rng, 0.6);
  for (int i = 0; i < linacs; ++i) {
    const MachineType t = same_type && i > 0 ? c.fleet[0].type : kTypes[uniform(rng, 0, 2)];
    c.fleet.push_back({i + 1, t});
  }
  c.calendar = Calendar{static_cast<Weekday>(uniform(rng, 0, 6))};
  c.horizon = Horizon{uniform(rng, 1, 6), uniform(rng, std::min(5, limits.max_horizon),
                                                   limits.max_horizon)};
  c.capacity = std::make_unique<CapacityGrid>(c.fleet.size(), c.calendar);
  c.ledger = std::make_unique<BookingLedger>(c.fleet.size());
  for (std::size_t i = 0; i < c.fleet.size(); ++i) {
    for (Day d = 1; d <= c.horizon.last(); ++d) {
      c.capacity->set(i, d, uniform(rng, limits.min_capacity, limits.max_capacity));
    }
  }
  std::vector<SessionRecord> preload;
  for (std::size_t i = 0; i < c.fleet.size(); ++i) {
    for (Day d = c.horizon.first; d <= c.horizon.last(); ++d) {
      if (!coin(rng, 0.3)) continue;
      preload.push_back({"booked", i, d, uniform(rng, 1, c.capacity->minutes(i, d))});
    }
  }
  c.ledger->book(preload, *c.capacity);

  const int n = uniform(rng, 1, limits.max_patients);
  while (static_cast<int>(c.batch.size()) < n) {
    const MachineType t = c.fleet[static_cast<std::size_t>(uniform(rng, 0, linacs - 1))].type;
    PatientCase p = random_patient(rng, "J" + std::to_string(c.batch.size() + 1),
                                   c.horizon.first, c.horizon.length, limits.max_sessions,
                                   need_for(t));
    if (has_start(p, c.calendar, c.horizon)) c.batch.push_back(std::move(p));
  }
  return c;
}

CriteriaVector reference_contribution(const PatientCase& p, Day start) {
  CriteriaVector c;
  c.breach = start > p.breach ? 1 : 0;
  c.jcco_max = start > p.jcco_max ? p.weight : 0;
  c.jcco_good = start > p.jcco_good ? p.weight : 0;
  const std::int64_t wait = start - p.booking;
  c.waiting = p.weight * wait * wait;
  return c;
}

std::vector<Solution> enumerate_full(const FullModel& model) {
  const std::size_t n = model.num_patients();
  const int T = model.horizon_length();
  const std::size_t M = model.num_linacs();

  std::vector<std::vector<FullModel::Link>> links(n);
  for (const FullModel::Link& link : model.links()) links[model.key(link.from).patient].push_back(link);

  // Per patient: every choice of one (linac, day) per session that satisfies
  // the patient's own rows.
  std::vector<std::vector<std::vector<VarIndex>>> options(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int S = model.num_sessions(j);
    std::vector<VarIndex> pick;
    std::function<void(int)> rec = [&](int l) {
      if (l > S) {
        std::vector<VarIndex> ones = pick;
        std::sort(ones.begin(), ones.end());
        auto on = [&](VarIndex v) { return std::binary_search(ones.begin(), ones.end(), v); };
        for (const FullModel::Link& link : links[j]) {
          if (on(link.from) != on(link.to)) return;
        }
        options[j].push_back(std::move(ones));
        return;
      }
      for (std::size_t i = 0; i < M; ++i) {
        for (int k = 1; k <= T; ++k) {
          const VarIndex v = model.index(i, j, k, l);
          if (model.is_fixed(v)) continue;
          pick.push_back(v);
          rec(l + 1);
          pick.pop_back();
        }
      }
    };
    rec(1);
  }

  std::vector<std::int64_t> used(M * static_cast<std::size_t>(T), 0);
  std::vector<Solution> out;
  std::vector<const std::vector<VarIndex>*> chosen(n);
  std::vector<std::uint8_t> x(model.num_variables(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == n) {
      for (std::size_t i = 0; i < M; ++i) {
        for (int k = 1; k <= T; ++k) {
          if (used[i * static_cast<std::size_t>(T) + static_cast<std::size_t>(k - 1)] >
              model.capacity_rhs(i, k)) {
            return;
          }
        }
      }
      Solution s;
      for (const auto* o : chosen) s.ones.insert(s.ones.end(), o->begin(), o->end());
      std::sort(s.ones.begin(), s.ones.end());
      for (VarIndex v : s.ones) x[v] = 1;
      for (Objective o : kObjectives) s.criteria[o] = model.evaluate(o, x);
      for (VarIndex v : s.ones) x[v] = 0;
      out.push_back(std::move(s));
      return;
    }
    for (const auto& o : options[j]) {
      for (VarIndex v : o) {
        const VarKey key = model.key(v);
        used[key.linac * static_cast<std::size_t>(T) + static_cast<std::size_t>(key.day - 1)] +=
            model.duration(j, key.session);
      }
      chosen[j] = &o;
      rec(j + 1);
      for (VarIndex v : o) {
        const VarKey key = model.key(v);
        used[key.linac * static_cast<std::size_t>(T) + static_cast<std::size_t>(key.day - 1)] -=
            model.duration(j, key.session);
      }
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Solution> enumerate_compact(const CompactModel& model,
                                        std::span<const PatientCase> batch, const FullModel& full,
                                        Calendar calendar) {
  const std::size_t n = model.num_patients();
  std::vector<std::size_t> choice(n);
  std::vector<Solution> out;
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == n) {
      if (!fits_capacity(model, choice)) return;
      const Schedule schedule = to_schedule(model, choice);
      const auto placements = expand(schedule, batch, calendar);
      Solution s;
      for (const SessionPlacement& p : placements) {
        s.ones.push_back(
            full.index(p.linac, p.patient, full.horizon().relative(p.day), p.session));
      }
      std::sort(s.ones.begin(), s.ones.end());
      s.criteria = evaluate_criteria(schedule, batch);
      out.push_back(std::move(s));
      return;
    }
    for (std::size_t c = 0; c < model.candidates[j].size(); ++c) {
      choice[j] = c;
      rec(j + 1);
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<CriteriaVector> brute_force_lexicographic(std::span<const PatientCase> batch,
                                                        const BookingState& state,
                                                        Horizon horizon) {
  struct Option {
    std::size_t linac;
    std::vector<std::pair<Day, int>> sessions;
    CriteriaVector value;
  };
  std::vector<std::vector<Option>> options(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const PatientCase& p = batch[j];
    const WeekdaySet allowed = allowed_start_days(p);
    for (Day s = std::max(horizon.first, p.release); s <= horizon.last(); ++s) {
      const Weekday w = state.calendar.weekday(s);
      if (!allowed.contains(w)) continue;
      const SessionExpansion e = session_expansion(p, w);
      if (s + e.back().offset > horizon.last()) continue;
      bool ok = true;
      for (std::size_t l = 1; l < e.size(); ++l) ok &= s + e[l].offset != horizon.first;
      if (!ok) continue;
      for (std::size_t i = 0; i < state.fleet.size(); ++i) {
        if (state.fleet[i].type != p.machine_type()) continue;
        Option o{i, {}, reference_contribution(p, s)};
        for (const SessionSlot& slot : e) o.sessions.push_back({s + slot.offset, slot.duration});
        options[j].push_back(std::move(o));
      }
    }
  }

  std::map<std::pair<std::size_t, Day>, int> load;
  std::optional<CriteriaVector> best;
  CriteriaVector partial;
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (best && partial > *best) return;
    if (j == batch.size()) {
      best = partial;
      return;
    }
    for (const Option& o : options[j]) {
      bool fits = true;
      for (const auto& [day, minutes] : o.sessions) load[{o.linac, day}] += minutes;
      for (const auto& [day, minutes] : o.sessions) {
        fits &= load[{o.linac, day}] <= state.ledger.remaining(state.capacity, o.linac, day);
      }
      if (fits) {
        const CriteriaVector saved = partial;
        partial += o.value;
        rec(j + 1);
        partial = saved;
      }
      for (const auto& [day, minutes] : o.sessions) load[{o.linac, day}] -= minutes;
    }
  };
  rec(0);
  return best;
}

ExactMww exact_mww_by_enumeration(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const int n = static_cast<int>(pooled.size());
  const int na = static_cast<int>(a.size());

  // Doubled U keeps ties exact.
  auto doubled_u = [&](unsigned mask) {
    long u2 = 0;
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (int j = 0; j < n; ++j) {
        if (mask >> j & 1u) continue;
        u2 += pooled[i] > pooled[j] ? 2 : pooled[i] == pooled[j] ? 1 : 0;
      }
    }
    return u2;
  };
  const long observed = doubled_u((1u << na) - 1u);
  long total = 0, below = 0, above = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != na) continue;
    const long u2 = doubled_u(mask);
    ++total;
    below += u2 <= observed;
    above += u2 >= observed;
  }
  const double lo = static_cast<double>(below) / static_cast<double>(total);
  const double hi = static_cast<double>(above) / static_cast<double>(total);
  return {observed / 2.0, std::min(1.0, 2.0 * std::min(lo, hi))};
}

}  // namespace rtsched::testing

namespace rtsched::testing {

namespace {

constexpr int kRoomy = 600;

SmallCase roomy_system(Day first) {
  SmallCase c;
  c.fleet = {{1, MachineType::C}, {2, MachineType::C}, {3, MachineType::A}};
  c.calendar = Calendar{Weekday::Mon};
  c.horizon = Horizon{first, 21};
  c.capacity = std::make_unique<CapacityGrid>(c.fleet.size(), c.calendar);
  c.ledger = std::make_unique<BookingLedger>(c.fleet.size());
  for (std::size_t i = 0; i < c.fleet.size(); ++i) {
    for (Day d = 1; d <= c.horizon.last() + 7; ++d) c.capacity->set(i, d, kRoomy);
  }
  return c;
}

std::vector<SessionPlacement> sessions_of(const PatientCase& p, std::size_t j, std::size_t linac,
                                          Day start, Calendar calendar) {
  std::vector<SessionPlacement> out;
  int l = 1;
  for (const SessionSlot& s : session_expansion(p, calendar.weekday(start))) {
    out.push_back({linac, j, start + s.offset, l++});
  }
  return out;
}

void drop_patient(std::vector<SessionPlacement>& placements, std::size_t j) {
  std::erase_if(placements, [&](const SessionPlacement& s) { return s.patient == j; });
}

}  // namespace

ViolationCase violation_case(ConstraintFamily family, std::mt19937_64& rng) {
  using F = ConstraintFamily;
  for (;;) {
    const Day first = family == F::FirstDay ? (coin(rng, 0.5) ? 1 : 8) : uniform(rng, 1, 5);
    ViolationCase out{roomy_system(first), {}, family};
    SmallCase& sys = out.system;
    const Horizon h = sys.horizon;

    const int others = uniform(rng, 0, 3);
    for (int n = 0; n < others;) {
      PatientCase p = random_patient(rng, "J" + std::to_string(n + 1), first, h.length, 3,
                                     RadiationNeed::HighEnergyPhotonGroup);
      if (!has_start(p, sys.calendar, h)) continue;
      sys.batch.push_back(std::move(p));
      ++n;
    }

    // The patient the violation is injected into.
    PatientCase target = random_patient(rng, "T", first, h.length, 3,
                                        RadiationNeed::HighEnergyPhotonGroup);
    if (family == F::Release) {
      target.release = first + 7 + uniform(rng, 0, 3);
      target.booking = std::min(target.booking, target.release);
    } else if (family == F::StartWeekday) {
      target.durations.resize(static_cast<std::size_t>(uniform(rng, 1, 2)));
      target.pattern = SessionPattern::weekly(1);
      target.weekend_ok = false;
      target.min_sessions_before_weekend = 0;
      if (coin(rng, 0.5)) {
        target.doctor_days = WeekdaySet{static_cast<Weekday>(uniform(rng, 0, 4))};
      } else {
        target.doctor_days.reset();
      }
    } else if (family == F::FirstDay) {
      target.pattern = SessionPattern::chart_pattern();
      target.durations.assign(36, uniform(rng, 5, 10));
      target.weekend_ok = true;
      target.doctor_days.reset();
      target.min_sessions_before_weekend = 0;
      target.release = first;
      target.booking = std::max(1, first - 3);
    } else if (family == F::Sequence && target.num_sessions() < 2) {
      continue;
    }
    try {
      validate(target);
      (void)allowed_start_days(target);
    } catch (const DataError&) {
      continue;
    }
    if (!has_start(target, sys.calendar, h)) continue;
    const std::size_t t = sys.batch.size();
    sys.batch.push_back(target);

    // Random feasible base schedule.
    const CompactModel model = build_compact_model(sys.batch, sys.state(), h);
    std::vector<Assignment> base;
    for (std::size_t j = 0; j < sys.batch.size(); ++j) {
      const auto& list = model.candidates[j];
      const std::size_t c = j == t && (family == F::Release || family == F::FirstDay)
                                ? 0
                                : static_cast<std::size_t>(
                                      uniform(rng, 0, static_cast<int>(list.size()) - 1));
      base.push_back({list[c].linac, list[c].start});
    }
    for (std::size_t j = 0; j < sys.batch.size(); ++j) {
      auto s = sessions_of(sys.batch[j], j, base[j].linac, base[j].start, sys.calendar);
      out.placements.insert(out.placements.end(), s.begin(), s.end());
    }
    if (!check_placements(out.placements, sys.batch, sys.state(), h).empty()) continue;

    auto& ps = out.placements;
    const Assignment a = base[t];
    switch (family) {
      case F::Eligibility:
        for (auto& s : ps) {
          if (s.patient == t) s.linac = 2;
        }
        break;
      case F::Release:
        if (a.start - 7 < h.first) continue;
        for (auto& s : ps) {
          if (s.patient == t) s.day -= 7;
        }
        break;
      case F::StartWeekday: {
        const WeekdaySet allowed = allowed_start_days(target);
        const int last_offset = session_expansion(target, sys.calendar.weekday(a.start)).back().offset;
        std::vector<int> shifts;
        for (int d = 1; d <= 6; ++d) {
          if (!allowed.contains(sys.calendar.weekday(a.start + d)) &&
              a.start + d + last_offset <= h.last()) {
            shifts.push_back(d);
          }
        }
        if (shifts.empty()) continue;
        const int d = shifts[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(shifts.size()) - 1))];
        for (auto& s : ps) {
          if (s.patient == t) s.day += d;
        }
        break;
      }
      case F::FirstDay:
        if (sys.calendar.weekday(h.first) != Weekday::Mon) continue;
        drop_patient(ps, t);
        for (const auto& s : sessions_of(target, t, a.linac, h.first, sys.calendar)) ps.push_back(s);
        break;
      case F::Sequence: {
        const int l = uniform(rng, 2, target.num_sessions());
        auto it = std::find_if(ps.begin(), ps.end(), [&](const SessionPlacement& s) {
          return s.patient == t && s.session == l;
        });
        if (coin(rng, 0.5)) {
          it->linac = 1 - it->linac;
        } else if (l == target.num_sessions() && it->day + 1 <= h.last()) {
          it->day += 1;
        } else {
          continue;
        }
        break;
      }
      case F::Assignment:
        if (coin(rng, 0.5)) {
          drop_patient(ps, t);
        } else {
          const auto& list = model.candidates[t];
          std::vector<std::size_t> other;
          for (std::size_t c = 0; c < list.size(); ++c) {
            if (list[c].start != a.start) other.push_back(c);
          }
          if (other.empty()) continue;
          const Candidate& c = list[other[static_cast<std::size_t>(
              uniform(rng, 0, static_cast<int>(other.size()) - 1))]];
          for (const auto& s : sessions_of(target, t, c.linac, c.start, sys.calendar)) ps.push_back(s);
        }
        break;
      case F::Capacity: {
        const auto it = std::find_if(ps.begin(), ps.end(),
                                     [&](const SessionPlacement& s) { return s.patient == t; });
        int used = 0;
        for (const auto& s : ps) {
          if (s.linac == it->linac && s.day == it->day) {
            used += sys.batch[s.patient].durations[static_cast<std::size_t>(s.session - 1)];
          }
        }
        sys.capacity->set(it->linac, it->day, used - 1);
        break;
      }
    }
    std::sort(ps.begin(), ps.end());
    return out;
  }
}

}  // namespace rtsched::testing
