#include "rtsched/full_model.hpp"

#include <algorithm>

namespace rtsched {

VarIndex FullModel::index(std::size_t linac, std::size_t patient, int day, int session) const {
  const auto s = static_cast<std::size_t>(sessions_[patient]);
  const auto t = static_cast<std::size_t>(horizon_.length);
  return base_[patient] + (linac * t + static_cast<std::size_t>(day - 1)) * s +
         static_cast<std::size_t>(session - 1);
}

VarKey FullModel::key(VarIndex var) const {
  auto it = std::upper_bound(base_.begin(), base_.end(), var);
  const auto patient = static_cast<std::size_t>(std::distance(base_.begin(), it) - 1);
  const auto s = static_cast<std::size_t>(sessions_[patient]);
  const auto t = static_cast<std::size_t>(horizon_.length);
  const std::size_t local = var - base_[patient];
  const std::size_t session0 = local % s;
  const std::size_t rest = local / s;
  return VarKey{rest / t, patient, static_cast<int>(rest % t) + 1, static_cast<int>(session0) + 1};
}

std::vector<VarIndex> FullModel::assignment_row(std::size_t patient, int session) const {
  std::vector<VarIndex> row;
  row.reserve(num_linacs_ * static_cast<std::size_t>(horizon_.length));
  for (std::size_t i = 0; i < num_linacs_; ++i) {
    for (int k = 1; k <= horizon_.length; ++k) row.push_back(index(i, patient, k, session));
  }
  return row;
}

std::vector<FullModel::Term> FullModel::capacity_terms(std::size_t linac, int day) const {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < num_patients(); ++j) {
    for (int l = 1; l <= sessions_[j]; ++l) {
      terms.push_back({index(linac, j, day, l), duration(j, l)});
    }
  }
  return terms;
}

std::vector<Violation> FullModel::violations(std::span<const std::uint8_t> x) const {
  if (x.size() != num_variables()) throw std::invalid_argument("vector size mismatch");
  std::vector<Violation> out;
  auto report_var = [&](ConstraintFamily f, VarIndex v) {
    const VarKey k = key(v);
    out.push_back(Violation{f, k.linac, k.patient, k.day, k.session});
  };
  constexpr std::pair<std::uint8_t, ConstraintFamily> kBits[] = {
      {kFixEligibility, ConstraintFamily::Eligibility},
      {kFixRelease, ConstraintFamily::Release},
      {kFixStartWeekday, ConstraintFamily::StartWeekday},
      {kFixFirstDay, ConstraintFamily::FirstDay},
      {kFixNoSuccessor, ConstraintFamily::Sequence},
  };
  for (VarIndex v = 0; v < x.size(); ++v) {
    if (!x[v]) continue;
    for (const auto& [bit, family] : kBits) {
      if (fixed_[v] & bit) report_var(family, v);
    }
  }
  for (const Link& link : links_) {
    if (x[link.from] != x[link.to]) report_var(ConstraintFamily::Sequence, link.from);
  }
  for (std::size_t j = 0; j < num_patients(); ++j) {
    for (int l = 1; l <= sessions_[j]; ++l) {
      int sum = 0;
      for (VarIndex v : assignment_row(j, l)) sum += x[v];
      if (sum != 1) {
        out.push_back(Violation{ConstraintFamily::Assignment, std::nullopt, j, std::nullopt, l});
      }
    }
  }
  if (num_patients() > 0) {
    for (std::size_t i = 0; i < num_linacs_; ++i) {
      for (int k = 1; k <= horizon_.length; ++k) {
        std::int64_t lhs = 0;
        for (const Term& t : capacity_terms(i, k)) lhs += t.coef * x[t.var];
        if (lhs > capacity_rhs(i, k)) {
          out.push_back(Violation{ConstraintFamily::Capacity, i, std::nullopt, k, std::nullopt});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t FullModel::evaluate(Objective o, std::span<const std::uint8_t> x) const {
  std::int64_t total = 0;
  for (const Term& t : objective(o)) total += t.coef * x[t.var];
  return total;
}

FullModel build_full_model(std::span<const PatientCase> batch, const BookingState& state,
                           Horizon horizon) {
  if (horizon.length < 1) throw HorizonTooShort("horizon must contain at least one day");
  FullModel m;
  m.num_linacs_ = state.fleet.size();
  m.horizon_ = horizon;
  const int T = horizon.length;
  const auto t = static_cast<std::size_t>(T);

  VarIndex next = 0;
  for (const PatientCase& p : batch) {
    m.sessions_.push_back(p.num_sessions());
    m.base_.push_back(next);
    m.durations_.push_back(p.durations);
    next += m.num_linacs_ * t * static_cast<std::size_t>(p.num_sessions());
  }
  m.fixed_.assign(next, 0);

  for (std::size_t j = 0; j < batch.size(); ++j) {
    const PatientCase& p = batch[j];
    const WeekdaySet allowed = allowed_start_days(p);
    const int S = p.num_sessions();
    for (std::size_t i = 0; i < m.num_linacs_; ++i) {
      const bool eligible = state.fleet[i].type == p.machine_type();
      for (int k = 1; k <= T; ++k) {
        const Day day = horizon.absolute(k);
        const Weekday w = state.calendar.weekday(day);
        for (int l = 1; l <= S; ++l) {
          const VarIndex v = m.index(i, j, k, l);
          std::uint8_t mask = 0;
          if (!eligible) mask |= kFixEligibility;
          if (day < p.release) mask |= kFixRelease;
          if (l == 1 && !allowed.contains(w)) mask |= kFixStartWeekday;
          if (k == 1 && l >= 2) mask |= kFixFirstDay;
          if (l < S) {
            int gap = -1;
            try {
              gap = session_gap(p.pattern, w, l);
            } catch (const InvalidWeekdayForPattern&) {
            }
            if (gap < 0 || k + gap > T) {
              mask |= kFixNoSuccessor;
            } else {
              m.links_.push_back({v, m.index(i, j, k + gap, l + 1)});
            }
          }
          m.fixed_[v] = mask;
        }
      }
    }
  }

  m.capacity_rhs_.resize(m.num_linacs_ * t);
  for (std::size_t i = 0; i < m.num_linacs_; ++i) {
    for (int k = 1; k <= T; ++k) {
      m.capacity_rhs_[i * t + static_cast<std::size_t>(k - 1)] =
          state.ledger.remaining(state.capacity, i, horizon.absolute(k));
    }
  }

  for (std::size_t j = 0; j < batch.size(); ++j) {
    for (std::size_t i = 0; i < m.num_linacs_; ++i) {
      for (int k = 1; k <= T; ++k) {
        const CriteriaVector c = start_contribution(batch[j], horizon.absolute(k));
        const VarIndex v = m.index(i, j, k, 1);
        for (Objective o : kObjectives) {
          if (c[o] != 0) m.objectives_[static_cast<std::size_t>(static_cast<int>(o) - 1)].push_back({v, c[o]});
        }
      }
    }
  }

  // A first session is viable when its whole chain of linked successors is free.
  std::vector<VarIndex> successor(next, static_cast<VarIndex>(-1));
  for (const FullModel::Link& link : m.links_) successor[link.from] = link.to;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    bool viable = false;
    for (std::size_t i = 0; i < m.num_linacs_ && !viable; ++i) {
      for (int k = 1; k <= T && !viable; ++k) {
        VarIndex v = m.index(i, j, k, 1);
        int l = 1;
        while (!m.fixed_[v] && l < m.sessions_[j]) {
          v = successor[v];
          ++l;
        }
        viable = !m.fixed_[v] && l == m.sessions_[j];
      }
    }
    if (!viable) {
      throw HorizonTooShort("patient " + batch[j].id + " has no feasible start within " +
                            std::to_string(T) + " days");
    }
  }
  return m;
}

std::vector<std::uint8_t> to_vector(const FullModel& model,
                                    std::span<const SessionPlacement> placements) {
  std::vector<std::uint8_t> x(model.num_variables(), 0);
  const Horizon& h = model.horizon();
  for (const SessionPlacement& s : placements) {
    if (!h.contains(s.day)) continue;
    x[model.index(s.linac, s.patient, h.relative(s.day), s.session)] = 1;
  }
  return x;
}

}  // namespace rtsched
