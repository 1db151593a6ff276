#include "rtsched/capacity.hpp"

#include <map>

namespace rtsched {

CapacityGrid::CapacityGrid(std::size_t num_linacs, Calendar calendar, WeeklyHours hours)
    : num_linacs_(num_linacs), calendar_(calendar), hours_(hours) {}

int CapacityGrid::minutes(std::size_t linac, Day day) const {
  if (!overrides_.empty()) {
    auto it = overrides_.find(key(linac, day));
    if (it != overrides_.end()) return it->second;
  }
  return is_weekend(calendar_.weekday(day)) ? hours_.weekend_minutes : hours_.weekday_minutes;
}

void CapacityGrid::set(std::size_t linac, Day day, int minutes) {
  if (minutes < 0) throw DataError("capacity must be nonnegative");
  if (linac >= num_linacs_) throw std::out_of_range("linac index out of range");
  overrides_[key(linac, day)] = minutes;
}

int BookingLedger::load(std::size_t linac, Day day) const {
  const auto& row = load_.at(linac);
  if (day < 0 || static_cast<std::size_t>(day) >= row.size()) return 0;
  return row[static_cast<std::size_t>(day)];
}

void BookingLedger::book(std::span<const SessionRecord> sessions, const CapacityGrid& capacity) {
  std::map<std::pair<std::size_t, Day>, int> added;
  for (const SessionRecord& s : sessions) {
    if (s.linac >= load_.size()) throw CapacityViolation("booking on unknown linac");
    if (s.day < 1) throw CapacityViolation("booking before day 1");
    added[{s.linac, s.day}] += s.minutes;
  }
  for (const auto& [cell, minutes] : added) {
    const auto& [linac, day] = cell;
    if (load(linac, day) + minutes > capacity.minutes(linac, day)) {
      throw CapacityViolation("linac " + std::to_string(linac + 1) + " over capacity on day " +
                              std::to_string(day));
    }
  }
  for (const auto& [cell, minutes] : added) {
    auto& row = load_[cell.first];
    const auto day = static_cast<std::size_t>(cell.second);
    if (row.size() <= day) row.resize(day + 1, 0);
    row[day] += minutes;
  }
  records_.insert(records_.end(), sessions.begin(), sessions.end());
}

}  // namespace rtsched
