#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtsched/domain.hpp"

namespace rtsched {

class CapacityViolation : public Error {
 public:
  using Error::Error;
};

/// Opening hours: 8:45-18:00 on weekdays, 9:00-13:00 on weekends.
struct WeeklyHours {
  int weekday_minutes = 555;
  int weekend_minutes = 240;
};

/// c[i][k]: minutes available on linac i on day k. Days without an explicit
/// override follow the weekly opening hours.
class CapacityGrid {
 public:
  CapacityGrid(std::size_t num_linacs, Calendar calendar, WeeklyHours hours = {});

  int minutes(std::size_t linac, Day day) const;
  void set(std::size_t linac, Day day, int minutes);

  std::size_t num_linacs() const { return num_linacs_; }
  const Calendar& calendar() const { return calendar_; }
  const WeeklyHours& hours() const { return hours_; }

 private:
  static std::uint64_t key(std::size_t linac, Day day) {
    return (static_cast<std::uint64_t>(linac) << 32) | static_cast<std::uint32_t>(day);
  }

  std::size_t num_linacs_;
  Calendar calendar_;
  WeeklyHours hours_;
  std::unordered_map<std::uint64_t, int> overrides_;
};

struct SessionRecord {
  std::string patient_id;
  std::size_t linac = 0;
  Day day = 0;
  int minutes = 0;
  bool operator==(const SessionRecord&) const = default;
};

/// Committed sessions. Records are append-only: nothing booked is ever moved.
class BookingLedger {
 public:
  explicit BookingLedger(std::size_t num_linacs) : load_(num_linacs) {}

  int load(std::size_t linac, Day day) const;
  int remaining(const CapacityGrid& capacity, std::size_t linac, Day day) const {
    return capacity.minutes(linac, day) - load(linac, day);
  }

  /// Books every record or none. Throws CapacityViolation if any (linac, day)
  /// would exceed its capacity.
  void book(std::span<const SessionRecord> sessions, const CapacityGrid& capacity);

  const std::vector<SessionRecord>& records() const { return records_; }
  std::size_t num_linacs() const { return load_.size(); }

 private:
  std::vector<std::vector<int>> load_;  // [linac][day]
  std::vector<SessionRecord> records_;
};

/// A partially booked system: fleet, committed load and opening hours.
struct BookingState {
  std::span<const Linac> fleet;
  const BookingLedger& ledger;
  const CapacityGrid& capacity;
  Calendar calendar;
};

}  // namespace rtsched
