#pragma once

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

#include "rtsched/domain.hpp"

namespace rtsched {

/// A generated data set: arrivals over a calendar starting at `origin` (day 1).
struct Instance {
  std::string name;
  std::chrono::year_month_day origin{std::chrono::year{2004}, std::chrono::January,
                                     std::chrono::day{5}};
  int span_days = 0;    // arrivals happen on days 1..span_days
  int warmup_days = 0;  // arrivals on days 1..warmup_days only fill the ledger
  std::vector<PatientCase> patients;  // sorted by booking day, then id

  Calendar calendar() const;
  /// ISO week (1..52) of a day; week 53 folds into 52.
  int week_of_year(Day day) const;
};

Weekday weekday_of(std::chrono::year_month_day date);

/// Malformed instance text. The message carries "<source>:<line>: ...".
class ParseError : public DataError {
 public:
  ParseError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

inline constexpr const char* kInstanceMagic = "rtsched-instance";
inline constexpr const char* kInstanceVersion = "v1";

/// Tab-separated records in the fixed field order
/// id status intent radiation weight booking release breach jcco_max jcco_good
/// num_sessions durations days_per_week sessions_per_day anchor chart
/// min_before_weekend doctor_days weekend_ok
void write_instance(std::ostream& out, const Instance& instance);
std::string to_text(const Instance& instance);

/// Validates every record; throws ParseError pointing at the offending line.
Instance read_instance(std::istream& in, const std::string& source = "<instance>");
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& instance);

/// Writes `text` to `path` through a temporary file and a rename.
void write_file_atomically(const std::string& path, const std::string& text);

}  // namespace rtsched
