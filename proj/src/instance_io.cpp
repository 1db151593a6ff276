#include "rtsched/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rtsched {

namespace {

using namespace std::chrono;

constexpr int kFieldCount = 19;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

int to_int(std::string_view text, std::string_view field) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw DataError("field " + std::string(field) + ": expected an integer, got '" +
                    std::string(text) + "'");
  }
  return value;
}

bool to_bool(std::string_view text, std::string_view field) {
  if (text == "1") return true;
  if (text == "0") return false;
  throw DataError("field " + std::string(field) + ": expected 0 or 1, got '" +
                  std::string(text) + "'");
}

std::string format_date(year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

year_month_day parse_date(std::string_view text) {
  const auto parts = split(text, '-');
  if (parts.size() != 3) throw DataError("malformed date '" + std::string(text) + "'");
  const year_month_day d{year{to_int(parts[0], "year")},
                         month{static_cast<unsigned>(to_int(parts[1], "month"))},
                         day{static_cast<unsigned>(to_int(parts[2], "day"))}};
  if (!d.ok()) throw DataError("invalid date '" + std::string(text) + "'");
  return d;
}

std::string join_durations(const std::vector<int>& durations) {
  std::string out;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(durations[i]);
  }
  return out;
}

PatientCase parse_record(std::string_view line) {
  const auto f = split(line, '\t');
  if (f.size() != kFieldCount) {
    throw DataError("expected " + std::to_string(kFieldCount) + " fields, got " +
                    std::to_string(f.size()));
  }
  PatientCase p;
  p.id = std::string(f[0]);
  if (p.id.empty()) throw DataError("empty patient id");
  p.status = parse_status(f[1]);
  p.intent = parse_intent(f[2]);
  p.radiation = parse_radiation(f[3]);
  p.weight = to_int(f[4], "weight");
  p.booking = to_int(f[5], "booking");
  p.release = to_int(f[6], "release");
  p.breach = to_int(f[7], "breach");
  p.jcco_max = to_int(f[8], "jcco_max");
  p.jcco_good = to_int(f[9], "jcco_good");
  const int sessions = to_int(f[10], "num_sessions");
  for (std::string_view d : split(f[11], ',')) p.durations.push_back(to_int(d, "durations"));
  if (static_cast<int>(p.durations.size()) != sessions) {
    throw DataError("num_sessions is " + std::to_string(sessions) + " but " +
                    std::to_string(p.durations.size()) + " durations are listed");
  }
  p.pattern.days_per_week = to_int(f[12], "days_per_week");
  p.pattern.sessions_per_day = to_int(f[13], "sessions_per_day");
  p.pattern.anchor = parse_anchor(f[14]);
  p.pattern.chart = to_bool(f[15], "chart");
  p.min_sessions_before_weekend = to_int(f[16], "min_before_weekend");
  if (f[17] != "-") p.doctor_days = WeekdaySet::parse(f[17]);
  p.weekend_ok = to_bool(f[18], "weekend_ok");
  validate(p);
  allowed_start_days(p);
  return p;
}

}  // namespace

Weekday weekday_of(std::chrono::year_month_day date) {
  // iso_encoding: Monday = 1 ... Sunday = 7
  return static_cast<Weekday>(weekday{sys_days{date}}.iso_encoding() - 1);
}

Calendar Instance::calendar() const { return Calendar{weekday_of(origin)}; }

int Instance::week_of_year(Day d) const {
  const sys_days date = sys_days{origin} + days{d - 1};
  const year_month_day ymd{date};
  const sys_days jan1 = sys_days{ymd.year() / January / 1};
  const int week = static_cast<int>((date - jan1).count()) / 7 + 1;
  return std::min(week, 52);
}

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

void write_instance(std::ostream& out, const Instance& in) {
  out << kInstanceMagic << '\t' << kInstanceVersion << "\torigin=" << format_date(in.origin)
      << "\tspan_days=" << in.span_days << "\twarmup_days=" << in.warmup_days
      << "\tname=" << in.name << '\n';
  out << "#id\tstatus\tintent\tradiation\tweight\tbooking\trelease\tbreach\tjcco_max"
         "\tjcco_good\tnum_sessions\tdurations\tdays_per_week\tsessions_per_day\tanchor"
         "\tchart\tmin_before_weekend\tdoctor_days\tweekend_ok\n";
  for (const PatientCase& p : in.patients) {
    out << p.id << '\t' << to_string(p.status) << '\t' << to_string(p.intent) << '\t'
        << to_string(p.radiation) << '\t' << p.weight << '\t' << p.booking << '\t' << p.release
        << '\t' << p.breach << '\t' << p.jcco_max << '\t' << p.jcco_good << '\t'
        << p.num_sessions() << '\t' << join_durations(p.durations) << '\t'
        << p.pattern.days_per_week << '\t' << p.pattern.sessions_per_day << '\t'
        << to_string(p.pattern.anchor) << '\t' << (p.pattern.chart ? 1 : 0) << '\t'
        << p.min_sessions_before_weekend << '\t'
        << (p.doctor_days ? p.doctor_days->to_string() : std::string("-")) << '\t'
        << (p.weekend_ok ? 1 : 0) << '\n';
  }
}

std::string to_text(const Instance& instance) {
  std::ostringstream out;
  write_instance(out, instance);
  return out.str();
}

Instance read_instance(std::istream& in, const std::string& source) {
  Instance inst;
  std::string line;
  int number = 0;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  ++number;
  const auto header = split(line, '\t');
  if (header.size() < 2 || header[0] != kInstanceMagic) {
    throw ParseError(source, number, "not an instance file");
  }
  if (header[1] != kInstanceVersion) {
    throw ParseError(source, number, "unsupported version '" + std::string(header[1]) + "'");
  }
  bool have_origin = false;
  try {
    for (std::size_t i = 2; i < header.size(); ++i) {
      const auto eq = header[i].find('=');
      if (eq == std::string_view::npos) throw DataError("malformed header field");
      const std::string_view key = header[i].substr(0, eq);
      const std::string_view value = header[i].substr(eq + 1);
      if (key == "origin") {
        inst.origin = parse_date(value);
        have_origin = true;
      } else if (key == "span_days") {
        inst.span_days = to_int(value, key);
      } else if (key == "warmup_days") {
        inst.warmup_days = to_int(value, key);
      } else if (key == "name") {
        inst.name = std::string(value);
      } else {
        throw DataError("unknown header field '" + std::string(key) + "'");
      }
    }
    if (!have_origin) throw DataError("header lacks origin");
    if (inst.span_days < 0 || inst.warmup_days < 0) throw DataError("negative span");
  } catch (const ParseError&) {
    throw;
  } catch (const DataError& e) {
    throw ParseError(source, number, e.what());
  }

  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      PatientCase p = parse_record(line);
      if (p.booking < 1) throw DataError("booking day must be at least 1");
      if (!inst.patients.empty() && p.booking < inst.patients.back().booking) {
        throw DataError("records must be sorted by booking day");
      }
      seen.push_back(p.id);
      inst.patients.push_back(std::move(p));
    } catch (const DataError& e) {
      throw ParseError(source, number, e.what());
    }
  }
  std::sort(seen.begin(), seen.end());
  const auto dup = std::adjacent_find(seen.begin(), seen.end());
  if (dup != seen.end()) throw ParseError(source, number, "duplicate patient id " + *dup);
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_instance(in, path);
}

void write_file_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp);
    out << text;
    out.flush();
    if (!out) throw DataError("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void save_instance(const std::string& path, const Instance& instance) {
  write_file_atomically(path, to_text(instance));
}

}  // namespace rtsched
