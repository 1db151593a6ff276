#include "rtsched/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>

namespace rtsched {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double d = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument("trailing characters");
  return d;
}

long long to_integer(const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw std::invalid_argument("not an integer");
  return x;
}

bool to_flag(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("expected true or false");
}

std::chrono::year_month_day to_date(const std::string& v) {
  int y = 0;
  unsigned m = 0, d = 0;
  char dash1 = 0, dash2 = 0;
  if (std::sscanf(v.c_str(), "%d%c%u%c%u", &y, &dash1, &m, &dash2, &d) != 5 || dash1 != '-' ||
      dash2 != '-') {
    throw std::invalid_argument("expected YYYY-MM-DD");
  }
  const std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{m},
                                         std::chrono::day{d}};
  if (!date.ok()) throw std::invalid_argument("invalid date");
  return date;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct Key {
  std::string help;
  Setter set;
};

const char* kGapNames[] = {"emergency", "urgent", "routine_palliative", "routine_radical"};

const std::map<std::string, Key>& registry() {
  static const std::map<std::string, Key> keys = [] {
    std::map<std::string, Key> g;
    g["instances"] = {"number of generated instances",
                      [](RunConfig& c, const std::string& v) {
                        c.generator.instances = static_cast<int>(to_integer(v));
                      }};
    g["span_months"] = {"months of arrivals per instance",
                        [](RunConfig& c, const std::string& v) {
                          c.generator.span_months = static_cast<int>(to_integer(v));
                        }};
    g["warmup_months"] = {"leading months used only to fill the ledger",
                          [](RunConfig& c, const std::string& v) {
                            c.generator.warmup_months = static_cast<int>(to_integer(v));
                          }};
    g["first_origin"] = {"earliest instance start date (YYYY-MM-DD)",
                         [](RunConfig& c, const std::string& v) {
                           c.generator.first_origin = to_date(v);
                         }};
    g["origin_window_days"] = {"instance start dates are drawn from this many days",
                               [](RunConfig& c, const std::string& v) {
                                 c.generator.origin_window_days = static_cast<int>(to_integer(v));
                               }};
    g["mean_arrivals_per_weekday"] = {"expected arrivals on a weekday at multiplier 1",
                                      [](RunConfig& c, const std::string& v) {
                                        c.generator.mean_arrivals_per_weekday = to_double(v);
                                      }};
    g["seasonality"] = {"'default' or 'flat'",
                        [](RunConfig& c, const std::string& v) {
                          if (v == "flat") {
                            for (auto& profile : c.generator.seasonality) profile.fill(1.0);
                          } else if (v == "default") {
                            c.generator.seasonality = GeneratorConfig::default_seasonality();
                          } else {
                            throw std::invalid_argument("expected default or flat");
                          }
                        }};
    for (std::size_t i = 0; i < 4; ++i) {
      g[std::string("gap_mean.") + kGapNames[i]] = {
          "mean pre-treatment gap in days", [i](RunConfig& c, const std::string& v) {
            c.generator.gaps[i].mean = to_double(v);
          }};
      g[std::string("gap_sigma.") + kGapNames[i]] = {
          "log-scale spread of the pre-treatment gap", [i](RunConfig& c, const std::string& v) {
            c.generator.gaps[i].sigma = to_double(v);
          }};
    }
    g["adjuvant_share"] = {"probability of a later breach reference for long radical gaps",
                           [](RunConfig& c, const std::string& v) {
                             c.generator.adjuvant_share = to_double(v);
                           }};
    g["adjuvant_reference_lag"] = {"days between breach reference and release",
                                   [](RunConfig& c, const std::string& v) {
                                     c.generator.adjuvant_reference_lag =
                                         static_cast<int>(to_integer(v));
                                   }};
    g["urgent_single_share"] = {"share of single-fraction urgent patients",
                                [](RunConfig& c, const std::string& v) {
                                  c.generator.urgent_single_share = to_double(v);
                                }};
    g["chart_share"] = {"share of CHART among routine radical patients",
                        [](RunConfig& c, const std::string& v) {
                          c.generator.chart_share = to_double(v);
                        }};
    g["two_per_week_share"] = {"share of 2 days/week among routine patients",
                               [](RunConfig& c, const std::string& v) {
                                 c.generator.two_per_week_share = to_double(v);
                               }};
    g["three_per_week_share"] = {"share of 3 days/week among routine patients",
                                 [](RunConfig& c, const std::string& v) {
                                   c.generator.three_per_week_share = to_double(v);
                                 }};
    g["session_minutes"] = {"minutes per session",
                            [](RunConfig& c, const std::string& v) {
                              c.generator.session_minutes = static_cast<int>(to_integer(v));
                            }};
    g["first_session_extra_minutes"] = {"extra minutes of the first session",
                                        [](RunConfig& c, const std::string& v) {
                                          c.generator.first_session_extra_minutes =
                                              static_cast<int>(to_integer(v));
                                        }};
    g["palliative_weekend_fraction"] = {
        "palliative patients needing two sessions before the first weekend",
        [](RunConfig& c, const std::string& v) {
          c.generator.palliative_weekend_fraction = to_double(v);
        }};
    g["same_week_fraction"] = {"short 5 days/week courses that must finish within a week",
                               [](RunConfig& c, const std::string& v) {
                                 c.generator.same_week_fraction = to_double(v);
                               }};
    g["doctor_fraction"] = {"multi-session patients whose doctor attends the first session",
                            [](RunConfig& c, const std::string& v) {
                              c.generator.doctor_fraction = to_double(v);
                            }};

    g["budget_secs"] = {"solver wall-clock budget per batch",
                        [](RunConfig& c, const std::string& v) {
                          c.simulation.budget.total_seconds = to_double(v);
                        }};
    g["node_budget"] = {"per-stage node limit (0 = none)",
                        [](RunConfig& c, const std::string& v) {
                          const long long n = to_integer(v);
                          if (n < 0) throw std::invalid_argument("must be nonnegative");
                          c.simulation.budget.node_limit =
                              n == 0 ? std::nullopt : std::optional<std::int64_t>(n);
                        }};
    g["redistribute_idle"] = {"give the budget of empty machine groups to the others",
                              [](RunConfig& c, const std::string& v) {
                                c.simulation.budget.redistribute_idle = to_flag(v);
                              }};
    g["weekday_minutes"] = {"linac minutes on weekdays",
                            [](RunConfig& c, const std::string& v) {
                              c.simulation.hours.weekday_minutes = static_cast<int>(to_integer(v));
                            }};
    g["weekend_minutes"] = {"linac minutes on weekends",
                            [](RunConfig& c, const std::string& v) {
                              c.simulation.hours.weekend_minutes = static_cast<int>(to_integer(v));
                            }};
    g["policy"] = {"scheduling policy, e.g. 'scd=2,1 mnda=inf,7'",
                   [](RunConfig& c, const std::string& v) { c.policy = PolicyConfig::parse(v); }};
    g["alpha"] = {"overall significance level of the comparison",
                  [](RunConfig& c, const std::string& v) { c.marks.alpha_overall = to_double(v); }};
    g["corrected"] = {"Bonferroni-correct pairwise comparisons",
                      [](RunConfig& c, const std::string& v) { c.marks.corrected = to_flag(v); }};
    g["replications"] = {"bootstrap replications",
                         [](RunConfig& c, const std::string& v) {
                           c.marks.bootstrap.replications = static_cast<int>(to_integer(v));
                         }};
    g["strategy"] = {"bootstrap strategy: median-p or percentile-u",
                     [](RunConfig& c, const std::string& v) {
                       c.marks.bootstrap.strategy = parse_strategy(v);
                     }};
    return g;
  }();
  return keys;
}

}  // namespace

const std::map<std::string, std::string>& config_keys() {
  static const std::map<std::string, std::string> help = [] {
    std::map<std::string, std::string> out;
    for (const auto& [name, key] : registry()) out[name] = key.help;
    return out;
  }();
  return help;
}

RunConfig read_config(std::istream& in, const std::string& source, RunConfig base) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(source, number, "expected key = value");
    // Policies contain '=' themselves; only the first one separates the key.
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = registry().find(key);
    if (it == registry().end()) throw ParseError(source, number, "unknown key '" + key + "'");
    try {
      it->second.set(base, value);
    } catch (const std::exception& e) {
      throw ParseError(source, number, key + ": " + e.what());
    }
  }
  try {
    base.generator.validate();
  } catch (const InvalidConfig& e) {
    throw ParseError(source, number, e.what());
  }
  return base;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path);
  return read_config(in, path);
}

}  // namespace rtsched
