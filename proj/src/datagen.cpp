#include "rtsched/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace rtsched {

namespace {

using S = WaitingListStatus;
using I = TreatmentIntent;
using R = RadiationNeed;
using namespace std::chrono;

constexpr std::size_t status_index(S s) {
  switch (s) {
    case S::Routine: return 0;
    case S::Urgent: return 1;
    case S::Emergency: return 2;
  }
  return 0;
}

// Winter trough, spring peak, and a late-December drop of the given depth.
std::array<double, 52> seasonal_profile(double week51, double week52) {
  std::array<double, 52> m{};
  for (int w = 1; w <= 52; ++w) {
    double v = 1.0;
    if (w <= 8) v = 0.9;
    else if (w >= 14 && w <= 22) v = 1.12;
    else if (w >= 31 && w <= 34) v = 0.95;  // summer holidays
    m[static_cast<std::size_t>(w - 1)] = v;
  }
  m[50] = week51;
  m[51] = week52;
  return m;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// E[round(X)] for log X ~ N(mu, sigma): sum over k >= 1 of P(X >= k - 1/2).
double rounded_lognormal_mean(double mu, double sigma) {
  double total = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double tail = 1.0 - normal_cdf((std::log(k - 0.5) - mu) / sigma);
    total += tail;
    if (tail < 1e-13 && k > std::exp(mu)) break;
  }
  return total;
}

int draw_count(const CountTable& table, std::mt19937_64& rng) {
  std::vector<double> w;
  std::vector<int> values;
  for (const auto& [value, p] : table) {
    values.push_back(value);
    w.push_back(p);
  }
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  return values[pick(rng)];
}

bool bernoulli(double p, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

int days_between(year_month_day from, year_month_day to) {
  return static_cast<int>((sys_days{to} - sys_days{from}).count());
}

// Adds months, clamping the day to the end of the target month.
year_month_day add_months(year_month_day d, int n) {
  year_month_day out = d + months{n};
  if (!out.ok()) out = out.year() / out.month() / last;
  return out;
}

std::string padded(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, value);
  return buf;
}

}  // namespace

GapClass gap_class(WaitingListStatus status, TreatmentIntent intent) {
  switch (status) {
    case S::Emergency: return GapClass::Emergency;
    case S::Urgent: return GapClass::Urgent;
    case S::Routine:
      return intent == I::Palliative ? GapClass::RoutinePalliative : GapClass::RoutineRadical;
  }
  return GapClass::RoutineRadical;
}

std::array<std::array<double, 52>, 3> GeneratorConfig::default_seasonality() {
  std::array<std::array<double, 52>, 3> out{};
  out[status_index(S::Routine)] = seasonal_profile(0.55, 0.35);
  out[status_index(S::Urgent)] = seasonal_profile(0.8, 0.7);
  out[status_index(S::Emergency)] = seasonal_profile(0.92, 0.85);
  return out;
}

std::vector<CategoryShare> GeneratorConfig::default_mix() {
  return {
      {{S::Emergency, I::Palliative, R::HighEnergyPhotonGroup}, 1.3},
      {{S::Urgent, I::Palliative, R::HighEnergyPhotonGroup}, 17.1},
      {{S::Routine, I::Radical, R::HighEnergyPhotonGroup}, 20.5},
      {{S::Emergency, I::Palliative, R::LowEnergyPhotonOnly}, 2.4},
      {{S::Urgent, I::Palliative, R::LowEnergyPhotonOnly}, 14.4},
      {{S::Routine, I::Palliative, R::LowEnergyPhotonOnly}, 2.8},
      {{S::Routine, I::Radical, R::LowEnergyPhotonOnly}, 15.1},
      {{S::Urgent, I::Palliative, R::ElectronGroup}, 10.2},
      {{S::Routine, I::Palliative, R::ElectronGroup}, 1.5},
      {{S::Routine, I::Radical, R::ElectronGroup}, 14.6},
  };
}

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (instances < 0) fail("instances must be nonnegative");
  if (span_months < 1) fail("span_months must be positive");
  if (warmup_months < 0 || warmup_months >= span_months) fail("warmup_months out of range");
  if (!first_origin.ok()) fail("invalid first_origin");
  if (origin_window_days < 1) fail("origin_window_days must be positive");
  if (!(mean_arrivals_per_weekday >= 0.0)) fail("mean arrivals must be nonnegative");
  for (const auto& profile : seasonality) {
    for (double m : profile) {
      if (!(m > 0.0)) fail("seasonal multipliers must be positive");
    }
  }
  if (mix.empty()) fail("category mix is empty");
  double total = 0.0;
  for (const CategoryShare& s : mix) {
    if (!(s.percent >= 0.0)) fail("mix entries must be nonnegative");
    if (s.category.status == S::Emergency && s.category.intent == I::Radical) {
      fail("emergency patients are palliative");
    }
    total += s.percent;
  }
  if (!(total > 0.0)) fail("category mix has no mass");
  for (const GapDistribution& g : gaps) {
    if (!(g.mean > 0.0) || !(g.sigma > 0.0)) fail("gap mean and sigma must be positive");
  }
  auto check_probability = [&](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) fail(std::string(name) + " must be within [0, 1]");
  };
  check_probability(adjuvant_share, "adjuvant_share");
  check_probability(urgent_single_share, "urgent_single_share");
  check_probability(chart_share, "chart_share");
  check_probability(two_per_week_share, "two_per_week_share");
  check_probability(three_per_week_share, "three_per_week_share");
  check_probability(palliative_weekend_fraction, "palliative_weekend_fraction");
  check_probability(same_week_fraction, "same_week_fraction");
  check_probability(doctor_fraction, "doctor_fraction");
  if (two_per_week_share + three_per_week_share > 1.0) fail("pattern shares exceed 1");
  for (const CountTable* t : {&urgent_sessions, &routine_palliative_sessions,
                              &routine_radical_sessions}) {
    double mass = 0.0;
    for (const auto& [value, p] : *t) {
      if (value < 2) fail("multi-session counts must be at least 2");
      if (!(p >= 0.0)) fail("count probabilities must be nonnegative");
      mass += p;
    }
    if (std::abs(mass - 1.0) > 1e-9) fail("count table probabilities must sum to 1");
  }
  if (session_minutes < 1 || first_session_extra_minutes < 0) fail("invalid session minutes");
  if (doctor_fraction > 0.0 && doctor_day_sets.empty()) fail("doctor day sets are empty");
  for (const WeekdaySet& s : doctor_day_sets) {
    if (s.empty()) fail("doctor day sets must be nonempty");
  }
}

double status_share(const GeneratorConfig& config, WaitingListStatus status) {
  double total = 0.0, part = 0.0;
  for (const CategoryShare& s : config.mix) {
    total += s.percent;
    if (s.category.status == status) part += s.percent;
  }
  return total > 0.0 ? part / total : 0.0;
}

double seasonal_arrival_rate(const GeneratorConfig& config, int week_of_year,
                             WaitingListStatus status) {
  if (week_of_year < 1 || week_of_year > 52) throw std::out_of_range("week must be in 1..52");
  return config.mean_arrivals_per_weekday * status_share(config, status) *
         config.seasonality[status_index(status)][static_cast<std::size_t>(week_of_year - 1)];
}

double fit_lognormal_mu(double mean, double sigma) {
  double lo = -10.0, hi = std::log(mean) + 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (rounded_lognormal_mean(mid, sigma) < mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PatientSampler::PatientSampler(const GeneratorConfig& config) : config_(config) {
  config_.validate();
  for (std::size_t g = 0; g < 4; ++g) {
    mu_[g] = fit_lognormal_mu(config_.gaps[g].mean, config_.gaps[g].sigma);
  }
}

Category PatientSampler::sample_category(std::mt19937_64& rng) const {
  std::vector<double> w;
  for (const CategoryShare& s : config_.mix) w.push_back(s.percent);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  return config_.mix[pick(rng)].category;
}

Category PatientSampler::sample_category(WaitingListStatus status, std::mt19937_64& rng) const {
  std::vector<double> w;
  for (const CategoryShare& s : config_.mix) w.push_back(s.category.status == status ? s.percent : 0.0);
  if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) {
    throw DisallowedCategory("no category with status " + std::string(to_string(status)));
  }
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  return config_.mix[pick(rng)].category;
}

int PatientSampler::sample_gap(GapClass cls, std::mt19937_64& rng) const {
  const auto g = static_cast<std::size_t>(cls);
  std::normal_distribution<double> normal(mu_[g], config_.gaps[g].sigma);
  const double x = std::exp(normal(rng));
  return static_cast<int>(std::lround(std::min(x, 1e6)));
}

PatientCase PatientSampler::sample_patient(const Category& category, Day booking,
                                           std::string id, std::mt19937_64& rng) const {
  const bool allowed = std::any_of(config_.mix.begin(), config_.mix.end(), [&](const auto& s) {
    return s.category == category && s.percent > 0.0;
  });
  if (!allowed) throw DisallowedCategory("category not present in the mix");

  PatientCase p;
  p.id = std::move(id);
  p.status = category.status;
  p.intent = category.intent;
  p.radiation = category.radiation;
  p.weight = patient_weight(p.status);
  p.booking = booking;
  const int gap = sample_gap(gap_class(p.status, p.intent), rng);
  p.release = booking + gap;
  p.breach = booking + kBreachDays;
  if (p.intent == I::Radical && gap > kBreachDays && bernoulli(config_.adjuvant_share, rng)) {
    // Adjuvant treatment: the breach clock starts from a later reference event.
    p.breach = p.release - config_.adjuvant_reference_lag + kBreachDays;
  }
  const JccoTargets t = jcco_targets(p.status, p.intent);
  p.jcco_max = booking + t.max_acceptable_days;
  p.jcco_good = booking + t.good_practice_days;

  int sessions = 1;
  SessionPattern pattern = SessionPattern::weekly(1);
  switch (p.status) {
    case S::Emergency:
      p.weekend_ok = true;
      break;
    case S::Urgent:
      if (!bernoulli(config_.urgent_single_share, rng)) {
        sessions = draw_count(config_.urgent_sessions, rng);
        pattern = SessionPattern::weekly(5);
      }
      break;
    case S::Routine: {
      if (p.intent == I::Radical && bernoulli(config_.chart_share, rng)) {
        sessions = SessionPattern::kChartDays * SessionPattern::kChartSessionsPerDay;
        pattern = SessionPattern::chart_pattern();
        p.weekend_ok = true;
        break;
      }
      sessions = draw_count(p.intent == I::Radical ? config_.routine_radical_sessions
                                                   : config_.routine_palliative_sessions,
                            rng);
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      if (u < config_.two_per_week_share) {
        pattern = SessionPattern::weekly(2, bernoulli(0.5, rng) ? TwoDayAnchor::MonThu
                                                                : TwoDayAnchor::TueFri);
      } else if (u < config_.two_per_week_share + config_.three_per_week_share) {
        pattern = SessionPattern::weekly(3);
      } else {
        pattern = SessionPattern::weekly(5);
      }
      break;
    }
  }
  p.pattern = pattern;
  p.durations.assign(static_cast<std::size_t>(sessions), config_.session_minutes);
  p.durations.front() += config_.first_session_extra_minutes;

  if (sessions > 1 && !pattern.chart) {
    const int dpw = pattern.days_per_week;
    if (p.intent == I::Palliative && (dpw == 5 || dpw == 3) &&
        bernoulli(config_.palliative_weekend_fraction, rng)) {
      p.min_sessions_before_weekend = 2;
    }
    if (dpw == 5 && sessions <= 5 && bernoulli(config_.same_week_fraction, rng)) {
      p.min_sessions_before_weekend = sessions;
    }
    if (bernoulli(config_.doctor_fraction, rng)) {
      std::uniform_int_distribution<std::size_t> pick(0, config_.doctor_day_sets.size() - 1);
      p.doctor_days = config_.doctor_day_sets[pick(rng)];
      try {
        allowed_start_days(p);
      } catch (const EmptyStartDaySet&) {
        p.doctor_days.reset();
      }
    }
  }
  validate(p);
  allowed_start_days(p);
  return p;
}

Instance generate_instance(const GeneratorConfig& config, std::uint64_t master_seed, int index) {
  const PatientSampler sampler(config);
  std::mt19937_64 rng(derive_seed(master_seed, static_cast<std::uint64_t>(index)));

  Instance inst;
  inst.name = padded("inst-", index + 1, 2);
  const int offset =
      std::uniform_int_distribution<int>(0, config.origin_window_days - 1)(rng);
  inst.origin = year_month_day{sys_days{config.first_origin} + days{offset}};
  inst.span_days = days_between(inst.origin, add_months(inst.origin, config.span_months));
  inst.warmup_days = days_between(inst.origin, add_months(inst.origin, config.warmup_months));
  const Calendar calendar = inst.calendar();

  int serial = 0;
  for (Day d = 1; d <= inst.span_days; ++d) {
    const bool weekend = is_weekend(calendar.weekday(d));
    const int week = inst.week_of_year(d);
    // Emergencies first, then urgent, then routine: a fixed order within the day.
    for (S status : {S::Emergency, S::Urgent, S::Routine}) {
      if (weekend && status != S::Emergency) continue;
      const double rate = seasonal_arrival_rate(config, week, status);
      if (rate <= 0.0) continue;
      const int count = std::poisson_distribution<int>(rate)(rng);
      for (int n = 0; n < count; ++n) {
        const Category c = sampler.sample_category(status, rng);
        inst.patients.push_back(
            sampler.sample_patient(c, d, padded("P", ++serial, 6), rng));
      }
    }
  }
  return inst;
}

std::vector<Instance> generate_instances(const GeneratorConfig& config,
                                         std::uint64_t master_seed, Execution exec) {
  config.validate();
  std::vector<Instance> out(static_cast<std::size_t>(config.instances));
  if (exec == Execution::Serial) {
    for (int i = 0; i < config.instances; ++i) {
      out[static_cast<std::size_t>(i)] = generate_instance(config, master_seed, i);
    }
    return out;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < config.instances; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = generate_instance(config, master_seed, i);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace rtsched
