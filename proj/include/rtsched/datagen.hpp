#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "rtsched/instance.hpp"
#include "rtsched/parallel.hpp"
#include "rtsched/random.hpp"

namespace rtsched {

class InvalidConfig : public DataError {
 public:
  using DataError::DataError;
};

class DisallowedCategory : public DataError {
 public:
  using DataError::DataError;
};

struct Category {
  WaitingListStatus status = WaitingListStatus::Routine;
  TreatmentIntent intent = TreatmentIntent::Radical;
  RadiationNeed radiation = RadiationNeed::HighEnergyPhotonGroup;
  bool operator==(const Category&) const = default;
};

struct CategoryShare {
  Category category;
  double percent = 0.0;  // raw table value; normalized on use
};

/// Discretized log-normal gap: round(X) with log X ~ N(mu, sigma), mu fitted to `mean`.
struct GapDistribution {
  double mean = 1.0;
  double sigma = 0.6;
};

enum class GapClass : std::uint8_t { Emergency, Urgent, RoutinePalliative, RoutineRadical };

GapClass gap_class(WaitingListStatus status, TreatmentIntent intent);

using CountTable = std::map<int, double>;  // value -> probability mass

struct GeneratorConfig {
  int instances = 33;
  int span_months = 18;
  int warmup_months = 6;
  /// Instance origins are drawn uniformly from this many days after `first_origin`.
  std::chrono::year_month_day first_origin{std::chrono::year{2003}, std::chrono::January,
                                           std::chrono::day{1}};
  int origin_window_days = 730;

  /// CALIBRATED: total expected arrivals on a weekday at multiplier 1.
  double mean_arrivals_per_weekday = 9.0;
  /// Weekly multipliers (week 1..52) per status: routine, urgent, emergency.
  std::array<std::array<double, 52>, 3> seasonality = default_seasonality();

  std::vector<CategoryShare> mix = default_mix();

  /// Indexed by GapClass.
  std::array<GapDistribution, 4> gaps = {GapDistribution{1.0, 0.6}, GapDistribution{11.0, 0.75},
                                         GapDistribution{18.0, 0.6}, GapDistribution{33.0, 0.45}};
  /// Radical patients whose gap exceeds the breach window get a breach date
  /// recomputed from a later reference day with this probability.
  double adjuvant_share = 0.5;
  int adjuvant_reference_lag = 10;

  double urgent_single_share = 0.63;
  CountTable urgent_sessions = {{2, .12}, {3, .12}, {4, .10}, {5, .25}, {6, .08},
                                {8, .08}, {10, .15}, {13, .05}, {15, .05}};
  CountTable routine_palliative_sessions = {{3, .10}, {5, .35}, {8, .10},
                                            {10, .30}, {13, .05}, {15, .10}};
  CountTable routine_radical_sessions = {{10, .05}, {15, .12}, {16, .05}, {20, .26}, {23, .12},
                                         {25, .15}, {28, .05}, {30, .12}, {33, .05}, {37, .03}};
  double chart_share = 0.01;           // of routine radical patients
  double two_per_week_share = 0.02;    // of routine multi-session patients
  double three_per_week_share = 0.02;  // of routine multi-session patients

  int session_minutes = 12;
  int first_session_extra_minutes = 3;

  double palliative_weekend_fraction = 0.3;
  double same_week_fraction = 0.3;
  double doctor_fraction = 0.15;
  std::vector<WeekdaySet> doctor_day_sets = {
      {Weekday::Mon, Weekday::Wed}, {Weekday::Tue, Weekday::Thu}, {Weekday::Wed, Weekday::Fri},
      {Weekday::Mon, Weekday::Thu}, {Weekday::Tue, Weekday::Fri},
      {Weekday::Mon, Weekday::Tue, Weekday::Wed}};

  /// Winter trough, spring peak and a late-December drop that is shallower
  /// for emergency and urgent arrivals.
  static std::array<std::array<double, 52>, 3> default_seasonality();
  /// Category percentages of the two reference hospitals (sum 99.9).
  static std::vector<CategoryShare> default_mix();
  /// Throws InvalidConfig.
  void validate() const;
};

/// Expected arrivals per day for a status in a given ISO week (1..52), weekday rate.
double seasonal_arrival_rate(const GeneratorConfig& config, int week_of_year,
                             WaitingListStatus status);

/// Share of patients with this status in the mix.
double status_share(const GeneratorConfig& config, WaitingListStatus status);

/// mu with E[round(exp(N(mu, sigma)))] == mean (bisection).
double fit_lognormal_mu(double mean, double sigma);

/// Stateless sampler bound to a config (mu values precomputed).
class PatientSampler {
 public:
  explicit PatientSampler(const GeneratorConfig& config);

  Category sample_category(std::mt19937_64& rng) const;
  /// Category within a status (conditional mix).
  Category sample_category(WaitingListStatus status, std::mt19937_64& rng) const;
  int sample_gap(GapClass cls, std::mt19937_64& rng) const;

  /// A fully populated patient booked on `booking`. Throws DisallowedCategory.
  PatientCase sample_patient(const Category& category, Day booking, std::string id,
                             std::mt19937_64& rng) const;

  const GeneratorConfig& config() const { return config_; }

 private:
  GeneratorConfig config_;
  std::array<double, 4> mu_{};
};

/// Instance `index` of the family defined by (config, master_seed).
Instance generate_instance(const GeneratorConfig& config, std::uint64_t master_seed, int index);

std::vector<Instance> generate_instances(const GeneratorConfig& config,
                                         std::uint64_t master_seed,
                                         Execution exec = Execution::Parallel);

}  // namespace rtsched
