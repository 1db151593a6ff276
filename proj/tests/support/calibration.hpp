#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "rtsched/datagen.hpp"
#include "rtsched/stats.hpp"

namespace rtsched::testing {

/// Empirical statistics of `samples` patients drawn from the overall mix.
struct CalibrationStats {
  int samples = 0;
  std::vector<double> category_pct;        // parallel to config.mix
  std::array<double, 4> mean_gap{};        // by GapClass
  double five_per_week_pct = 0.0;          // 5 days/week, 1 session/day
  double urgent_single_pct = 0.0;
  double routine_mean_sessions = 0.0;
  double multiple_of_five_pct = 0.0;       // of multi-session patients
  // Share of patients whose release date already misses a target.
  double emergency_good_missed_pct = 0.0;
  double emergency_max_missed_pct = 0.0;
  double palliative_good_missed_pct = 0.0;  // non-emergency palliative
  double palliative_max_missed_pct = 0.0;
  double radical_good_missed_pct = 0.0;
  double radical_max_missed_pct = 0.0;
  double breach_missed_pct = 0.0;
};

CalibrationStats measure_generator(const GeneratorConfig& config, int samples,
                                   std::uint64_t seed);

/// Random comparison input: 1..6 configurations over 2..12 shared instances,
/// with frequent ties, shifts and duplicated configurations.
std::vector<ConfigResults> random_config_results(std::mt19937_64& rng);

/// Random mark options with few replications.
MarkOptions random_mark_options(std::mt19937_64& rng);

}  // namespace rtsched::testing
