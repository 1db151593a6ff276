// Serial reference vs OpenMP kernels on identical inputs.
#include <benchmark/benchmark.h>

#include <random>

#include "rtsched/datagen.hpp"
#include "rtsched/model.hpp"
#include "rtsched/simulator.hpp"
#include "rtsched/solver.hpp"
#include "rtsched/stats.hpp"

namespace {

using namespace rtsched;

Execution mode(const benchmark::State& state) {
  return state.range(0) ? Execution::Parallel : Execution::Serial;
}

void BM_Bootstrap(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> a(33), b(33);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = noise(rng);
    b[i] = noise(rng) + 0.3;
  }
  BootstrapOptions options;
  options.exec = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_compare(a, b, options, 11));
}
BENCHMARK(BM_Bootstrap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// A day's worth of group-C patients against an empty ledger.
void BM_CompactModel(benchmark::State& state) {
  GeneratorConfig config;
  config.mean_arrivals_per_weekday = 60.0;
  const PatientSampler sampler(config);
  std::mt19937_64 rng(3);
  std::vector<PatientCase> batch;
  for (int n = 0; batch.size() < 40; ++n) {
    const Category c = sampler.sample_category(rng);
    if (machine_type_for(c.radiation) != MachineType::C) continue;
    batch.push_back(sampler.sample_patient(c, 1, "P" + std::to_string(n), rng));
  }
  const auto fleet = default_fleet();
  const Calendar calendar{Weekday::Mon};
  const CapacityGrid capacity(fleet.size(), calendar);
  const BookingLedger ledger(fleet.size());
  const BookingState booking{fleet, ledger, capacity, calendar};
  const Horizon horizon = planning_horizon(batch, booking, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_compact_model(batch, booking, horizon, mode(state)));
  }
}
BENCHMARK(BM_CompactModel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SimulateInstances(benchmark::State& state) {
  GeneratorConfig config;
  config.instances = 4;
  config.span_months = 3;
  config.warmup_months = 1;
  const auto instances = generate_instances(config, 5, Execution::Serial);
  SimulationOptions options;
  options.budget = SolveBudget::nodes(200);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_instances(instances, PolicyConfig{}, options, mode(state)));
  }
}
BENCHMARK(BM_SimulateInstances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GenerateInstances(benchmark::State& state) {
  GeneratorConfig config;
  config.instances = 8;
  for (auto _ : state) benchmark::DoNotOptimize(generate_instances(config, 9, mode(state)));
}
BENCHMARK(BM_GenerateInstances)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
