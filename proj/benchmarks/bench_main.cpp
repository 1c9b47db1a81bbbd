#include <random>

#include <benchmark/benchmark.h>

#include "inertid/dynamics.hpp"
#include "inertid/harness/config.hpp"
#include "inertid/tsc/clustering.hpp"
#include "inertid/tsc/soft_dtw.hpp"

namespace {

using namespace inertid;

tsc::SeriesMatrix random_series(std::mt19937_64& rng, int t) {
  std::normal_distribution<double> n;
  tsc::SeriesMatrix s(t, 3);
  for (auto& v : s.reshaped()) v = n(rng);
  return s;
}

void BM_SoftDtw(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int t = static_cast<int>(state.range(0));
  const auto a = random_series(rng, t), b = random_series(rng, t);
  for (auto _ : state) benchmark::DoNotOptimize(tsc::soft_dtw(a, b, 1.0));
  state.SetComplexityN(t);
}
BENCHMARK(BM_SoftDtw)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNSquared);

void BM_SoftDtwGradient(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int t = static_cast<int>(state.range(0));
  const auto a = random_series(rng, t), b = random_series(rng, t);
  for (auto _ : state) benchmark::DoNotOptimize(tsc::soft_dtw_gradient(a, b, 1.0));
}
BENCHMARK(BM_SoftDtwGradient)->Arg(64)->Arg(128);

void BM_SimulateSlot(benchmark::State& state) {
  const harness::ScenarioConfig c = harness::falcon_stage();
  dynamics::Plant plant = harness::build_plant(c);
  plant.inertia = harness::build_configurations(c).front().params;
  dynamics::Simulator sim(plant, c.sim, 3);
  auto action = actuators::ActuationVector::null(c.thrusters.count(), c.wheels.size());
  action.thruster_duty[0] = 0.4;
  action.wheel_voltage_fraction[1] = 0.5;
  for (auto _ : state) {
    sim.reset(3);
    benchmark::DoNotOptimize(sim.run_slot(action));
  }
}
BENCHMARK(BM_SimulateSlot);

void BM_KMeansFit(benchmark::State& state) {
  const harness::ScenarioConfig c = harness::falcon_stage();
  const auto configs = harness::build_configurations(c);
  const auto seq = harness::default_sequence(c.thrusters.count(), c.wheels.size());
  const auto data = dynamics::generate_dataset(configs, harness::build_plant(c), seq,
                                               static_cast<int>(state.range(0)), c.sim, 4);
  std::vector<tsc::SeriesMatrix> series;
  for (const auto& t : data.trajectories) series.push_back(tsc::series_from_trajectory(t));
  const auto opts = harness::classifier_options(c, 1, 5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(tsc::kmeans_fit(series, opts));
}
BENCHMARK(BM_KMeansFit)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
