#include <benchmark/benchmark.h>

#include <random>

#include "beamroam/selector.hpp"
#include "beamroam/sim.hpp"

using namespace beamroam;

namespace {

// One decision should scale linearly with the number of APs.
void BM_SelectAp(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 50.0);
  SelectorState s;
  for (int i = 0; i < state.range(0); ++i) s.anchored_positions.push_back({u(rng), u(rng), 3.0});
  const Vec3 q{25.0, 25.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(select_ap({1.0, 0.3, 0.0}, q, s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SelectAp)->RangeMultiplier(4)->Range(4, 1024)->Complexity(benchmark::oN);

void BM_RunSelectionTour(benchmark::State& state) {
  Scenario s;
  s.antenna.beamwidth_deg = 90.0;
  const auto layout = directional_layout(s);
  const auto trace = generate_trace(s, 0);
  SelectionConfig cfg;
  cfg.exact_estimation = true;
  const SampleSet dummy({{1.0, {0, 0, 1}}, {2.0, {1, 0, 1}}});
  for (auto _ : state) benchmark::DoNotOptimize(run_selection(trace, layout, dummy, cfg));
}
BENCHMARK(BM_RunSelectionTour);

}  // namespace
