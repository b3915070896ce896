#include <benchmark/benchmark.h>

#include "avrp/experiment.h"
#include "avrp/rng.h"

namespace avrp {
namespace {

GeneratedExperiment make_experiment(int nodes, int objects) {
  ExperimentConfig config;
  config.nodes = nodes;
  config.objects = objects;
  config.seed = 7;
  return generate_experiment(config);
}

void BM_AllPairsShortestPaths(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Graph g = assign_link_costs(generate_ba_topology(n, 2, 1), 1, 10, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(all_pairs_shortest_paths(g));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_AllPairsShortestPaths)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_DeltaCostOfAdd(benchmark::State& state) {
  const GeneratedExperiment e = make_experiment(static_cast<int>(state.range(0)), 200);
  const Scenario& s = e.scenario;
  const ReplicationMatrix x = primary_only_placement(s.servers, s.objects);
  const NearestIndex n = build_nearest_index(x, e.costs);
  Rng rng(3);
  for (auto _ : state) {
    const int i = static_cast<int>(rng.uniform_int(0, x.rows() - 1));
    const int k = static_cast<int>(rng.uniform_int(0, x.cols() - 1));
    if (x.hosts(i, k)) continue;
    benchmark::DoNotOptimize(delta_cost_of_add(i, k, x, n, s.traffic, e.costs));
  }
}
BENCHMARK(BM_DeltaCostOfAdd)->Arg(50)->Arg(200);

void BM_Solve(benchmark::State& state) {
  const GeneratedExperiment e = make_experiment(30, 300);
  const auto algorithm = static_cast<Algorithm>(state.range(0));
  const int cap = static_cast<int>(state.range(1));
  SolverConfig config;
  config.algorithm = algorithm;
  config.max_replicas_per_object = cap;
  Scenario s = e.scenario;
  s.servers.capacities = capacities_for({CapacityPolicy::Kind::kSlack, 1.5},
                                        s.objects, s.servers.capacities, cap);
  const ReplicationMatrix x_old = primary_only_placement(s.servers, s.objects);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve({e.costs, s, x_old}, config));
  }
  state.SetLabel(std::string(to_string(algorithm)));
}
BENCHMARK(BM_Solve)
    ->Args({static_cast<int>(Algorithm::kAagg), 3})
    ->Args({static_cast<int>(Algorithm::kAagro), 3})
    ->Args({static_cast<int>(Algorithm::kGg), 3})
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace avrp

BENCHMARK_MAIN();
