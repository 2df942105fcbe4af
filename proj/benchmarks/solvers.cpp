#include <map>
#include <memory>
#include <string>

#include <benchmark/benchmark.h>

#include "symctl/grid.hpp"
#include "symctl/pgrm.hpp"
#include "symctl/solver.hpp"
#include "../tests/oracles.hpp"

using namespace symctl;

namespace {

const Scenario& scenario() {
  static const Scenario s = load_bundled_scenario();
  return s;
}

const ProblemInstance& goal_instance(const char* goal) {
  static const CellGraph graph = discretize(scenario(), GridSpec{});
  static std::map<std::string, ProblemInstance> cache;
  auto it = cache.find(goal);
  if (it == cache.end()) it = cache.emplace(goal, build_reach_avoid(graph, goal)).first;
  return it->second;
}

template <typename Solve>
void run(benchmark::State& state, const ProblemInstance& p, Solve solve) {
  SolveStats last;
  for (auto _ : state) {
    auto r = solve(p);
    benchmark::DoNotOptimize(r.values.data());
    last = r.stats;
  }
  state.counters["iterations"] = static_cast<double>(last.iterations);
  state.counters["frontier_ratio"] = last.frontier_ratio;
}

void BM_ModifiedScenario(benchmark::State& state) {
  run(state, goal_instance("A1"), [](const ProblemInstance& p) { return solve_modified(p); });
}
void BM_BaselineScenario(benchmark::State& state) {
  run(state, goal_instance("A1"), [](const ProblemInstance& p) { return solve_baseline(p); });
}
void BM_OracleScenario(benchmark::State& state) {
  SolveOptions opts;
  opts.threads = static_cast<unsigned>(state.range(0));
  run(state, goal_instance("A1"), [&](const ProblemInstance& p) { return solve_oracle(p, opts); });
}

void BM_ModifiedRandom(benchmark::State& state) {
  oracle::RandomShape shape;
  shape.max_states = static_cast<std::size_t>(state.range(0));
  const ProblemInstance p = oracle::random_instance(17, shape);
  run(state, p, [](const ProblemInstance& q) { return solve_modified(q); });
}
void BM_BaselineRandom(benchmark::State& state) {
  oracle::RandomShape shape;
  shape.max_states = static_cast<std::size_t>(state.range(0));
  const ProblemInstance p = oracle::random_instance(17, shape);
  run(state, p, [](const ProblemInstance& q) { return solve_baseline(q); });
}

void BM_Discretize(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(discretize(scenario(), GridSpec{}).num_cells());
}

void BM_Mission(benchmark::State& state) {
  static const SolvedSuite suite =
      solve_suite(scenario(), std::make_shared<const CellGraph>(discretize(scenario(), GridSpec{})));
  const MissionConfig config = default_mission_config(scenario());
  for (auto _ : state) benchmark::DoNotOptimize(run_mission(suite, config).complete);
}

}  // namespace

BENCHMARK(BM_ModifiedScenario)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BaselineScenario)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleScenario)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ModifiedRandom)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_BaselineRandom)->Arg(200)->Arg(2000)->Arg(20000);
BENCHMARK(BM_Discretize)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Mission)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
