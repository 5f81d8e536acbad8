#include <benchmark/benchmark.h>

#include "jamflow/api_solver.hpp"
#include "jamflow/attack_mdp.hpp"
#include "jamflow/exact_solver.hpp"
#include "jamflow/features.hpp"
#include "jamflow/finite_mdp.hpp"
#include "jamflow/rng.hpp"
#include "jamflow/scenario.hpp"

using namespace jamflow;

namespace {

const ScenarioConfig& reference_scenario() {
  static const ScenarioConfig sc = resolve_scenario("system1");
  return sc;
}

void bm_transition(benchmark::State& state) {
  const ScenarioConfig& sc = reference_scenario();
  const SystemState start{{40.0, 10.0}, {0.5, 0.5}};
  const AttackAction action = AttackAction::jam(0, 0.5);
  SystemState next;
  Observation scratch;
  for (auto _ : state) {
    transition_into(start, action, 8, true, sc.segments, sc.admission_rule,
                    next, scratch);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(bm_transition);

void bm_expected_one_step(benchmark::State& state) {
  const ScenarioConfig& sc = reference_scenario();
  const SystemState start{{40.0, 10.0}, {0.5, 0.5}};
  const AttackAction action = AttackAction::jam(0, 0.5);
  auto zero = [](const SystemState&) { return 0.0; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_one_step(start, action, zero, sc));
  }
}
BENCHMARK(bm_expected_one_step);

void bm_feature_vector(benchmark::State& state) {
  const ScenarioConfig& sc = reference_scenario();
  const SystemState s{{40.0, 10.0}, {0.3, 0.7}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(feature_vector(s, sc));
  }
}
BENCHMARK(bm_feature_vector);

void bm_greedy_rollout(benchmark::State& state) {
  const ScenarioConfig& sc = reference_scenario();
  WeightVector w;
  w.values.assign(kFeatureCount, 0.1);
  const PolicyFn policy = improve_policy_api(w, sc);
  const SystemState start{{40.0, 10.0}, {0.5, 0.5}};
  std::uint64_t t = 0;
  for (auto _ : state) {
    Rng rng(derive_seed(3, "bench", t++));
    benchmark::DoNotOptimize(
        simulate_trajectory(start, policy, sc, 100, rng));
  }
}
BENCHMARK(bm_greedy_rollout);

void bm_build_finite_mdp(benchmark::State& state) {
  const ScenarioConfig& sc = reference_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_finite_mdp(sc, DiscretizationGrid{}));
  }
}
BENCHMARK(bm_build_finite_mdp);

void bm_value_iteration(benchmark::State& state) {
  const ScenarioConfig& sc = reference_scenario();
  const FiniteMdp mdp = build_finite_mdp(sc, DiscretizationGrid{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(value_iteration(mdp, 1e-8));
  }
}
BENCHMARK(bm_value_iteration);

void bm_policy_iteration(benchmark::State& state) {
  const ScenarioConfig& sc = reference_scenario();
  const FiniteMdp mdp = build_finite_mdp(sc, DiscretizationGrid{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        policy_iteration(mdp, PolicyVector(mdp.state_count(), 0)));
  }
}
BENCHMARK(bm_policy_iteration);

}  // namespace

BENCHMARK_MAIN();
