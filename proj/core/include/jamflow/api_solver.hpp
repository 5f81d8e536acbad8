#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "jamflow/features.hpp"
#include "jamflow/rng.hpp"
#include "jamflow/scenario.hpp"
#include "jamflow/traffic_model.hpp"

namespace jamflow {

// A (possibly randomized) stationary policy: maps the current state to an
// action, drawing any randomness from the supplied stream.
using PolicyFn = std::function<AttackAction(const SystemState&, Rng&)>;

// Roll-out protocol: how many trajectories per start state and how many
// steps each runs. Returns are discounted by the scenario's discount.
struct RolloutPlan {
  int trajectories_per_state = 50;
  int horizon = 100;
  std::vector<SystemState> representative_states;
};

void validate_plan(const RolloutPlan& plan);

// Simulates one closed-loop trajectory and returns its discounted return.
// Per step: the policy picks an action, arrivals and jam success are drawn,
// the system transitions, and the stage reward is scored (cost charged on
// failed jams only when the scenario says so). When `action_counts` is
// given it accumulates one count per step, indexed by the action's position
// in `actions`.
double simulate_trajectory(const SystemState& start, const PolicyFn& policy,
                           const ScenarioConfig& scenario, int horizon,
                           Rng& rng,
                           std::vector<std::int64_t>* action_counts = nullptr,
                           std::span<const AttackAction> actions = {});

// Per-trajectory discounted returns from one start state; trajectory t uses
// the child stream derive_seed(seed, "trajectory", t).
std::vector<double> rollout_returns(const SystemState& start,
                                    const PolicyFn& policy,
                                    const RolloutPlan& plan,
                                    const ScenarioConfig& scenario,
                                    std::uint64_t seed);

// Monte-Carlo estimate of the policy's value at `start`: the mean of
// rollout_returns.
double rollout_return(const SystemState& start, const PolicyFn& policy,
                      const RolloutPlan& plan, const ScenarioConfig& scenario,
                      std::uint64_t seed);

// All returns across a set of start states, state-major: state index s uses
// the child stream derive_seed(seed, "eval-state", s). This is the one
// scoring path shared by training, evaluation, and reporting, so numbers
// computed with the same seed are directly comparable.
std::vector<double> rollout_returns_over_states(
    const PolicyFn& policy, const ScenarioConfig& scenario,
    std::span<const SystemState> starts, int horizon,
    int trajectories_per_state, std::uint64_t seed);

// Training grid for two-segment scenarios: the 16 queue pairs over
// {0, 25, 50, 75}^2, once with the truthful admission split for those
// queues and once with a uniformly random split drawn from `rng` (32 states
// total, truthful block first).
std::vector<SystemState> representative_states(const ScenarioConfig& scenario,
                                               Rng& rng);

// Held-out evaluation starts, frozen per run from the dedicated child
// stream derive_seed(seed, "held-out"): queues uniform on [0, 100], first
// admission share uniform on [0, 1].
std::vector<SystemState> held_out_states(const ScenarioConfig& scenario,
                                         std::uint64_t seed,
                                         std::size_t count = 32);

// Uniform-random over the scenario's action set; the default roll-out
// policy for the first training iteration.
PolicyFn uniform_random_policy(const ScenarioConfig& scenario);

// Greedy one-step lookahead against the fitted value approximation: the
// policy-improvement operator of approximate policy iteration.
PolicyFn improve_policy_api(const WeightVector& weights,
                            const ScenarioConfig& scenario);

struct ApiIterationRow {
  int iteration = 0;
  double eval_reward = 0.0;  // held-out score of this iteration's candidate
  double best_reward = 0.0;  // best held-out score so far
};

struct ApiResult {
  WeightVector best_weights;
  double best_reward = 0.0;
  std::vector<ApiIterationRow> history;  // one row per iteration
  std::vector<SystemState> held_out;
};

// Approximate policy iteration. Iteration 0 rolls out the uniform-random
// policy at every representative state, fits weights to the returns, and
// improves; each later iteration rolls out the current greedy candidate and
// refits. Every candidate is scored on the held-out states with common
// random numbers across iterations, and the best-scoring weights are kept,
// so the returned policy never chases a late degradation. Fresh rollout
// noise per iteration is what lets the loop escape a bad fit.
ApiResult run_api(const ScenarioConfig& scenario, const RolloutPlan& plan,
                  int iterations, std::uint64_t seed);

}  // namespace jamflow
