#include "jamflow/api_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "jamflow/attack_mdp.hpp"
#include "jamflow/reward.hpp"

namespace jamflow {

namespace {

constexpr double kRepresentativeQueueLevels[] = {0.0, 25.0, 50.0, 75.0};

std::size_t action_index(const AttackAction& action,
                         std::span<const AttackAction> actions) {
  for (std::size_t i = 0; i < actions.size(); ++i)
    if (actions[i] == action) return i;
  throw std::invalid_argument("action not in the scenario's action set: " +
                              action.name());
}

}  // namespace

void validate_plan(const RolloutPlan& plan) {
  if (plan.trajectories_per_state < 1)
    throw std::invalid_argument("plan: trajectories_per_state must be >= 1");
  if (plan.horizon < 1)
    throw std::invalid_argument("plan: horizon must be >= 1");
  if (plan.representative_states.empty())
    throw std::invalid_argument("plan: no representative states");
}

double simulate_trajectory(const SystemState& start, const PolicyFn& policy,
                           const ScenarioConfig& scenario, int horizon,
                           Rng& rng, std::vector<std::int64_t>* action_counts,
                           std::span<const AttackAction> actions) {
  SystemState state = start;
  SystemState next;
  Observation scratch;
  double total = 0.0;
  double discount_k = 1.0;
  for (int k = 0; k < horizon; ++k) {
    const AttackAction action = policy(state, rng);
    const int arrivals = scenario.arrivals.sample(rng);
    const bool success =
        !action.jams() || rng.bernoulli(scenario.success_probability);
    transition_into(state, action, arrivals, success, scenario.segments,
                    scenario.admission_rule, next, scratch);
    double g = damage(next, scenario.reward, scenario.segments,
                      scenario.admission_rule);
    if (action.jams() && (success || scenario.charge_cost_on_failure))
      g -= attack_cost(state, action, scenario.reward);
    if (action_counts)
      ++(*action_counts)[action_index(action, actions)];
    total += discount_k * g;
    discount_k *= scenario.discount;
    std::swap(state, next);
  }
  return total;
}

std::vector<double> rollout_returns(const SystemState& start,
                                    const PolicyFn& policy,
                                    const RolloutPlan& plan,
                                    const ScenarioConfig& scenario,
                                    std::uint64_t seed) {
  if (plan.trajectories_per_state < 1 || plan.horizon < 1)
    throw std::invalid_argument("rollout: non-positive plan parameters");
  std::vector<double> returns;
  returns.reserve(static_cast<std::size_t>(plan.trajectories_per_state));
  for (int t = 0; t < plan.trajectories_per_state; ++t) {
    Rng rng(derive_seed(seed, "trajectory", static_cast<std::uint64_t>(t)));
    returns.push_back(
        simulate_trajectory(start, policy, scenario, plan.horizon, rng));
  }
  return returns;
}

double rollout_return(const SystemState& start, const PolicyFn& policy,
                      const RolloutPlan& plan, const ScenarioConfig& scenario,
                      std::uint64_t seed) {
  const std::vector<double> returns =
      rollout_returns(start, policy, plan, scenario, seed);
  double sum = 0.0;
  for (double r : returns) sum += r;
  return sum / static_cast<double>(returns.size());
}

std::vector<double> rollout_returns_over_states(
    const PolicyFn& policy, const ScenarioConfig& scenario,
    std::span<const SystemState> starts, int horizon,
    int trajectories_per_state, std::uint64_t seed) {
  if (starts.empty())
    throw std::invalid_argument("rollout: no start states");
  RolloutPlan plan;
  plan.trajectories_per_state = trajectories_per_state;
  plan.horizon = horizon;
  plan.representative_states.push_back(starts[0]);  // satisfies validation
  std::vector<double> all;
  all.reserve(starts.size() *
              static_cast<std::size_t>(trajectories_per_state));
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const std::vector<double> returns = rollout_returns(
        starts[s], policy, plan, scenario,
        derive_seed(seed, "eval-state", static_cast<std::uint64_t>(s)));
    all.insert(all.end(), returns.begin(), returns.end());
  }
  return all;
}

std::vector<SystemState> representative_states(const ScenarioConfig& scenario,
                                               Rng& rng) {
  if (scenario.segments.size() != 2)
    throw std::invalid_argument(
        "representative_states: requires a two-segment scenario");
  std::vector<SystemState> states;
  states.reserve(32);
  // Truthful-split block first: the admission the controller would publish
  // for those queues.
  for (double q1 : kRepresentativeQueueLevels)
    for (double q2 : kRepresentativeQueueLevels) {
      Observation truthful{{q1, q2}};
      states.push_back(SystemState{
          {q1, q2},
          admission_ratios(truthful, scenario.segments,
                           scenario.admission_rule)});
    }
  // Then the same queue pairs under an arbitrary advertised split, so the
  // fit sees states where the controller has been misled.
  for (double q1 : kRepresentativeQueueLevels)
    for (double q2 : kRepresentativeQueueLevels) {
      const double share = rng.uniform01();
      states.push_back(SystemState{{q1, q2}, {share, 1.0 - share}});
    }
  return states;
}

std::vector<SystemState> held_out_states(const ScenarioConfig& scenario,
                                         std::uint64_t seed,
                                         std::size_t count) {
  if (scenario.segments.size() != 2)
    throw std::invalid_argument(
        "held_out_states: requires a two-segment scenario");
  if (count == 0)
    throw std::invalid_argument("held_out_states: count must be positive");
  Rng rng(derive_seed(seed, "held-out"));
  std::vector<SystemState> states;
  states.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double q1 = rng.uniform(0.0, 100.0);
    const double q2 = rng.uniform(0.0, 100.0);
    const double share = rng.uniform01();
    states.push_back(SystemState{{q1, q2}, {share, 1.0 - share}});
  }
  return states;
}

PolicyFn uniform_random_policy(const ScenarioConfig& scenario) {
  return [actions = enumerate_actions(scenario)](const SystemState&,
                                                 Rng& rng) {
    return actions[rng.uniform_index(actions.size())];
  };
}

PolicyFn improve_policy_api(const WeightVector& weights,
                            const ScenarioConfig& scenario) {
  if (weights.values.size() != kFeatureCount)
    throw std::invalid_argument("improve_policy_api: expected " +
                                std::to_string(kFeatureCount) + " weights");
  return [weights, scenario,
          actions = enumerate_actions(scenario)](const SystemState& state,
                                                 Rng&) {
    return greedy_action(
        state, actions,
        [&](const SystemState& next) {
          return approx_value(weights, feature_vector(next, scenario));
        },
        scenario);
  };
}

ApiResult run_api(const ScenarioConfig& scenario, const RolloutPlan& plan,
                  int iterations, std::uint64_t seed) {
  validate_plan(plan);
  if (iterations < 1)
    throw std::invalid_argument("run_api: iterations must be >= 1");

  ApiResult result;
  result.held_out = held_out_states(scenario, seed);
  for (const auto& held : result.held_out)
    for (const auto& rep : plan.representative_states)
      if (held.queues == rep.queues && held.admission == rep.admission)
        throw std::logic_error(
            "run_api: held-out state collides with a representative state");

  const std::uint64_t eval_seed = derive_seed(seed, "eval");
  PolicyFn current = uniform_random_policy(scenario);

  std::vector<std::pair<FeatureVector, double>> samples(
      plan.representative_states.size());
  result.best_reward = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    // Policy evaluation: Monte-Carlo values of the current policy at the
    // representative states, fresh noise each iteration.
    for (std::size_t s = 0; s < plan.representative_states.size(); ++s) {
      const SystemState& start = plan.representative_states[s];
      samples[s] = {feature_vector(start, scenario),
                    rollout_return(start, current, plan, scenario,
                                   derive_seed(seed, "train",
                                               static_cast<std::uint64_t>(it),
                                               static_cast<std::uint64_t>(s)))};
    }
    const WeightVector weights = fit_weights(samples, kDefaultRidge);
    PolicyFn candidate = improve_policy_api(weights, scenario);

    // Score the candidate on the held-out states with the same seeds every
    // iteration, so scores are comparable across candidates.
    const std::vector<double> returns = rollout_returns_over_states(
        candidate, scenario, result.held_out, plan.horizon,
        plan.trajectories_per_state, eval_seed);
    double eval_reward = 0.0;
    for (double r : returns) eval_reward += r;
    eval_reward /= static_cast<double>(returns.size());

    if (eval_reward > result.best_reward) {
      result.best_reward = eval_reward;
      result.best_weights = weights;
    }
    result.history.push_back({it, eval_reward, result.best_reward});
    current = std::move(candidate);
  }
  return result;
}

}  // namespace jamflow
