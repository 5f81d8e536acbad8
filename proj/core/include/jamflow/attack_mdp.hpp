#pragma once

#include <cassert>
#include <span>
#include <vector>

#include "jamflow/reward.hpp"
#include "jamflow/scenario.hpp"
#include "jamflow/traffic_model.hpp"

namespace jamflow {

// The adversary's action set for a scenario: NoAttack first, then every
// (segment, fraction) pair with segments outermost and fractions in
// scenario order. The order is part of the contract; ties in any argmax
// resolve to the earliest action, so NoAttack wins a dead heat.
std::vector<AttackAction> enumerate_actions(const ScenarioConfig& scenario);

// Exact one-step Bellman backup: the expectation of
//   stage reward + discount * value_fn(successor)
// over the arrival distribution and, for jam actions, the Bernoulli success
// draw. Zero-probability branches are skipped, so a deterministic scenario
// touches exactly one successor per arrival count. The cost term is charged
// on failed jams only when the scenario says so.
template <class ValueFn>
double expected_one_step(const SystemState& state, const AttackAction& action,
                         ValueFn&& value_fn, const ScenarioConfig& scenario) {
  SystemState next;
  Observation scratch;

  struct Branch {
    bool success;
    double weight;
  };
  Branch branches[2];
  int branch_count = 0;
  if (!action.jams()) {
    branches[branch_count++] = {true, 1.0};
  } else {
    const double p = scenario.success_probability;
    if (p > 0.0) branches[branch_count++] = {true, p};
    if (p < 1.0) branches[branch_count++] = {false, 1.0 - p};
  }

  const double cost = attack_cost(state, action, scenario.reward);
  double total = 0.0;
  for (const auto& outcome : scenario.arrivals.support()) {
    if (outcome.probability == 0.0) continue;
    for (int b = 0; b < branch_count; ++b) {
      const Branch& br = branches[b];
      transition_into(state, action, outcome.count, br.success,
                      scenario.segments, scenario.admission_rule, next,
                      scratch);
      double g = damage(next, scenario.reward, scenario.segments,
                        scenario.admission_rule);
      if (action.jams() && (br.success || scenario.charge_cost_on_failure))
        g -= cost;
      total += outcome.probability * br.weight *
               (g + scenario.discount * value_fn(next));
    }
  }
  return total;
}

// One-step lookahead policy under an approximate value function: evaluates
// expected_one_step for every action and returns the best, ties going to
// the earliest action in `actions`.
template <class ValueFn>
AttackAction greedy_action(const SystemState& state,
                           std::span<const AttackAction> actions,
                           ValueFn&& value_fn, const ScenarioConfig& scenario) {
  assert(!actions.empty());
  std::size_t best = 0;
  double best_value = expected_one_step(state, actions[0], value_fn, scenario);
  for (std::size_t i = 1; i < actions.size(); ++i) {
    const double v = expected_one_step(state, actions[i], value_fn, scenario);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  return actions[best];
}

}  // namespace jamflow
