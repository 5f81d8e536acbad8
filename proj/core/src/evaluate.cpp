#include "jamflow/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "jamflow/attack_mdp.hpp"

namespace jamflow {

PolicyHandle PolicyHandle::dos(int segment, double fraction) {
  PolicyHandle h;
  h.kind = Kind::kDoS;
  h.dos_segment = segment;
  h.dos_fraction = fraction;
  return h;
}

PolicyHandle PolicyHandle::api_greedy(WeightVector weights) {
  PolicyHandle h;
  h.kind = Kind::kApiGreedy;
  h.weights = std::move(weights);
  return h;
}

PolicyHandle PolicyHandle::tabular(std::shared_ptr<const FiniteMdp> mdp,
                                   PolicyVector policy) {
  PolicyHandle h;
  h.kind = Kind::kTabular;
  h.tabular_mdp = std::move(mdp);
  h.tabular_policy = std::move(policy);
  return h;
}

std::string PolicyHandle::name() const {
  switch (kind) {
    case Kind::kNoAttack: return "no_attack";
    case Kind::kRandom: return "random";
    case Kind::kMyopic: return "myopic";
    case Kind::kApiGreedy: return "api";
    case Kind::kTabular: return "tabular";
    case Kind::kDoS: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "dos_s%d_f%.2f", dos_segment + 1,
                    dos_fraction);
      return buf;
    }
  }
  return "unknown";
}

PolicyFn make_policy(const PolicyHandle& handle,
                     const ScenarioConfig& scenario) {
  switch (handle.kind) {
    case PolicyHandle::Kind::kNoAttack:
      return [](const SystemState&, Rng&) { return AttackAction::no_attack(); };
    case PolicyHandle::Kind::kRandom:
      return uniform_random_policy(scenario);
    case PolicyHandle::Kind::kDoS: {
      if (handle.dos_segment < 0 ||
          static_cast<std::size_t>(handle.dos_segment) >=
              scenario.segments.size())
        throw std::invalid_argument("dos policy: segment out of range");
      if (std::find(scenario.jam_fractions.begin(),
                    scenario.jam_fractions.end(),
                    handle.dos_fraction) == scenario.jam_fractions.end())
        throw std::invalid_argument(
            "dos policy: fraction is not in the scenario's jam_fractions");
      const AttackAction action =
          AttackAction::jam(handle.dos_segment, handle.dos_fraction);
      return [action](const SystemState&, Rng&) { return action; };
    }
    case PolicyHandle::Kind::kMyopic:
      // Greedy on the expected immediate reward: the zero value function.
      return [scenario, actions = enumerate_actions(scenario)](
                 const SystemState& state, Rng&) {
        return greedy_action(
            state, actions, [](const SystemState&) { return 0.0; }, scenario);
      };
    case PolicyHandle::Kind::kApiGreedy:
      if (handle.weights.values.empty())
        throw std::invalid_argument(
            "api policy: untrained handle; train it or supply weights");
      return improve_policy_api(handle.weights, scenario);
    case PolicyHandle::Kind::kTabular: {
      if (!handle.tabular_mdp ||
          handle.tabular_policy.size() != handle.tabular_mdp->state_count())
        throw std::invalid_argument("tabular policy: malformed handle");
      return [mdp = handle.tabular_mdp, policy = handle.tabular_policy](
                 const SystemState& state, Rng&) {
        return mdp->actions[static_cast<std::size_t>(
            policy[mdp->snap_state(state)])];
      };
    }
  }
  throw std::invalid_argument("make_policy: unknown kind");
}

EvaluationReport evaluate_policy(const PolicyFn& policy,
                                 std::string policy_name,
                                 const ScenarioConfig& scenario,
                                 std::span<const SystemState> start_states,
                                 int horizon, int trajectories_per_state,
                                 std::uint64_t seed) {
  const std::vector<double> returns = rollout_returns_over_states(
      policy, scenario, start_states, horizon, trajectories_per_state, seed);

  double mean = 0.0;
  for (double r : returns) mean += r;
  mean /= static_cast<double>(returns.size());
  double var = 0.0;
  for (double r : returns) var += (r - mean) * (r - mean);
  const double se =
      returns.size() > 1
          ? std::sqrt(var / (static_cast<double>(returns.size()) - 1.0) /
                      static_cast<double>(returns.size()))
          : 0.0;

  EvaluationReport report;
  report.scenario = scenario.name;
  report.policy = std::move(policy_name);
  report.mean_reward = mean;
  report.standard_error = se;
  report.states = start_states.size();
  report.trajectories_per_state = trajectories_per_state;
  report.horizon = horizon;
  report.seed = seed;
  return report;
}

std::vector<HistogramRow> action_histogram(
    const PolicyFn& policy, const ScenarioConfig& scenario,
    std::span<const SystemState> start_states, int horizon,
    int trajectories_per_state, std::uint64_t seed) {
  if (start_states.empty())
    throw std::invalid_argument("histogram: no start states");
  if (horizon < 1 || trajectories_per_state < 1)
    throw std::invalid_argument("histogram: non-positive parameters");
  const std::vector<AttackAction> actions = enumerate_actions(scenario);
  std::vector<std::int64_t> counts(actions.size(), 0);
  // Same seed chain as rollout_returns_over_states, so the histogram
  // describes exactly the trajectories an evaluation with this seed runs.
  for (std::size_t s = 0; s < start_states.size(); ++s) {
    const std::uint64_t state_seed =
        derive_seed(seed, "eval-state", static_cast<std::uint64_t>(s));
    for (int t = 0; t < trajectories_per_state; ++t) {
      Rng rng(derive_seed(state_seed, "trajectory",
                          static_cast<std::uint64_t>(t)));
      simulate_trajectory(start_states[s], policy, scenario, horizon, rng,
                          &counts, actions);
    }
  }
  const double total = static_cast<double>(start_states.size()) *
                       trajectories_per_state * horizon;
  std::vector<HistogramRow> rows;
  rows.reserve(actions.size());
  for (std::size_t a = 0; a < actions.size(); ++a)
    rows.push_back({actions[a], static_cast<double>(counts[a]) / total});
  return rows;
}

std::vector<PolicyHandle> default_policy_set(const ScenarioConfig& scenario) {
  std::vector<PolicyHandle> handles;
  handles.push_back(PolicyHandle::no_attack());
  handles.push_back(PolicyHandle::random());
  handles.push_back(PolicyHandle::myopic());
  for (std::size_t seg = 0; seg < scenario.segments.size(); ++seg)
    for (double fraction : scenario.jam_fractions)
      handles.push_back(PolicyHandle::dos(static_cast<int>(seg), fraction));
  handles.push_back(PolicyHandle::api_untrained());
  return handles;
}

std::vector<SweepRow> sweep_costs(const ScenarioConfig& base_scenario,
                                  std::span<const double> costs,
                                  std::span<const PolicyHandle> policies,
                                  const SweepOptions& options,
                                  std::uint64_t seed) {
  if (costs.empty()) throw std::invalid_argument("sweep: no cost points");
  if (policies.empty()) throw std::invalid_argument("sweep: no policies");
  if (options.api_iterations < 1)
    throw std::invalid_argument("sweep: api_iterations must be >= 1");

  std::vector<SweepRow> rows;
  for (double cost : costs) {
    ScenarioConfig scenario = base_scenario;
    scenario.reward.cost_coefficient = cost;
    validate_scenario(scenario);
    // Held-out starts depend only on the seed: common random numbers across
    // the whole sweep.
    const std::vector<SystemState> held_out =
        held_out_states(scenario, seed, options.held_out_count);

    for (const PolicyHandle& handle : policies) {
      PolicyFn policy;
      if (handle.kind == PolicyHandle::Kind::kApiGreedy &&
          handle.weights.values.empty()) {
        RolloutPlan plan;
        plan.trajectories_per_state = options.trajectories_per_state;
        plan.horizon = options.horizon;
        Rng rep_rng(derive_seed(seed, "rep-states"));
        plan.representative_states = representative_states(scenario, rep_rng);
        const ApiResult trained =
            run_api(scenario, plan, options.api_iterations, seed);
        policy = improve_policy_api(trained.best_weights, scenario);
      } else {
        policy = make_policy(handle, scenario);
      }
      const EvaluationReport report = evaluate_policy(
          policy, handle.name(), scenario, held_out, options.horizon,
          options.trajectories_per_state, seed);
      rows.push_back({cost, report.policy, report.mean_reward,
                      report.standard_error});
    }
  }
  return rows;
}

}  // namespace jamflow
