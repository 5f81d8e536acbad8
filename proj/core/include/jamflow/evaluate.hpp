#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jamflow/api_solver.hpp"
#include "jamflow/exact_solver.hpp"
#include "jamflow/finite_mdp.hpp"
#include "jamflow/scenario.hpp"

namespace jamflow {

// A named, constructible policy: the fixed baselines, a trained
// approximate-policy-iteration candidate, or a tabular policy from the
// exact solver (applied to continuous states by snapping to its grid).
struct PolicyHandle {
  enum class Kind { kNoAttack, kRandom, kDoS, kMyopic, kApiGreedy, kTabular };

  Kind kind = Kind::kNoAttack;
  int dos_segment = 0;        // kDoS: 0-based target segment
  double dos_fraction = 0.0;  // kDoS: one of the scenario's jam fractions
  WeightVector weights;       // kApiGreedy: empty means "train in place"
  std::shared_ptr<const FiniteMdp> tabular_mdp;
  PolicyVector tabular_policy;

  static PolicyHandle no_attack() { return {}; }
  static PolicyHandle random() { return of_kind(Kind::kRandom); }
  static PolicyHandle dos(int segment, double fraction);
  static PolicyHandle myopic() { return of_kind(Kind::kMyopic); }
  static PolicyHandle api_greedy(WeightVector weights);
  // Untrained marker; sweep_costs trains it per cost point.
  static PolicyHandle api_untrained() { return of_kind(Kind::kApiGreedy); }
  static PolicyHandle tabular(std::shared_ptr<const FiniteMdp> mdp,
                              PolicyVector policy);
  static PolicyHandle of_kind(Kind kind) {
    PolicyHandle h;
    h.kind = kind;
    return h;
  }

  // Stable identifier used in CSV output, e.g. "dos_s1_f0.50" or "api".
  std::string name() const;
};

// Instantiates the handle for a scenario. Throws std::invalid_argument for
// a DoS fraction or segment outside the scenario's action set, an untrained
// kApiGreedy handle, or a malformed tabular handle.
PolicyFn make_policy(const PolicyHandle& handle,
                     const ScenarioConfig& scenario);

struct EvaluationReport {
  std::string scenario;
  std::string policy;
  double mean_reward = 0.0;
  double standard_error = 0.0;  // over all trajectories pooled
  std::size_t states = 0;
  int trajectories_per_state = 0;
  int horizon = 0;
  std::uint64_t seed = 0;
};

// Scores a policy by discounted return over the given start states, using
// the shared seed chain of rollout_returns_over_states: reports produced
// with the same seed and starts are trajectory-for-trajectory comparable.
EvaluationReport evaluate_policy(const PolicyFn& policy,
                                 std::string policy_name,
                                 const ScenarioConfig& scenario,
                                 std::span<const SystemState> start_states,
                                 int horizon, int trajectories_per_state,
                                 std::uint64_t seed);

struct HistogramRow {
  AttackAction action;
  double frequency = 0.0;
};

// Frequency of each action (in enumeration order) over every step of the
// same trajectories evaluate_policy would run; frequencies sum to one.
std::vector<HistogramRow> action_histogram(
    const PolicyFn& policy, const ScenarioConfig& scenario,
    std::span<const SystemState> start_states, int horizon,
    int trajectories_per_state, std::uint64_t seed);

struct SweepOptions {
  int api_iterations = 100;
  int horizon = 100;
  int trajectories_per_state = 50;
  std::size_t held_out_count = 32;
};

struct SweepRow {
  double cost = 0.0;
  std::string policy;
  double mean_reward = 0.0;
  double standard_error = 0.0;
};

// The standard comparison set: no_attack, random, myopic, one DoS per
// (segment, fraction) pair in action order, then a trained candidate.
std::vector<PolicyHandle> default_policy_set(const ScenarioConfig& scenario);

// Evaluates every policy at every cost coefficient, in the given order.
// Untrained kApiGreedy handles are trained per cost point with the run's
// seed. Held-out start states depend only on the seed, so rows are
// comparable across costs and policies.
std::vector<SweepRow> sweep_costs(const ScenarioConfig& base_scenario,
                                  std::span<const double> costs,
                                  std::span<const PolicyHandle> policies,
                                  const SweepOptions& options,
                                  std::uint64_t seed);

}  // namespace jamflow
