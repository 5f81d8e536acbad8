#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jamflow/finite_mdp.hpp"

namespace jamflow {

// Action index per state.
using PolicyVector = std::vector<std::int32_t>;

// How policy evaluation solves the linear system. kAuto uses a dense direct
// solve below kDirectSolveStateLimit states and damped sweeps above it.
enum class LinearSolve {
  kAuto,
  kDirect,
  kSweeps,
};

inline constexpr std::size_t kDirectSolveStateLimit = 2000;
inline constexpr double kEvaluationResidualTolerance = 1e-10;

// Expected one-step value of taking `action` in `state` under `values`.
double bellman_backup(const FiniteMdp& mdp, std::size_t state,
                      std::size_t action, std::span<const double> values);

// Sup-norm Bellman residual ||J - T_mu J|| of `values` for the policy.
double policy_evaluation_residual(const FiniteMdp& mdp,
                                  const PolicyVector& policy,
                                  std::span<const double> values);

// Solves J = r_mu + discount * P_mu J to the given sup-norm residual.
std::vector<double> policy_evaluation_exact(
    const FiniteMdp& mdp, const PolicyVector& policy,
    double residual_tolerance = kEvaluationResidualTolerance,
    LinearSolve method = LinearSolve::kAuto);

// Greedy policy for `values`; the argmax scans actions in order and only a
// strictly better value displaces the incumbent, so ties resolve to the
// earliest action (NoAttack when tied with everything).
PolicyVector policy_improvement(const FiniteMdp& mdp,
                                std::span<const double> values);

struct PolicyIterationResult {
  PolicyVector policy;
  std::vector<double> values;
  // Number of improvement rounds performed, including the final one that
  // left the policy unchanged: starting at an optimal policy gives 1.
  std::size_t iterations = 0;
  // Value vector of each evaluated policy, in order; successive entries are
  // pointwise non-decreasing up to evaluation tolerance.
  std::vector<std::vector<double>> evaluation_history;
};

// Exact policy iteration from the given initial policy. Terminates because
// each round either strictly improves the (finite) policy or stops.
PolicyIterationResult policy_iteration(const FiniteMdp& mdp,
                                       const PolicyVector& initial_policy);

// Value iteration from zero to a value vector whose greedy policy's value
// is within `tolerance` of optimal: sweeps stop once the sup-norm change
// drops to tolerance * (1 - discount) / (2 * discount).
std::vector<double> value_iteration(const FiniteMdp& mdp, double tolerance);

}  // namespace jamflow
