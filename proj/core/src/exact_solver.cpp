#include "jamflow/exact_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace jamflow {

namespace {

constexpr std::size_t kMaxSweeps = 100'000'000;
constexpr std::size_t kMaxPolicyIterations = 10'000;

void check_policy(const FiniteMdp& mdp, const PolicyVector& policy) {
  if (policy.size() != mdp.state_count())
    throw std::invalid_argument("policy size does not match state count");
  for (std::int32_t a : policy)
    if (a < 0 || static_cast<std::size_t>(a) >= mdp.actions.size())
      throw std::invalid_argument("policy action index out of range");
}

// One Jacobi sweep J_out = r_mu + discount * P_mu J_in; returns the sup-norm
// change. With contraction factor `discount`, iterating until
// discount * change <= tol bounds the Bellman residual of J_out by tol.
double sweep(const FiniteMdp& mdp, const PolicyVector& policy,
             const std::vector<double>& in, std::vector<double>& out) {
  double max_change = 0.0;
  for (std::size_t s = 0; s < in.size(); ++s) {
    double v = 0.0;
    for (const auto& entry : mdp.row(s, static_cast<std::size_t>(policy[s])))
      v += entry.probability *
           (entry.reward + mdp.discount * in[entry.successor]);
    max_change = std::max(max_change, std::abs(v - in[s]));
    out[s] = v;
  }
  return max_change;
}

std::vector<double> evaluate_direct(const FiniteMdp& mdp,
                                    const PolicyVector& policy) {
  const auto n = static_cast<Eigen::Index>(mdp.state_count());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (const auto& entry :
         mdp.row(static_cast<std::size_t>(s),
                 static_cast<std::size_t>(policy[s]))) {
      a(s, entry.successor) -= mdp.discount * entry.probability;
      b(s) += entry.probability * entry.reward;
    }
  }
  const Eigen::VectorXd j = a.partialPivLu().solve(b);
  return {j.data(), j.data() + n};
}

std::vector<double> evaluate_sweeps(const FiniteMdp& mdp,
                                    const PolicyVector& policy,
                                    double residual_tolerance) {
  std::vector<double> j(mdp.state_count(), 0.0);
  std::vector<double> j_next(mdp.state_count(), 0.0);
  const double gamma = mdp.discount;
  for (std::size_t k = 0; k < kMaxSweeps; ++k) {
    const double change = sweep(mdp, policy, j, j_next);
    j.swap(j_next);
    if (gamma * change <= residual_tolerance || change == 0.0) return j;
  }
  throw std::runtime_error("policy evaluation sweeps did not converge");
}

}  // namespace

double bellman_backup(const FiniteMdp& mdp, std::size_t state,
                      std::size_t action, std::span<const double> values) {
  double v = 0.0;
  for (const auto& entry : mdp.row(state, action))
    v += entry.probability *
         (entry.reward + mdp.discount * values[entry.successor]);
  return v;
}

double policy_evaluation_residual(const FiniteMdp& mdp,
                                  const PolicyVector& policy,
                                  std::span<const double> values) {
  check_policy(mdp, policy);
  double residual = 0.0;
  for (std::size_t s = 0; s < values.size(); ++s)
    residual = std::max(
        residual,
        std::abs(values[s] - bellman_backup(mdp, s,
                                            static_cast<std::size_t>(policy[s]),
                                            values)));
  return residual;
}

std::vector<double> policy_evaluation_exact(const FiniteMdp& mdp,
                                            const PolicyVector& policy,
                                            double residual_tolerance,
                                            LinearSolve method) {
  check_policy(mdp, policy);
  if (!(residual_tolerance > 0.0))
    throw std::invalid_argument("residual tolerance must be positive");

  const bool direct =
      method == LinearSolve::kDirect ||
      (method == LinearSolve::kAuto &&
       mdp.state_count() < kDirectSolveStateLimit);
  std::vector<double> j = direct
                              ? evaluate_direct(mdp, policy)
                              : evaluate_sweeps(mdp, policy,
                                                residual_tolerance);

  // The direct solve is exact up to rounding; verify and polish with sweeps
  // in the unlikely case conditioning pushed the residual over tolerance.
  if (policy_evaluation_residual(mdp, policy, j) > residual_tolerance) {
    std::vector<double> j_next(j.size());
    for (std::size_t k = 0; k < kMaxSweeps; ++k) {
      const double change = sweep(mdp, policy, j, j_next);
      j.swap(j_next);
      if (mdp.discount * change <= residual_tolerance || change == 0.0) break;
    }
    if (policy_evaluation_residual(mdp, policy, j) > residual_tolerance)
      throw std::runtime_error("policy evaluation residual above tolerance");
  }
  return j;
}

PolicyVector policy_improvement(const FiniteMdp& mdp,
                                std::span<const double> values) {
  if (values.size() != mdp.state_count())
    throw std::invalid_argument("value vector size does not match states");
  PolicyVector policy(mdp.state_count(), 0);
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    std::size_t best = 0;
    double best_value = bellman_backup(mdp, s, 0, values);
    for (std::size_t a = 1; a < mdp.actions.size(); ++a) {
      const double v = bellman_backup(mdp, s, a, values);
      if (v > best_value) {
        best_value = v;
        best = a;
      }
    }
    policy[s] = static_cast<std::int32_t>(best);
  }
  return policy;
}

PolicyIterationResult policy_iteration(const FiniteMdp& mdp,
                                       const PolicyVector& initial_policy) {
  check_policy(mdp, initial_policy);
  PolicyIterationResult result;
  result.policy = initial_policy;
  for (std::size_t round = 1; round <= kMaxPolicyIterations; ++round) {
    result.values = policy_evaluation_exact(mdp, result.policy);
    result.evaluation_history.push_back(result.values);
    PolicyVector improved = policy_improvement(mdp, result.values);
    result.iterations = round;
    if (improved == result.policy) return result;
    result.policy = std::move(improved);
  }
  throw std::runtime_error("policy iteration did not converge");
}

std::vector<double> value_iteration(const FiniteMdp& mdp, double tolerance) {
  if (!(tolerance > 0.0))
    throw std::invalid_argument("value iteration tolerance must be positive");
  const double gamma = mdp.discount;
  std::vector<double> j(mdp.state_count(), 0.0);
  std::vector<double> j_next(mdp.state_count(), 0.0);
  // Standard stopping rule: a sup-norm change this small certifies the
  // greedy policy of the result is within `tolerance` of optimal.
  const double threshold =
      gamma > 0.0 ? tolerance * (1.0 - gamma) / (2.0 * gamma) : 0.0;
  for (std::size_t k = 0; k < kMaxSweeps; ++k) {
    double change = 0.0;
    for (std::size_t s = 0; s < j.size(); ++s) {
      double best = bellman_backup(mdp, s, 0, j);
      for (std::size_t a = 1; a < mdp.actions.size(); ++a)
        best = std::max(best, bellman_backup(mdp, s, a, j));
      change = std::max(change, std::abs(best - j[s]));
      j_next[s] = best;
    }
    j.swap(j_next);
    if (gamma == 0.0) return j;  // one sweep is exact
    if (change <= threshold) return j;
  }
  throw std::runtime_error("value iteration did not converge");
}

}  // namespace jamflow
