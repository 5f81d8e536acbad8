#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "jamflow/exact_solver.hpp"
#include "jamflow/finite_mdp.hpp"
#include "jamflow/rng.hpp"
#include "support/random_mdp.hpp"

using namespace jamflow;
using jamflow::testing::random_finite_mdp;

namespace {

// Minimal hand-built MDP helper: rows[s][a] = {(succ, prob, reward), ...}.
FiniteMdp make_mdp(
    double discount,
    const std::vector<std::vector<std::vector<TransitionEntry>>>& rows) {
  FiniteMdp mdp;
  mdp.discount = discount;
  mdp.actions.assign(rows[0].size(), AttackAction::no_attack());
  for (const auto& per_state : rows)
    for (const auto& row : per_state) mdp.rows.push_back(row);
  return mdp;
}

// Brute-force optimum: enumerate every deterministic policy and evaluate.
std::vector<double> brute_force_optimal(const FiniteMdp& mdp) {
  const std::size_t n = mdp.state_count();
  const std::size_t na = mdp.actions.size();
  std::vector<double> best(n, -1e300);
  PolicyVector policy(n, 0);
  const std::size_t total = [&] {
    std::size_t t = 1;
    for (std::size_t s = 0; s < n; ++s) t *= na;
    return t;
  }();
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t s = 0; s < n; ++s) {
      policy[s] = static_cast<std::int32_t>(c % na);
      c /= na;
    }
    const std::vector<double> j = policy_evaluation_exact(mdp, policy);
    for (std::size_t s = 0; s < n; ++s) best[s] = std::max(best[s], j[s]);
  }
  return best;
}

}  // namespace

TEST_SUITE("exact_solver") {

TEST_CASE("self-loop evaluates to the geometric series") {
  const FiniteMdp mdp = make_mdp(0.99, {{{{0, 1.0, 1.0}}}});
  const auto j = policy_evaluation_exact(mdp, {0});
  CHECK(j[0] == doctest::Approx(100.0).epsilon(1e-10));
}

TEST_CASE("absorbing chain evaluates hop rewards exactly") {
  // state 0 -> state 1 with reward 1; state 1 loops with reward 0.
  const FiniteMdp mdp =
      make_mdp(0.5, {{{{1, 1.0, 1.0}}}, {{{1, 1.0, 0.0}}}});
  const auto j = policy_evaluation_exact(mdp, {0, 0});
  CHECK(j[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("direct solve and sweeps agree to tight residuals") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const FiniteMdp mdp = random_finite_mdp(seed);
    PolicyVector policy(mdp.state_count(), 0);
    const auto direct = policy_evaluation_exact(
        mdp, policy, kEvaluationResidualTolerance, LinearSolve::kDirect);
    const auto sweeps = policy_evaluation_exact(
        mdp, policy, kEvaluationResidualTolerance, LinearSolve::kSweeps);
    CHECK(policy_evaluation_residual(mdp, policy, direct) <= 1e-10);
    CHECK(policy_evaluation_residual(mdp, policy, sweeps) <= 1e-10);
    for (std::size_t s = 0; s < direct.size(); ++s)
      CHECK(direct[s] == doctest::Approx(sweeps[s]).epsilon(1e-8));
  }
}

TEST_CASE("evaluation matches a Monte-Carlo estimate") {
  const FiniteMdp mdp = random_finite_mdp(99, 0.9);
  PolicyVector policy(mdp.state_count(), 1 % mdp.actions.size());
  const auto j = policy_evaluation_exact(mdp, policy);

  // Independent oracle: simulate the chain by inverse-CDF sampling. The
  // horizon tail gamma^120 / (1 - gamma) is ~3e-5, far below sampling noise.
  Rng rng(7);
  const int trajectories = 20000;
  const int horizon = 120;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int t = 0; t < trajectories; ++t) {
    std::size_t s = 0;
    double total = 0.0;
    double disc = 1.0;
    for (int k = 0; k < horizon; ++k) {
      const auto& row = mdp.row(s, static_cast<std::size_t>(policy[s]));
      const double u = rng.uniform01();
      double cum = 0.0;
      const TransitionEntry* chosen = &row.back();
      for (const auto& entry : row) {
        cum += entry.probability;
        if (u < cum) {
          chosen = &entry;
          break;
        }
      }
      total += disc * chosen->reward;
      disc *= mdp.discount;
      s = static_cast<std::size_t>(chosen->successor);
    }
    sum += total;
    sumsq += total * total;
  }
  const double mean = sum / trajectories;
  const double se = std::sqrt((sumsq / trajectories - mean * mean) /
                              (trajectories - 1));
  CHECK(std::abs(mean - j[0]) <= 4.0 * se + 1e-4);
}

TEST_CASE("improvement prefers the earlier action on exact ties") {
  // Two identical actions everywhere: the argmax must stay at index 0.
  const FiniteMdp mdp = make_mdp(
      0.9, {{{{0, 0.5, 1.0}, {1, 0.5, 0.0}}, {{0, 0.5, 1.0}, {1, 0.5, 0.0}}},
            {{{1, 1.0, 0.5}}, {{1, 1.0, 0.5}}}});
  const std::vector<double> values = {1.0, 2.0};
  const PolicyVector improved = policy_improvement(mdp, values);
  CHECK(improved[0] == 0);
  CHECK(improved[1] == 0);
}

TEST_CASE("policy iteration finds the brute-force optimum") {
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL, 14ULL}) {
    FiniteMdp mdp = random_finite_mdp(seed, 0.9);
    // Shrink to 5 states x up-to-3 actions so enumeration stays small.
    const std::size_t na = mdp.actions.size();
    std::vector<std::vector<TransitionEntry>> rows;
    for (std::size_t s = 0; s < 5; ++s)
      for (std::size_t a = 0; a < na; ++a) {
        auto row = mdp.row(s, a);
        for (auto& entry : row) entry.successor %= 5;
        // Re-merge after the modulus so probabilities stay a distribution.
        std::vector<TransitionEntry> merged;
        for (const auto& entry : row) {
          bool found = false;
          for (auto& m : merged)
            if (m.successor == entry.successor) {
              const double p = m.probability + entry.probability;
              m.reward = (m.reward * m.probability +
                          entry.reward * entry.probability) / p;
              m.probability = p;
              found = true;
            }
          if (!found) merged.push_back(entry);
        }
        rows.push_back(merged);
      }
    mdp.rows = rows;

    const std::vector<double> best = brute_force_optimal(mdp);
    const PolicyIterationResult pi =
        policy_iteration(mdp, PolicyVector(5, 0));
    for (std::size_t s = 0; s < 5; ++s)
      CHECK(pi.values[s] == doctest::Approx(best[s]).epsilon(1e-8));
  }
}

TEST_CASE("policy iteration values never regress between rounds") {
  const FiniteMdp mdp = random_finite_mdp(31);
  const PolicyIterationResult pi =
      policy_iteration(mdp, PolicyVector(mdp.state_count(), 0));
  REQUIRE(pi.evaluation_history.size() == pi.iterations);
  for (std::size_t k = 1; k < pi.evaluation_history.size(); ++k)
    for (std::size_t s = 0; s < mdp.state_count(); ++s)
      CHECK(pi.evaluation_history[k][s] >=
            pi.evaluation_history[k - 1][s] - 1e-9);
}

TEST_CASE("restarting at the optimum stops after one round") {
  const FiniteMdp mdp = random_finite_mdp(47);
  const PolicyIterationResult first =
      policy_iteration(mdp, PolicyVector(mdp.state_count(), 0));
  const PolicyIterationResult second = policy_iteration(mdp, first.policy);
  CHECK(second.iterations == 1);
  CHECK(second.policy == first.policy);
}

TEST_CASE("value iteration meets policy iteration") {
  const FiniteMdp mdp = random_finite_mdp(53);
  const PolicyIterationResult pi =
      policy_iteration(mdp, PolicyVector(mdp.state_count(), 0));
  const std::vector<double> vi = value_iteration(mdp, 1e-9);
  for (std::size_t s = 0; s < mdp.state_count(); ++s)
    CHECK(vi[s] == doctest::Approx(pi.values[s]).epsilon(1e-8));
}

TEST_CASE("value iteration matches brute force on a tiny problem") {
  const FiniteMdp mdp = make_mdp(
      0.8, {{{{1, 1.0, 0.0}}, {{2, 1.0, 0.3}}},
            {{{2, 1.0, 1.0}}, {{0, 1.0, 0.1}}},
            {{{2, 1.0, 0.0}}, {{0, 1.0, 0.2}}}});
  const std::vector<double> best = brute_force_optimal(mdp);
  const std::vector<double> vi = value_iteration(mdp, 1e-10);
  for (std::size_t s = 0; s < 3; ++s)
    CHECK(vi[s] == doctest::Approx(best[s]).epsilon(1e-8));
}

TEST_CASE("zero discount reduces to the best immediate reward") {
  FiniteMdp mdp = random_finite_mdp(61);
  mdp.discount = 0.0;
  const std::vector<double> vi = value_iteration(mdp, 1e-10);
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    double best = -1e300;
    for (std::size_t a = 0; a < mdp.actions.size(); ++a) {
      double r = 0.0;
      for (const auto& entry : mdp.row(s, a))
        r += entry.probability * entry.reward;
      best = std::max(best, r);
    }
    CHECK(vi[s] == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("the Bellman operator contracts by the discount factor") {
  const FiniteMdp mdp = random_finite_mdp(71);
  Rng rng(5);
  auto apply = [&](const std::vector<double>& j) {
    std::vector<double> out(j.size());
    for (std::size_t s = 0; s < j.size(); ++s) {
      double best = -1e300;
      for (std::size_t a = 0; a < mdp.actions.size(); ++a)
        best = std::max(best, bellman_backup(mdp, s, a, j));
      out[s] = best;
    }
    return out;
  };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> j1(mdp.state_count());
    std::vector<double> j2(mdp.state_count());
    double diff = 0.0;
    for (std::size_t s = 0; s < j1.size(); ++s) {
      j1[s] = rng.uniform(-50.0, 50.0);
      j2[s] = rng.uniform(-50.0, 50.0);
      diff = std::max(diff, std::abs(j1[s] - j2[s]));
    }
    const auto t1 = apply(j1);
    const auto t2 = apply(j2);
    double tdiff = 0.0;
    for (std::size_t s = 0; s < t1.size(); ++s)
      tdiff = std::max(tdiff, std::abs(t1[s] - t2[s]));
    CHECK(tdiff <= mdp.discount * diff + 1e-12);
  }
}

TEST_CASE("no policy beats the optimal values") {
  const FiniteMdp mdp = random_finite_mdp(83);
  const PolicyIterationResult pi =
      policy_iteration(mdp, PolicyVector(mdp.state_count(), 0));
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    PolicyVector policy(mdp.state_count());
    for (auto& a : policy)
      a = static_cast<std::int32_t>(rng.uniform_index(mdp.actions.size()));
    const auto j = policy_evaluation_exact(mdp, policy);
    for (std::size_t s = 0; s < j.size(); ++s)
      CHECK(j[s] <= pi.values[s] + 1e-9);
  }
}

TEST_CASE("argument validation") {
  const FiniteMdp mdp = random_finite_mdp(91);
  CHECK_THROWS_AS(policy_evaluation_exact(mdp, PolicyVector{}),
                  std::invalid_argument);
  PolicyVector bad(mdp.state_count(), 99);
  CHECK_THROWS_AS(policy_evaluation_exact(mdp, bad), std::invalid_argument);
  CHECK_THROWS_AS(value_iteration(mdp, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(value_iteration(mdp, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(
      policy_improvement(mdp, std::vector<double>(3, 0.0)),
      std::invalid_argument);
}

}  // TEST_SUITE
