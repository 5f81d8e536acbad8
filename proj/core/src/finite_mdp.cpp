#include "jamflow/finite_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "jamflow/attack_mdp.hpp"
#include "jamflow/reward.hpp"

namespace jamflow {

namespace {

constexpr double kAxisTolerance = 1e-9;
constexpr double kSnapTieEps = 1e-9;
constexpr double kRowSumTolerance = 1e-12;

std::size_t axis_points(double axis_max, double step) {
  return static_cast<std::size_t>(std::llround(axis_max / step)) + 1;
}

std::size_t snap_axis(double value, double step, std::size_t points) {
  // Nearest multiple of `step`; exact midpoints (and values within
  // kSnapTieEps above them) round toward the lower index.
  const double x = value / step - 0.5 - kSnapTieEps;
  long long idx = static_cast<long long>(std::ceil(x));
  if (idx < 0) idx = 0;
  const auto top = static_cast<long long>(points) - 1;
  if (idx > top) idx = top;
  return static_cast<std::size_t>(idx);
}

}  // namespace

std::size_t DiscretizationGrid::queue_points() const {
  return axis_points(queue_max, queue_step);
}

std::size_t DiscretizationGrid::admission_points() const {
  return axis_points(1.0, admission_step);
}

std::size_t DiscretizationGrid::snap_queue(double q) const {
  return snap_axis(q, queue_step, queue_points());
}

std::size_t DiscretizationGrid::snap_admission(double a) const {
  return snap_axis(a, admission_step, admission_points());
}

void validate_grid(const DiscretizationGrid& grid) {
  if (!(grid.queue_step > 0.0))
    throw std::invalid_argument("grid: queue_step must be positive");
  if (!(grid.queue_max > 0.0))
    throw std::invalid_argument("grid: queue_max must be positive");
  if (!(grid.admission_step > 0.0 && grid.admission_step <= 1.0))
    throw std::invalid_argument("grid: admission_step must lie in (0, 1]");
  const double queue_ratio = grid.queue_max / grid.queue_step;
  if (std::abs(queue_ratio - std::llround(queue_ratio)) > kAxisTolerance)
    throw std::invalid_argument("grid: queue_step must divide queue_max");
  const double admission_ratio = 1.0 / grid.admission_step;
  if (std::abs(admission_ratio - std::llround(admission_ratio)) >
      kAxisTolerance)
    throw std::invalid_argument("grid: admission_step must divide 1");
}

std::size_t FiniteMdp::state_index(std::size_t q1_index, std::size_t q2_index,
                                   std::size_t admission_index) const {
  return (q1_index * grid.queue_points() + q2_index) *
             grid.admission_points() +
         admission_index;
}

std::size_t FiniteMdp::snap_state(const SystemState& state) const {
  if (state.queues.size() != 2 || state.admission.size() != 2)
    throw std::invalid_argument("snap_state: expected a two-segment state");
  return state_index(grid.snap_queue(state.queues[0]),
                     grid.snap_queue(state.queues[1]),
                     grid.snap_admission(state.admission[0]));
}

FiniteMdp build_finite_mdp(const ScenarioConfig& scenario,
                           const DiscretizationGrid& grid,
                           const FiniteMdpLimits& limits) {
  validate_grid(grid);
  if (scenario.segments.size() != 2)
    throw std::invalid_argument(
        "build_finite_mdp: grid solver covers two-segment scenarios only");

  FiniteMdp mdp;
  mdp.grid = grid;
  mdp.segment_count = 2;
  mdp.discount = scenario.discount;
  mdp.actions = enumerate_actions(scenario);

  const std::size_t qp = grid.queue_points();
  const std::size_t ap = grid.admission_points();
  const std::size_t n_states = qp * qp * ap;
  if (n_states * mdp.actions.size() > limits.max_state_action_pairs)
    throw std::invalid_argument(
        "build_finite_mdp: state-action pairs exceed limit (" +
        std::to_string(n_states * mdp.actions.size()) + " > " +
        std::to_string(limits.max_state_action_pairs) + ")");

  mdp.states.reserve(n_states);
  for (std::size_t i = 0; i < qp; ++i)
    for (std::size_t j = 0; j < qp; ++j)
      for (std::size_t k = 0; k < ap; ++k)
        mdp.states.push_back(SystemState{
            {grid.queue_value(i), grid.queue_value(j)},
            {grid.admission_value(k), 1.0 - grid.admission_value(k)}});

  mdp.rows.resize(n_states * mdp.actions.size());

  struct Branch {
    bool success;
    double weight;
  };

  SystemState next;
  Observation scratch;
  std::vector<TransitionEntry> accum;
  for (std::size_t s = 0; s < n_states; ++s) {
    const SystemState& state = mdp.states[s];
    for (std::size_t a = 0; a < mdp.actions.size(); ++a) {
      const AttackAction& action = mdp.actions[a];

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

      accum.clear();
      for (const auto& outcome : scenario.arrivals.support()) {
        if (outcome.probability == 0.0) continue;
        for (int b = 0; b < branch_count; ++b) {
          const Branch& br = branches[b];
          transition_into(state, action, outcome.count, br.success,
                          scenario.segments, scenario.admission_rule, next,
                          scratch);
          const auto succ =
              static_cast<std::int32_t>(mdp.snap_state(next));
          // Reward on the snapped successor keeps the finite model's
          // rewards consistent with its own dynamics.
          double g = damage(mdp.states[static_cast<std::size_t>(succ)],
                            scenario.reward, scenario.segments,
                            scenario.admission_rule);
          if (action.jams() &&
              (br.success || scenario.charge_cost_on_failure))
            g -= cost;
          const double p = outcome.probability * br.weight;
          auto it = std::find_if(
              accum.begin(), accum.end(),
              [succ](const TransitionEntry& e) { return e.successor == succ; });
          if (it == accum.end()) {
            accum.push_back({succ, p, p * g});
          } else {
            it->probability += p;
            it->reward += p * g;
          }
        }
      }

      double total = 0.0;
      for (auto& entry : accum) {
        entry.reward /= entry.probability;
        total += entry.probability;
      }
      if (std::abs(total - 1.0) > kRowSumTolerance)
        throw std::logic_error("build_finite_mdp: row probabilities sum to " +
                               std::to_string(total));
      std::sort(accum.begin(), accum.end(),
                [](const TransitionEntry& x, const TransitionEntry& y) {
                  return x.successor < y.successor;
                });
      mdp.rows[s * mdp.actions.size() + a] = accum;
    }
  }
  return mdp;
}

void dump_finite_mdp(const FiniteMdp& mdp, std::ostream& out) {
  out << "states " << mdp.state_count() << " actions " << mdp.actions.size()
      << " discount " << mdp.discount << '\n';
  char buf[160];
  for (std::size_t s = 0; s < mdp.state_count(); ++s) {
    for (std::size_t a = 0; a < mdp.actions.size(); ++a) {
      for (const auto& entry : mdp.row(s, a)) {
        std::snprintf(buf, sizeof(buf), "%zu %zu %d %.17g %.17g\n", s, a,
                      entry.successor, entry.probability, entry.reward);
        out << buf;
      }
    }
  }
}

}  // namespace jamflow
