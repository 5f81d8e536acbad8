#include "jamflow/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace jamflow {

double damage(const SystemState& next_state, const RewardSpec& spec,
              std::span<const SegmentSpec> segments, AdmissionRule rule) {
  switch (spec.damage_kind) {
    case DamageKind::kAbsImbalance:
      if (next_state.queues.size() != 2)
        throw std::invalid_argument(
            "damage: abs_imbalance requires exactly 2 segments");
      return std::abs(next_state.queues[0] - next_state.queues[1]);
    case DamageKind::kWeightedImbalance:
      if (next_state.queues.size() != 2)
        throw std::invalid_argument(
            "damage: weighted_imbalance requires exactly 2 segments");
      return std::abs(next_state.queues[0] / segments[0].service_rate -
                      next_state.queues[1] / segments[1].service_rate);
    case DamageKind::kAdmissionGap: {
      // Gap between the advertised split and the split the controller would
      // publish on truthful estimates of the same queues.
      if (next_state.admission.size() != next_state.queues.size())
        throw std::invalid_argument("damage: malformed state");
      Observation truthful{next_state.queues};
      const std::vector<double> alpha_true =
          admission_ratios(truthful, segments, rule);
      double gap = 0.0;
      for (std::size_t i = 0; i < alpha_true.size(); ++i)
        gap += std::abs(next_state.admission[i] - alpha_true[i]);
      return gap;
    }
  }
  throw std::invalid_argument("damage: unknown kind");
}

double attack_cost(const SystemState& state, const AttackAction& action,
                   const RewardSpec& spec) {
  if (!action.jams()) return 0.0;
  const auto seg = static_cast<std::size_t>(action.segment);
  if (seg >= state.queues.size())
    throw std::invalid_argument("attack_cost: jam target out of range");
  return spec.cost_coefficient * action.fraction * state.queues[seg];
}

double stage_reward(const SystemState& state, const AttackAction& action,
                    const SystemState& next_state, const RewardSpec& spec,
                    std::span<const SegmentSpec> segments, AdmissionRule rule) {
  return damage(next_state, spec, segments, rule) -
         attack_cost(state, action, spec);
}

}  // namespace jamflow
