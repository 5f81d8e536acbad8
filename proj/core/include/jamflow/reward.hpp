#pragma once

#include <span>

#include "jamflow/action.hpp"
#include "jamflow/traffic_model.hpp"

namespace jamflow {

// What the adversary counts as damage, measured on the successor state.
//   kAbsImbalance:      |q(1) - q(2)|                      (two segments)
//   kWeightedImbalance: |q(1)/beta(1) - q(2)/beta(2)|      (two segments)
//   kAdmissionGap:      sum_i |alpha_advertised(i) - alpha_true(i)|, where
//                       alpha_true is the split the controller would publish
//                       if it saw the true queues (any segment count)
enum class DamageKind {
  kAbsImbalance,
  kWeightedImbalance,
  kAdmissionGap,
};

struct RewardSpec {
  DamageKind damage_kind = DamageKind::kAbsImbalance;
  double cost_coefficient = 1.0;  // >= 0; price per jammed vehicle
};

// Damage scored on the successor state. Throws std::invalid_argument when
// the kind requires exactly two segments and the state has more.
double damage(const SystemState& next_state, const RewardSpec& spec,
              std::span<const SegmentSpec> segments,
              AdmissionRule rule = AdmissionRule::kInverseLoad);

// Cost of mounting the attack, charged on the pre-transition queues:
// cost_coefficient * fraction * queue(target). NoAttack costs nothing.
double attack_cost(const SystemState& state, const AttackAction& action,
                   const RewardSpec& spec);

// Stage reward damage(next) - attack_cost(state, action). The cost term is
// charged unconditionally here; callers that charge it only on successful
// jams subtract it themselves (see expected_one_step).
double stage_reward(const SystemState& state, const AttackAction& action,
                    const SystemState& next_state, const RewardSpec& spec,
                    std::span<const SegmentSpec> segments,
                    AdmissionRule rule = AdmissionRule::kInverseLoad);

}  // namespace jamflow
