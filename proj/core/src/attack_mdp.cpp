#include "jamflow/attack_mdp.hpp"

namespace jamflow {

std::vector<AttackAction> enumerate_actions(const ScenarioConfig& scenario) {
  std::vector<AttackAction> actions;
  actions.reserve(1 +
                  scenario.segments.size() * scenario.jam_fractions.size());
  actions.push_back(AttackAction::no_attack());
  for (std::size_t seg = 0; seg < scenario.segments.size(); ++seg)
    for (double fraction : scenario.jam_fractions)
      actions.push_back(AttackAction::jam(static_cast<int>(seg), fraction));
  return actions;
}

}  // namespace jamflow
