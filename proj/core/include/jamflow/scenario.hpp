#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jamflow/reward.hpp"
#include "jamflow/traffic_model.hpp"

namespace jamflow {

// Raised for malformed scenario files or configs; the message names the
// offending field.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complete description of one experiment setup: the network, the arrival
// process, the adversary's action space and reward, and the defaults that
// make runs reproducible.
struct ScenarioConfig {
  std::string name;
  std::vector<SegmentSpec> segments;          // >= 2 entries
  ArrivalDistribution arrivals{{{0, 1.0}}};
  std::vector<double> jam_fractions;          // strictly increasing, in (0,1)
  double success_probability = 1.0;           // chance a jam lands
  RewardSpec reward;
  double discount = 0.99;                     // in (0,1)
  bool charge_cost_on_failure = true;         // pay for failed jams too
  AdmissionRule admission_rule = AdmissionRule::kInverseLoad;
  // Fixed start state; std::nullopt means callers pick their own starts
  // ("grid-default" in scenario files).
  std::optional<SystemState> initial_state;
  std::uint64_t seed = 0;

  std::size_t segment_count() const { return segments.size(); }
};

// Throws ScenarioError unless every field satisfies its contract. The
// one-argument form labels errors with the scenario name.
void validate_scenario(const ScenarioConfig& config);
void validate_scenario(const ScenarioConfig& config,
                       const std::string& origin);

// Parses the JSON text of a scenario file; `origin` labels error messages.
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& origin);

ScenarioConfig load_scenario(const std::string& path);

// Accepts either a path to a scenario file or the name of a bundled
// scenario. An existing file wins over a bundled name.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

std::span<const std::string_view> bundled_scenario_names();

// JSON text of a bundled scenario; throws ScenarioError for unknown names.
std::string_view bundled_scenario_text(std::string_view name);

std::string_view to_string(AdmissionRule rule);
std::string_view to_string(DamageKind kind);

}  // namespace jamflow
