#include "jamflow/scenario.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace jamflow {

namespace {

using nlohmann::json;

// Bundled reference setups. system1 is the symmetric two-segment diverge
// with a single half-strength jam; system2 widens the action set to three
// jam fractions per segment; system3 makes the capacities asymmetric.
constexpr std::string_view kSystem1 = R"json({
  "name": "system1",
  "segments": [
    { "service_rate": 5.0 },
    { "service_rate": 5.0 }
  ],
  "arrivals": [
    { "count": 3, "probability": 0.3 },
    { "count": 8, "probability": 0.6 },
    { "count": 30, "probability": 0.1 }
  ],
  "jam_fractions": [0.5],
  "success_probability": 1.0,
  "reward": { "damage_kind": "abs_imbalance", "cost_coefficient": 1.0 },
  "discount": 0.99,
  "charge_cost_on_failure": true,
  "admission_rule": "inverse_load",
  "initial_state": "grid-default",
  "seed": 1
}
)json";

constexpr std::string_view kSystem2 = R"json({
  "name": "system2",
  "segments": [
    { "service_rate": 5.0 },
    { "service_rate": 5.0 }
  ],
  "arrivals": [
    { "count": 3, "probability": 0.3 },
    { "count": 8, "probability": 0.6 },
    { "count": 30, "probability": 0.1 }
  ],
  "jam_fractions": [0.25, 0.5, 0.75],
  "success_probability": 1.0,
  "reward": { "damage_kind": "abs_imbalance", "cost_coefficient": 1.0 },
  "discount": 0.99,
  "charge_cost_on_failure": true,
  "admission_rule": "inverse_load",
  "initial_state": "grid-default",
  "seed": 2
}
)json";

constexpr std::string_view kSystem3 = R"json({
  "name": "system3",
  "segments": [
    { "service_rate": 4.0 },
    { "service_rate": 6.0 }
  ],
  "arrivals": [
    { "count": 3, "probability": 0.3 },
    { "count": 8, "probability": 0.6 },
    { "count": 30, "probability": 0.1 }
  ],
  "jam_fractions": [0.5],
  "success_probability": 1.0,
  "reward": { "damage_kind": "abs_imbalance", "cost_coefficient": 1.0 },
  "discount": 0.99,
  "charge_cost_on_failure": true,
  "admission_rule": "inverse_load",
  "initial_state": "grid-default",
  "seed": 3
}
)json";

constexpr std::array<std::string_view, 3> kBundledNames = {
    "system1", "system2", "system3"};

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ScenarioError(origin + ": " + what);
}

const json& require(const json& obj, const char* key,
                    const std::string& origin) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, std::string("missing field '") + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& field,
                 const std::string& origin) {
  if (!v.is_number()) fail(origin, "field '" + field + "' must be a number");
  return v.get<double>();
}

AdmissionRule parse_admission_rule(const std::string& text,
                                   const std::string& origin) {
  if (text == "inverse_load") return AdmissionRule::kInverseLoad;
  if (text == "inverse_count") return AdmissionRule::kInverseCount;
  if (text == "least_loaded") return AdmissionRule::kLeastLoaded;
  fail(origin, "unknown admission_rule '" + text + "'");
}

DamageKind parse_damage_kind(const std::string& text,
                             const std::string& origin) {
  if (text == "abs_imbalance") return DamageKind::kAbsImbalance;
  if (text == "weighted_imbalance") return DamageKind::kWeightedImbalance;
  if (text == "admission_gap") return DamageKind::kAdmissionGap;
  fail(origin, "unknown damage_kind '" + text + "'");
}

}  // namespace

std::string_view to_string(AdmissionRule rule) {
  switch (rule) {
    case AdmissionRule::kInverseLoad: return "inverse_load";
    case AdmissionRule::kInverseCount: return "inverse_count";
    case AdmissionRule::kLeastLoaded: return "least_loaded";
  }
  return "unknown";
}

std::string_view to_string(DamageKind kind) {
  switch (kind) {
    case DamageKind::kAbsImbalance: return "abs_imbalance";
    case DamageKind::kWeightedImbalance: return "weighted_imbalance";
    case DamageKind::kAdmissionGap: return "admission_gap";
  }
  return "unknown";
}

void validate_scenario(const ScenarioConfig& config) {
  validate_scenario(config,
                    config.name.empty() ? std::string("scenario")
                                        : config.name);
}

void validate_scenario(const ScenarioConfig& config,
                       const std::string& origin) {
  if (config.name.empty()) fail(origin, "field 'name' must be non-empty");
  if (config.segments.size() < 2)
    fail(origin, "field 'segments' needs at least 2 entries");
  for (std::size_t i = 0; i < config.segments.size(); ++i)
    if (!(config.segments[i].service_rate > 0.0))
      fail(origin, "segments[" + std::to_string(i) +
                       "].service_rate must be positive");
  // ArrivalDistribution enforces its own invariants on construction.
  for (std::size_t i = 0; i < config.jam_fractions.size(); ++i) {
    const double f = config.jam_fractions[i];
    if (!(f > 0.0 && f < 1.0))
      fail(origin, "jam_fractions[" + std::to_string(i) +
                       "] must lie in (0, 1)");
    if (i > 0 && !(f > config.jam_fractions[i - 1]))
      fail(origin, "jam_fractions must be strictly increasing");
  }
  if (!(config.success_probability >= 0.0 &&
        config.success_probability <= 1.0))
    fail(origin, "success_probability must lie in [0, 1]");
  if (!(config.reward.cost_coefficient >= 0.0))
    fail(origin, "reward.cost_coefficient must be non-negative");
  if (!(config.discount > 0.0 && config.discount < 1.0))
    fail(origin, "discount must lie in (0, 1)");
  if (config.initial_state) {
    try {
      validate_state(*config.initial_state, config.segments.size());
    } catch (const std::invalid_argument& e) {
      fail(origin, std::string("initial_state: ") + e.what());
    }
  }
}

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(origin, "top level must be an object");

  ScenarioConfig config;
  const json& name = require(root, "name", origin);
  if (!name.is_string()) fail(origin, "field 'name' must be a string");
  config.name = name.get<std::string>();

  const json& segments = require(root, "segments", origin);
  if (!segments.is_array())
    fail(origin, "field 'segments' must be an array");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const json& seg = segments[i];
    if (!seg.is_object())
      fail(origin, "segments[" + std::to_string(i) + "] must be an object");
    config.segments.push_back(SegmentSpec{
        as_number(require(seg, "service_rate", origin),
                  "segments[" + std::to_string(i) + "].service_rate",
                  origin)});
  }

  const json& arrivals = require(root, "arrivals", origin);
  if (!arrivals.is_array())
    fail(origin, "field 'arrivals' must be an array");
  std::vector<ArrivalDistribution::Outcome> support;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const json& entry = arrivals[i];
    const std::string field = "arrivals[" + std::to_string(i) + "]";
    if (!entry.is_object()) fail(origin, field + " must be an object");
    const json& count = require(entry, "count", origin);
    if (!count.is_number_integer())
      fail(origin, field + ".count must be an integer");
    support.push_back(
        {count.get<int>(),
         as_number(require(entry, "probability", origin),
                   field + ".probability", origin)});
  }
  try {
    config.arrivals = ArrivalDistribution(std::move(support));
  } catch (const std::invalid_argument& e) {
    fail(origin, std::string("field 'arrivals': ") + e.what());
  }

  const json& fractions = require(root, "jam_fractions", origin);
  if (!fractions.is_array())
    fail(origin, "field 'jam_fractions' must be an array");
  for (std::size_t i = 0; i < fractions.size(); ++i)
    config.jam_fractions.push_back(as_number(
        fractions[i], "jam_fractions[" + std::to_string(i) + "]", origin));

  config.success_probability =
      as_number(require(root, "success_probability", origin),
                "success_probability", origin);

  const json& reward = require(root, "reward", origin);
  if (!reward.is_object()) fail(origin, "field 'reward' must be an object");
  const json& kind = require(reward, "damage_kind", origin);
  if (!kind.is_string())
    fail(origin, "reward.damage_kind must be a string");
  config.reward.damage_kind =
      parse_damage_kind(kind.get<std::string>(), origin);
  config.reward.cost_coefficient =
      as_number(require(reward, "cost_coefficient", origin),
                "reward.cost_coefficient", origin);

  config.discount =
      as_number(require(root, "discount", origin), "discount", origin);

  if (auto it = root.find("charge_cost_on_failure"); it != root.end()) {
    if (!it->is_boolean())
      fail(origin, "field 'charge_cost_on_failure' must be a boolean");
    config.charge_cost_on_failure = it->get<bool>();
  }

  if (auto it = root.find("admission_rule"); it != root.end()) {
    if (!it->is_string())
      fail(origin, "field 'admission_rule' must be a string");
    config.admission_rule =
        parse_admission_rule(it->get<std::string>(), origin);
  }

  if (auto it = root.find("initial_state"); it != root.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "grid-default")
        fail(origin, "initial_state string must be \"grid-default\"");
    } else if (it->is_object()) {
      SystemState state;
      const json& queues = require(*it, "queues", origin);
      const json& admission = require(*it, "admission", origin);
      if (!queues.is_array() || !admission.is_array())
        fail(origin, "initial_state.queues/admission must be arrays");
      for (std::size_t i = 0; i < queues.size(); ++i)
        state.queues.push_back(as_number(
            queues[i], "initial_state.queues[" + std::to_string(i) + "]",
            origin));
      for (std::size_t i = 0; i < admission.size(); ++i)
        state.admission.push_back(
            as_number(admission[i],
                      "initial_state.admission[" + std::to_string(i) + "]",
                      origin));
      config.initial_state = std::move(state);
    } else {
      fail(origin, "initial_state must be \"grid-default\" or an object");
    }
  }

  const json& seed = require(root, "seed", origin);
  if (!seed.is_number_integer() ||
      (seed.is_number_integer() && !seed.is_number_unsigned() &&
       seed.get<std::int64_t>() < 0))
    fail(origin, "field 'seed' must be a non-negative integer");
  config.seed = seed.get<std::uint64_t>();

  validate_scenario(config, origin);
  return config;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path);
}

ScenarioConfig resolve_scenario(const std::string& name_or_path) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(name_or_path, ec))
    return load_scenario(name_or_path);
  for (std::string_view name : kBundledNames)
    if (name == name_or_path)
      return parse_scenario(std::string(bundled_scenario_text(name)),
                            name_or_path);
  throw ScenarioError(name_or_path +
                      ": not a scenario file or bundled scenario name");
}

std::span<const std::string_view> bundled_scenario_names() {
  return kBundledNames;
}

std::string_view bundled_scenario_text(std::string_view name) {
  if (name == "system1") return kSystem1;
  if (name == "system2") return kSystem2;
  if (name == "system3") return kSystem3;
  throw ScenarioError(std::string(name) + ": unknown bundled scenario");
}

}  // namespace jamflow
