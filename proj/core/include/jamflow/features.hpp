#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jamflow/scenario.hpp"
#include "jamflow/traffic_model.hpp"

namespace jamflow {

inline constexpr int kFeatureCount = 9;

// Scales that keep features within a few units on workloads whose queues
// live in [0, ~100]: queue lengths divide by kQueueScale, the load-imbalance
// term by kImbalanceScale.
inline constexpr double kQueueScale = 100.0;
inline constexpr double kImbalanceScale = 20.0;

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](std::size_t i) const { return values[i]; }
};

struct WeightVector {
  std::vector<double> values;
};

// Feature map for two-segment scenarios. Entries:
//   0  constant 1
//   1  queue(1) / kQueueScale
//   2  queue(2) / kQueueScale
//   3  |q(1)/beta(1) - q(2)/beta(2)| / kImbalanceScale
//   4  1 if queue(1) <= queue(2)
//   5  advertised admission share of segment 1
//   6  |advertised share - truthful share| of segment 1
//   7  |advertised share - capacity share| of segment 1
//   8  1 if both queues are empty
// The truthful share is what the scenario's admission rule would publish on
// the true queues. Throws std::invalid_argument for other segment counts.
FeatureVector feature_vector(const SystemState& state,
                             const ScenarioConfig& scenario);

// Inner product; throws std::invalid_argument on length mismatch.
double approx_value(const WeightVector& weights,
                    const FeatureVector& features);

// Least-squares fit of targets to features. ridge > 0 adds Tikhonov
// regularization (normal equations); ridge == 0 returns the minimum-norm
// least-squares solution, so rank-deficient designs stay well-defined.
WeightVector fit_weights(
    std::span<const std::pair<FeatureVector, double>> samples, double ridge);

inline constexpr double kDefaultRidge = 1e-6;

// Plain-text round trip: "<count> v1 ... v<count>" with full precision.
std::string weights_to_line(const WeightVector& weights);
WeightVector weights_from_line(const std::string& line);

// Writes optional '#'-prefixed header lines, then the weight line.
void save_weights(const WeightVector& weights, const std::string& path,
                  std::span<const std::string> header_lines = {});

// Reads a weights file, skipping '#' headers and blank lines.
WeightVector load_weights(const std::string& path);

}  // namespace jamflow
