#include "jamflow/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace jamflow {

namespace {

// Truthful admission share of segment 1 for a two-segment system, matching
// admission_ratios on the true queues without the vector round trip.
double truthful_first_share(const SystemState& state,
                            const ScenarioConfig& scenario) {
  const double b1 = scenario.segments[0].service_rate;
  const double b2 = scenario.segments[1].service_rate;
  double w1 = state.queues[0];
  double w2 = state.queues[1];
  if (scenario.admission_rule != AdmissionRule::kInverseCount) {
    w1 /= b1;
    w2 /= b2;
  }
  const double total = w1 + w2;
  if (total <= 0.0) return b1 / (b1 + b2);
  if (scenario.admission_rule == AdmissionRule::kLeastLoaded)
    return w1 <= w2 ? 1.0 : 0.0;
  return (total - w1) / total;
}

}  // namespace

FeatureVector feature_vector(const SystemState& state,
                             const ScenarioConfig& scenario) {
  if (scenario.segments.size() != 2 || state.queues.size() != 2 ||
      state.admission.size() != 2)
    throw std::invalid_argument(
        "feature_vector: requires a two-segment state");
  const double q1 = state.queues[0];
  const double q2 = state.queues[1];
  const double b1 = scenario.segments[0].service_rate;
  const double b2 = scenario.segments[1].service_rate;
  const double advertised = state.admission[0];

  FeatureVector f;
  f.values[0] = 1.0;
  f.values[1] = q1 / kQueueScale;
  f.values[2] = q2 / kQueueScale;
  f.values[3] = std::abs(q1 / b1 - q2 / b2) / kImbalanceScale;
  f.values[4] = q1 <= q2 ? 1.0 : 0.0;
  f.values[5] = advertised;
  f.values[6] = std::abs(advertised - truthful_first_share(state, scenario));
  f.values[7] = std::abs(advertised - b1 / (b1 + b2));
  f.values[8] = (q1 == 0.0 && q2 == 0.0) ? 1.0 : 0.0;
  return f;
}

double approx_value(const WeightVector& weights,
                    const FeatureVector& features) {
  if (weights.values.size() != kFeatureCount)
    throw std::invalid_argument("approx_value: expected " +
                                std::to_string(kFeatureCount) + " weights");
  double v = 0.0;
  for (int i = 0; i < kFeatureCount; ++i)
    v += weights.values[static_cast<std::size_t>(i)] * features.values[static_cast<std::size_t>(i)];
  return v;
}

WeightVector fit_weights(
    std::span<const std::pair<FeatureVector, double>> samples, double ridge) {
  if (samples.empty())
    throw std::invalid_argument("fit_weights: no samples");
  if (!(ridge >= 0.0))
    throw std::invalid_argument("fit_weights: ridge must be non-negative");

  const auto m = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(m, kFeatureCount);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& [features, target] = samples[static_cast<std::size_t>(i)];
    for (int k = 0; k < kFeatureCount; ++k) x(i, k) = features.values[static_cast<std::size_t>(k)];
    y(i) = target;
  }

  Eigen::VectorXd r;
  if (ridge > 0.0) {
    const Eigen::MatrixXd gram =
        x.transpose() * x +
        ridge * Eigen::MatrixXd::Identity(kFeatureCount, kFeatureCount);
    r = gram.ldlt().solve(x.transpose() * y);
  } else {
    r = x.completeOrthogonalDecomposition().solve(y);
  }
  return WeightVector{{r.data(), r.data() + kFeatureCount}};
}

std::string weights_to_line(const WeightVector& weights) {
  std::string line = std::to_string(weights.values.size());
  char buf[40];
  for (double v : weights.values) {
    std::snprintf(buf, sizeof(buf), " %.17g", v);
    line += buf;
  }
  return line;
}

WeightVector weights_from_line(const std::string& line) {
  std::istringstream in(line);
  std::size_t count = 0;
  if (!(in >> count))
    throw std::invalid_argument("weights: missing count");
  WeightVector w;
  w.values.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    if (!(in >> w.values[i]))
      throw std::invalid_argument("weights: expected " +
                                  std::to_string(count) + " values");
  return w;
}

void save_weights(const WeightVector& weights, const std::string& path,
                  std::span<const std::string> header_lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open for writing");
  for (const auto& line : header_lines) out << "# " << line << '\n';
  out << weights_to_line(weights) << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

WeightVector load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open weights file");
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return weights_from_line(line);
  }
  throw std::runtime_error(path + ": no weight line found");
}

}  // namespace jamflow
