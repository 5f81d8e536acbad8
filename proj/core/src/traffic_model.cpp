#include "jamflow/traffic_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jamflow {

namespace {

constexpr double kProbabilityTolerance = 1e-12;
constexpr double kAdmissionSumTolerance = 1e-9;

double capacity_total(std::span<const SegmentSpec> segments) {
  double total = 0.0;
  for (const auto& seg : segments) total += seg.service_rate;
  return total;
}

// Capacity-proportional split used whenever the weight mass is zero.
void capacity_proportional(std::span<const SegmentSpec> segments,
                           std::vector<double>& out) {
  const double total = capacity_total(segments);
  for (std::size_t i = 0; i < segments.size(); ++i)
    out[i] = segments[i].service_rate / total;
}

}  // namespace

ArrivalDistribution::ArrivalDistribution(std::vector<Outcome> support)
    : support_(std::move(support)) {
  if (support_.empty())
    throw std::invalid_argument("arrival distribution: empty support");
  double sum = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const auto& o = support_[i];
    if (o.count < 0)
      throw std::invalid_argument("arrival distribution: negative count");
    if (!(o.probability >= 0.0 && o.probability <= 1.0))
      throw std::invalid_argument(
          "arrival distribution: probability outside [0, 1]");
    for (std::size_t j = 0; j < i; ++j)
      if (support_[j].count == o.count)
        throw std::invalid_argument(
            "arrival distribution: duplicate count " +
            std::to_string(o.count));
    sum += o.probability;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance)
    throw std::invalid_argument(
        "arrival distribution: probabilities sum to " + std::to_string(sum));
}

double ArrivalDistribution::mean() const {
  double m = 0.0;
  for (const auto& o : support_) m += o.probability * o.count;
  return m;
}

double ArrivalDistribution::variance() const {
  const double m = mean();
  double v = 0.0;
  for (const auto& o : support_) {
    const double d = o.count - m;
    v += o.probability * d * d;
  }
  return v;
}

int ArrivalDistribution::sample(Rng& rng) const {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (const auto& o : support_) {
    cum += o.probability;
    if (u < cum) return o.count;
  }
  return support_.back().count;  // guards against rounding in the CDF
}

void validate_state(const SystemState& state, std::size_t segment_count) {
  if (state.queues.size() != segment_count)
    throw std::invalid_argument("state: expected " +
                                std::to_string(segment_count) + " queues, got " +
                                std::to_string(state.queues.size()));
  if (state.admission.size() != segment_count)
    throw std::invalid_argument("state: expected " +
                                std::to_string(segment_count) +
                                " admission entries, got " +
                                std::to_string(state.admission.size()));
  double sum = 0.0;
  for (double q : state.queues)
    if (!(q >= 0.0)) throw std::invalid_argument("state: negative queue");
  for (double a : state.admission) {
    if (!(a >= 0.0))
      throw std::invalid_argument("state: negative admission entry");
    sum += a;
  }
  if (std::abs(sum - 1.0) > kAdmissionSumTolerance)
    throw std::invalid_argument("state: admission entries sum to " +
                                std::to_string(sum));
}

int sample_arrivals(const ArrivalDistribution& dist, Rng& rng) {
  return dist.sample(rng);
}

void admission_ratios_into(const Observation& observation,
                           std::span<const SegmentSpec> segments,
                           AdmissionRule rule, std::vector<double>& out) {
  const std::size_t n = segments.size();
  if (n < 2)
    throw std::invalid_argument("admission_ratios: need at least 2 segments");
  if (observation.estimates.size() != n)
    throw std::invalid_argument(
        "admission_ratios: estimate count does not match segment count");
  out.resize(n);

  // Weight per segment; kInverseCount ignores capacities.
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double est = observation.estimates[i];
    if (!(est >= 0.0))
      throw std::invalid_argument("admission_ratios: negative estimate");
    out[i] = rule == AdmissionRule::kInverseCount
                 ? est
                 : est / segments[i].service_rate;
    total += out[i];
  }

  if (total <= 0.0) {
    capacity_proportional(segments, out);
    return;
  }

  if (rule == AdmissionRule::kLeastLoaded) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (out[i] < out[best]) best = i;
    for (std::size_t i = 0; i < n; ++i) out[i] = i == best ? 1.0 : 0.0;
    return;
  }

  const double scale = static_cast<double>(n - 1) * total;
  for (std::size_t i = 0; i < n; ++i) out[i] = (total - out[i]) / scale;
}

std::vector<double> admission_ratios(const Observation& observation,
                                     std::span<const SegmentSpec> segments,
                                     AdmissionRule rule) {
  std::vector<double> out;
  admission_ratios_into(observation, segments, rule, out);
  return out;
}

void observe_into(const std::vector<double>& queues,
                  const AttackAction& action, bool success, Observation& out) {
  out.estimates.assign(queues.begin(), queues.end());
  if (action.jams() && success) {
    const auto seg = static_cast<std::size_t>(action.segment);
    if (seg >= queues.size())
      throw std::invalid_argument("observe: jam target out of range");
    out.estimates[seg] *= 1.0 - action.fraction;
  }
}

Observation observe(const std::vector<double>& queues,
                    const AttackAction& action, bool success) {
  Observation out;
  observe_into(queues, action, success, out);
  return out;
}

void transition_into(const SystemState& state, const AttackAction& action,
                     int arrivals, bool success,
                     std::span<const SegmentSpec> segments, AdmissionRule rule,
                     SystemState& next, Observation& scratch) {
  const std::size_t n = segments.size();
  if (state.queues.size() != n || state.admission.size() != n)
    throw std::invalid_argument("transition: state does not match segments");
  if (arrivals < 0)
    throw std::invalid_argument("transition: negative arrivals");

  next.queues.resize(n);
  // This step's arrivals are split by the admission ratios already in force.
  for (std::size_t i = 0; i < n; ++i) {
    const double q = state.queues[i] + state.admission[i] * arrivals -
                     segments[i].service_rate;
    next.queues[i] = q > 0.0 ? q : 0.0;
  }
  // The controller sees (possibly tampered) estimates of the queues as they
  // were when this step began, and publishes the split for the next step.
  observe_into(state.queues, action, success, scratch);
  admission_ratios_into(scratch, segments, rule, next.admission);
}

SystemState transition(const SystemState& state, const AttackAction& action,
                       int arrivals, bool success,
                       std::span<const SegmentSpec> segments,
                       AdmissionRule rule) {
  SystemState next;
  Observation scratch;
  transition_into(state, action, arrivals, success, segments, rule, next,
                  scratch);
  return next;
}

}  // namespace jamflow
