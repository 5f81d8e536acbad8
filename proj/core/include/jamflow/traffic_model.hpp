#pragma once

#include <span>
#include <vector>

#include "jamflow/action.hpp"
#include "jamflow/rng.hpp"

namespace jamflow {

// One road segment of the diverge. service_rate is the number of vehicles
// the segment discharges per time step; it must be positive.
struct SegmentSpec {
  double service_rate = 0.0;
};

// Finite-support distribution of the number of vehicles arriving at the
// diverge per step. Counts are distinct non-negative integers and the
// probabilities sum to one (within 1e-12).
class ArrivalDistribution {
 public:
  struct Outcome {
    int count = 0;
    double probability = 0.0;
  };

  explicit ArrivalDistribution(std::vector<Outcome> support);

  const std::vector<Outcome>& support() const { return support_; }

  double mean() const;
  double variance() const;

  // Inverse-CDF draw walking the support in declaration order, so a given
  // uniform variate always maps to the same count.
  int sample(Rng& rng) const;

 private:
  std::vector<Outcome> support_;
};

// Queue lengths and the admission split currently in force. queues[i] is the
// (fluid) number of vehicles waiting on segment i; admission[i] is the share
// of new arrivals routed to segment i. Admission entries are non-negative
// and sum to one.
struct SystemState {
  std::vector<double> queues;
  std::vector<double> admission;
};

// Queue estimates as seen by the controller after any sensor tampering.
struct Observation {
  std::vector<double> estimates;
};

// How the controller maps queue estimates to an admission split.
//   kInverseLoad:  weight w_i = estimate_i / service_rate_i, then
//                  alpha_i = (S - w_i) / ((n-1) S) with S = sum_j w_j.
//   kInverseCount: same formula with w_i = estimate_i (capacity-blind).
//   kLeastLoaded:  all arrivals to the segment with the smallest w_i
//                  (inverse-load weights, ties to the lowest index).
// When S == 0 (empty system) every rule falls back to the
// capacity-proportional split alpha_i = service_rate_i / sum_j service_rate_j.
enum class AdmissionRule {
  kInverseLoad,
  kInverseCount,
  kLeastLoaded,
};

// Throws std::invalid_argument unless the state has `segment_count` queues
// and admission entries, queues are non-negative, and admission entries are
// non-negative and sum to one within 1e-9.
void validate_state(const SystemState& state, std::size_t segment_count);

int sample_arrivals(const ArrivalDistribution& dist, Rng& rng);

// Controller's admission split for the given queue estimates. Splits sum to
// one for every rule; with two or more segments every entry is at most
// 1/(n-1) under the inverse rules, so no segment is starved unless another
// dominates the load completely.
std::vector<double> admission_ratios(
    const Observation& observation, std::span<const SegmentSpec> segments,
    AdmissionRule rule = AdmissionRule::kInverseLoad);

// Allocation-free variant for hot loops; resizes `out` to the segment count.
void admission_ratios_into(const Observation& observation,
                           std::span<const SegmentSpec> segments,
                           AdmissionRule rule, std::vector<double>& out);

// Queue estimates produced by the sensor layer under an attack. A jam that
// succeeds scales the target's estimate by (1 - fraction); a failed jam or
// NoAttack reports the true queues.
Observation observe(const std::vector<double>& queues,
                    const AttackAction& action, bool success);

void observe_into(const std::vector<double>& queues,
                  const AttackAction& action, bool success, Observation& out);

// One step of the closed loop: the controller reads (possibly tampered)
// estimates of the current queues and publishes the next admission split,
// while this step's arrivals are still admitted under the split carried in
// `state`. Queues then advance by admitted inflow minus service, clamped at
// zero. Only the observation is attacked; arrivals and service are not.
SystemState transition(const SystemState& state, const AttackAction& action,
                       int arrivals, bool success,
                       std::span<const SegmentSpec> segments,
                       AdmissionRule rule = AdmissionRule::kInverseLoad);

// Allocation-free variant; `scratch` holds the intermediate observation.
void transition_into(const SystemState& state, const AttackAction& action,
                     int arrivals, bool success,
                     std::span<const SegmentSpec> segments, AdmissionRule rule,
                     SystemState& next, Observation& scratch);

}  // namespace jamflow
