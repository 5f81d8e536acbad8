#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "jamflow/action.hpp"
#include "jamflow/scenario.hpp"
#include "jamflow/traffic_model.hpp"

namespace jamflow {

// Cartesian discretization of the two-segment state space. Queue axes take
// values {0, step, ..., max}; the admission axis grids the first segment's
// share over [0, 1] (the second share is its complement). Steps must divide
// the axis length within 1e-9.
struct DiscretizationGrid {
  double queue_step = 25.0;
  double queue_max = 75.0;
  double admission_step = 0.25;

  std::size_t queue_points() const;
  std::size_t admission_points() const;
  double queue_value(std::size_t index) const { return queue_step * index; }
  double admission_value(std::size_t index) const {
    return admission_step * index;
  }

  // Nearest grid index; exact midpoints round down. Values beyond the axis
  // clamp to the boundary, which absorbs overflow above queue_max.
  std::size_t snap_queue(double q) const;
  std::size_t snap_admission(double a) const;
};

void validate_grid(const DiscretizationGrid& grid);

struct TransitionEntry {
  std::int32_t successor = 0;
  double probability = 0.0;
  // Expected stage reward conditional on reaching this successor; outcomes
  // that snap to the same grid point are merged probability-weighted.
  double reward = 0.0;
};

struct FiniteMdpLimits {
  std::size_t max_state_action_pairs = 1'000'000;
};

// Explicit finite MDP. Built from a scenario by build_finite_mdp, or
// assembled directly (rows/actions/discount) for synthetic test problems,
// in which case grid and states stay empty.
struct FiniteMdp {
  DiscretizationGrid grid;
  std::size_t segment_count = 0;
  double discount = 0.0;
  std::vector<AttackAction> actions;
  std::vector<SystemState> states;  // decoded grid states; index order below
  // Row per (state, action) pair at index state * actions.size() + action,
  // entries sorted by successor; probabilities sum to 1 within 1e-12.
  std::vector<std::vector<TransitionEntry>> rows;

  std::size_t state_count() const {
    return actions.empty() ? 0 : rows.size() / actions.size();
  }

  const std::vector<TransitionEntry>& row(std::size_t state,
                                          std::size_t action) const {
    return rows[state * actions.size() + action];
  }

  // Index layout: ((q1_index * queue_points) + q2_index) * admission_points
  // + admission_index.
  std::size_t state_index(std::size_t q1_index, std::size_t q2_index,
                          std::size_t admission_index) const;

  // Nearest grid state for an arbitrary continuous state.
  std::size_t snap_state(const SystemState& state) const;
};

// Enumerates the grid and computes every transition row exactly: for each
// (state, action), successors are the snapped images of the closed-loop
// transition over arrival counts and jam success branches. Rewards are
// scored on the snapped successor so the finite model is self-consistent.
// Requires a two-segment scenario; throws std::invalid_argument when the
// grid is malformed or the state-action count exceeds the limit.
FiniteMdp build_finite_mdp(const ScenarioConfig& scenario,
                           const DiscretizationGrid& grid,
                           const FiniteMdpLimits& limits = {});

// Writes the model as text: a header line, then one line per transition
// "state action successor probability reward". Deterministic output.
void dump_finite_mdp(const FiniteMdp& mdp, std::ostream& out);

}  // namespace jamflow
