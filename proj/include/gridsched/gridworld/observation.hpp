#pragma once

#include <vector>

#include "gridsched/gridworld/types.hpp"

namespace gridsched {

// Egocentric 5x5 window whose center row is the row directly in front of the
// agent: depth offsets -1..3 (relative to the agent, along its facing axis)
// by lateral offsets -2..2. Each cell contributes a one-hot over kind (8),
// color (6 + none) and door state (3 + none); the carried object contributes
// one-hot over {none} + {key,ball} x colors.
inline constexpr int kViewSize = 5;
inline constexpr int kCellFeatures = kCellKindCount + (kColorCount + 1) + (kDoorStateCount + 1);
inline constexpr int kCarryFeatures = 1 + 2 * kColorCount;
inline constexpr int kObservationDim =
    kViewSize * kViewSize * kCellFeatures + kCarryFeatures;

using Observation = std::vector<double>;

namespace detail {

inline void encode_cell(const GridCell& c, double* out) {
  for (int i = 0; i < kCellFeatures; ++i) out[i] = 0.0;
  out[static_cast<int>(c.kind)] = 1.0;
  const bool colored = c.kind == CellKind::Door || c.kind == CellKind::Key ||
                       c.kind == CellKind::Ball || c.kind == CellKind::Box;
  const int color_slot = colored ? static_cast<int>(c.color) : kColorCount;
  out[kCellKindCount + color_slot] = 1.0;
  const int state_slot =
      c.kind == CellKind::Door ? static_cast<int>(c.door_state) : kDoorStateCount;
  out[kCellKindCount + kColorCount + 1 + state_slot] = 1.0;
}

}  // namespace detail

inline Observation encode_observation(const GridWorld& w) {
  Observation obs(kObservationDim, 0.0);
  const Point fwd = forward_offset(w.agent_dir);
  const Point right = right_offset(w.agent_dir);

  for (int vc = 0; vc < kViewSize; ++vc) {
    const int dc = vc - kViewSize / 2;
    // Per-column occlusion: anything beyond a wall (scanning away from the
    // agent, depth >= 0) reads as wall. Out-of-bounds cells read as wall too.
    bool wall_seen = false;
    for (int vr = 0; vr < kViewSize; ++vr) {
      const int dr = vr - 1;
      const Point p{w.agent_pos.x + dr * fwd.x + dc * right.x,
                    w.agent_pos.y + dr * fwd.y + dc * right.y};
      GridCell cell;
      if (dr > 0 && wall_seen) {
        cell = wall_cell();
      } else if (!w.in_bounds(p)) {
        cell = wall_cell();
        if (dr >= 0) wall_seen = true;
      } else {
        cell = w.at(p);
        if (dr >= 0 && cell.kind == CellKind::Wall) wall_seen = true;
      }
      double* slot = obs.data() + (vr * kViewSize + vc) * kCellFeatures;
      detail::encode_cell(cell, slot);
    }
  }

  double* carry = obs.data() + kViewSize * kViewSize * kCellFeatures;
  if (!w.carrying) {
    carry[0] = 1.0;
  } else {
    const int kind_idx = w.carrying->kind == CellKind::Key ? 0 : 1;
    carry[1 + kind_idx * kColorCount + static_cast<int>(w.carrying->color)] = 1.0;
  }
  return obs;
}

}  // namespace gridsched
