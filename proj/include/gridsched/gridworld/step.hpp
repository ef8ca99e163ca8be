#pragma once

#include <stdexcept>

#include "gridsched/common/rng.hpp"
#include "gridsched/gridworld/observation.hpp"
#include "gridsched/gridworld/types.hpp"

namespace gridsched {

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  bool success = false;
};

inline double success_reward(int step_count, int max_steps) {
  return 1.0 - 0.9 * (static_cast<double>(step_count) / max_steps);
}

namespace detail {

inline bool mission_success(const GridWorld& w) {
  const Mission& m = w.mission;
  switch (m.success_kind) {
    case SuccessKind::ReachGoal:
      return w.at(w.agent_pos).kind == CellKind::Goal;
    case SuccessKind::ReachTargetCell:
      return w.agent_pos == m.target_pos;
    case SuccessKind::PickupTarget:
      return w.carrying && w.carrying->kind == m.target_kind &&
             w.carrying->color == m.target_color;
    case SuccessKind::AdjacentToTarget: {
      const int dist = std::abs(w.agent_pos.x - m.target_pos.x) +
                       std::abs(w.agent_pos.y - m.target_pos.y);
      if (dist != 1) return false;
      if (m.require_carry) return w.carrying == m.require_carry;
      return true;
    }
  }
  return false;
}

// Each obstacle ball moves to a uniformly chosen free 4-neighbor (or stays),
// scanned in row-major order; draws come from the world's own rng state.
inline void move_obstacles(GridWorld& w) {
  std::vector<Point> balls;
  for (int y = 0; y < w.height; ++y) {
    for (int x = 0; x < w.width; ++x) {
      if (w.at({x, y}).kind == CellKind::Ball) balls.push_back({x, y});
    }
  }
  for (const Point& b : balls) {
    Point options[5] = {b, {b.x + 1, b.y}, {b.x - 1, b.y}, {b.x, b.y + 1}, {b.x, b.y - 1}};
    Point valid[5];
    int n = 0;
    for (const Point& o : options) {
      if (o == b) {
        valid[n++] = o;
        continue;
      }
      if (w.in_bounds(o) && w.at(o).kind == CellKind::Empty && !(o == w.agent_pos)) {
        valid[n++] = o;
      }
    }
    const int pick = static_cast<int>(splitmix64(w.rng_state) % static_cast<std::uint64_t>(n));
    if (!(valid[pick] == b)) {
      GridCell ball = w.at(b);
      w.at(b) = GridCell{};
      w.at(valid[pick]) = ball;
    }
  }
}

}  // namespace detail

inline StepResult step(GridWorld& w, Action action) {
  if (w.finished) {
    throw std::logic_error("step() called on a finished episode");
  }
  w.step_count += 1;

  bool fatal = false;
  const Point front{w.agent_pos.x + forward_offset(w.agent_dir).x,
                    w.agent_pos.y + forward_offset(w.agent_dir).y};

  switch (action) {
    case Action::TurnLeft:
      w.agent_dir = turn_left(w.agent_dir);
      break;
    case Action::TurnRight:
      w.agent_dir = turn_right(w.agent_dir);
      break;
    case Action::Forward:
      if (w.task_id == TaskId::DynamicObstacles && w.in_bounds(front) &&
          w.at(front).kind == CellKind::Ball) {
        fatal = true;  // collision with a moving obstacle
        break;
      }
      if (w.walkable(front)) {
        w.agent_pos = front;
        if (w.at(front).kind == CellKind::Lava) fatal = true;
      }
      break;
    case Action::Pickup:
      if (!w.carrying && w.in_bounds(front) && is_carriable(w.at(front).kind)) {
        w.carrying = CarriedObject{w.at(front).kind, w.at(front).color};
        w.at(front) = GridCell{};
      }
      break;
    case Action::Drop:
      if (w.carrying && w.in_bounds(front) && w.at(front).kind == CellKind::Empty) {
        w.at(front) = object_cell(w.carrying->kind, w.carrying->color);
        w.carrying.reset();
      }
      break;
    case Action::Toggle:
      if (w.in_bounds(front) && w.at(front).kind == CellKind::Door) {
        GridCell& door = w.at(front);
        switch (door.door_state) {
          case DoorState::Closed:
            door.door_state = DoorState::Open;
            break;
          case DoorState::Open:
            door.door_state = DoorState::Closed;
            break;
          case DoorState::Locked:
            if (w.carrying && w.carrying->kind == CellKind::Key &&
                w.carrying->color == door.color) {
              door.door_state = DoorState::Open;
            }
            break;
        }
      }
      break;
    case Action::Done:
      break;
  }

  if (w.task_id == TaskId::DynamicObstacles && !fatal) {
    detail::move_obstacles(w);
  }

  StepResult res;
  res.success = !fatal && detail::mission_success(w);
  if (res.success) {
    res.reward = success_reward(w.step_count, w.max_steps);
    res.terminated = true;
  } else if (fatal) {
    res.terminated = true;
  } else if (w.step_count >= w.max_steps) {
    res.truncated = true;
  }
  w.finished = res.terminated || res.truncated;
  res.observation = encode_observation(w);
  return res;
}

}  // namespace gridsched
