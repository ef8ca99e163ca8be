#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "gridsched/common/rng.hpp"
#include "gridsched/gridworld/solver.hpp"
#include "gridsched/gridworld/types.hpp"

namespace gridsched {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TaskSpec {
  TaskId task_id = TaskId::Empty;
  std::uint64_t generator_seed = 0;
  int max_steps = 0;
  SuccessKind success_kind = SuccessKind::ReachGoal;
};

struct TaskInfo {
  int width = 0;
  int height = 0;
  int max_steps = 0;
  SuccessKind success_kind = SuccessKind::ReachGoal;
};

inline TaskInfo task_info(TaskId id) {
  switch (id) {
    case TaskId::Empty:            return {6, 6, 100, SuccessKind::ReachGoal};
    case TaskId::SimpleCrossing:   return {9, 9, 160, SuccessKind::ReachGoal};
    case TaskId::LavaGap:          return {7, 7, 120, SuccessKind::ReachGoal};
    case TaskId::FourRooms:        return {11, 11, 200, SuccessKind::ReachGoal};
    case TaskId::MultiRoom:        return {9, 9, 160, SuccessKind::ReachGoal};
    case TaskId::DoorKey:          return {8, 8, 160, SuccessKind::ReachGoal};
    case TaskId::Unlock:           return {8, 8, 140, SuccessKind::ReachTargetCell};
    case TaskId::UnlockPickup:     return {8, 8, 180, SuccessKind::PickupTarget};
    case TaskId::KeyCorridor:      return {9, 9, 200, SuccessKind::PickupTarget};
    case TaskId::RedBlueDoors:     return {8, 8, 140, SuccessKind::ReachTargetCell};
    case TaskId::GoToDoor:         return {7, 7, 120, SuccessKind::AdjacentToTarget};
    case TaskId::GoToObject:       return {7, 7, 120, SuccessKind::AdjacentToTarget};
    case TaskId::Fetch:            return {8, 8, 140, SuccessKind::PickupTarget};
    case TaskId::PutNear:          return {8, 8, 160, SuccessKind::AdjacentToTarget};
    case TaskId::DynamicObstacles: return {8, 8, 120, SuccessKind::ReachGoal};
  }
  throw std::invalid_argument("unknown task id");
}

namespace detail {

inline Color random_color(Rng& rng) { return static_cast<Color>(rng.next_int(kColorCount)); }

inline Direction random_direction(Rng& rng) {
  return static_cast<Direction>(rng.next_int(4));
}

// Uniform empty cell within the inclusive box; throws after too many tries.
inline Point random_empty_cell(const GridWorld& w, Rng& rng, int x0, int x1, int y0, int y1) {
  for (int tries = 0; tries < 500; ++tries) {
    Point p{x0 + rng.next_int(x1 - x0 + 1), y0 + rng.next_int(y1 - y0 + 1)};
    if (w.at(p).kind == CellKind::Empty) return p;
  }
  throw GenerationError("no empty cell found in region");
}

inline bool spawn_already_successful(const GridWorld& w) {
  const Mission& m = w.mission;
  switch (m.success_kind) {
    case SuccessKind::ReachGoal:
      return w.at(w.agent_pos).kind == CellKind::Goal;
    case SuccessKind::ReachTargetCell:
      return w.agent_pos == m.target_pos;
    case SuccessKind::PickupTarget:
      return false;
    case SuccessKind::AdjacentToTarget: {
      if (m.require_carry) return false;
      return std::abs(w.agent_pos.x - m.target_pos.x) +
                 std::abs(w.agent_pos.y - m.target_pos.y) == 1;
    }
  }
  return false;
}

inline GridWorld gen_empty(Rng& rng) {
  const TaskInfo info = task_info(TaskId::Empty);
  GridWorld w = make_blank_world(TaskId::Empty, info.width, info.height, info.max_steps);
  w.at({info.width - 2, info.height - 2}) = goal_cell();
  w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::ReachGoal;
  return w;
}

// One full-span interior wall with a single gap; agent and goal on opposite
// sides. Orientation is seeded.
inline GridWorld gen_simple_crossing(Rng& rng) {
  const TaskInfo info = task_info(TaskId::SimpleCrossing);
  GridWorld w = make_blank_world(TaskId::SimpleCrossing, info.width, info.height, info.max_steps);
  const bool vertical = rng.next_int(2) == 0;
  const int c = 2 + rng.next_int(info.width - 4);  // in [2, w-3]
  const int gap = 1 + rng.next_int(info.height - 2);
  if (vertical) {
    for (int y = 1; y < info.height - 1; ++y) {
      if (y != gap) w.at({c, y}) = wall_cell();
    }
    w.agent_pos = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
    Point g = random_empty_cell(w, rng, c + 1, info.width - 2, 1, info.height - 2);
    w.at(g) = goal_cell();
  } else {
    for (int x = 1; x < info.width - 1; ++x) {
      if (x != gap) w.at({x, c}) = wall_cell();
    }
    w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, 1, c - 1);
    Point g = random_empty_cell(w, rng, 1, info.width - 2, c + 1, info.height - 2);
    w.at(g) = goal_cell();
  }
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::ReachGoal;
  return w;
}

inline GridWorld gen_lava_gap(Rng& rng) {
  const TaskInfo info = task_info(TaskId::LavaGap);
  GridWorld w = make_blank_world(TaskId::LavaGap, info.width, info.height, info.max_steps);
  const int c = 2 + rng.next_int(info.width - 4);
  const int gap = 1 + rng.next_int(info.height - 2);
  for (int y = 1; y < info.height - 1; ++y) {
    if (y != gap) w.at({c, y}) = lava_cell();
  }
  w.at({info.width - 2, info.height - 2}) = goal_cell();
  w.agent_pos = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::ReachGoal;
  return w;
}

inline GridWorld gen_four_rooms(Rng& rng) {
  const TaskInfo info = task_info(TaskId::FourRooms);
  GridWorld w = make_blank_world(TaskId::FourRooms, info.width, info.height, info.max_steps);
  const int mid = info.width / 2;  // 5 for 11x11
  for (int y = 1; y < info.height - 1; ++y) w.at({mid, y}) = wall_cell();
  for (int x = 1; x < info.width - 1; ++x) w.at({x, mid}) = wall_cell();
  // one gap per wall segment
  w.at({mid, 1 + rng.next_int(mid - 1)}) = GridCell{};
  w.at({mid, mid + 1 + rng.next_int(info.height - mid - 2)}) = GridCell{};
  w.at({1 + rng.next_int(mid - 1), mid}) = GridCell{};
  w.at({mid + 1 + rng.next_int(info.width - mid - 2), mid}) = GridCell{};
  Point g = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.at(g) = goal_cell();
  w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::ReachGoal;
  return w;
}

// Two or three rooms in a row connected by closed doors; goal in the last.
inline GridWorld gen_multi_room(Rng& rng) {
  const TaskInfo info = task_info(TaskId::MultiRoom);
  GridWorld w = make_blank_world(TaskId::MultiRoom, info.width, info.height, info.max_steps);
  const int n_rooms = 2 + rng.next_int(2);
  std::vector<int> walls;
  if (n_rooms == 2) {
    walls = {3 + rng.next_int(3)};  // in [3, 5]
  } else {
    walls = {3, 6};
  }
  for (int c : walls) {
    const int door_y = 1 + rng.next_int(info.height - 2);
    for (int y = 1; y < info.height - 1; ++y) {
      w.at({c, y}) = y == door_y ? door_cell(random_color(rng), DoorState::Closed) : wall_cell();
    }
  }
  const int first_wall = walls.front();
  const int last_wall = walls.back();
  w.agent_pos = random_empty_cell(w, rng, 1, first_wall - 1, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  Point g = random_empty_cell(w, rng, last_wall + 1, info.width - 2, 1, info.height - 2);
  w.at(g) = goal_cell();
  w.mission.success_kind = SuccessKind::ReachGoal;
  return w;
}

inline GridWorld gen_door_key(Rng& rng) {
  const TaskInfo info = task_info(TaskId::DoorKey);
  GridWorld w = make_blank_world(TaskId::DoorKey, info.width, info.height, info.max_steps);
  const int c = 2 + rng.next_int(info.width - 4);
  const Color col = random_color(rng);
  const int door_y = 1 + rng.next_int(info.height - 2);
  for (int y = 1; y < info.height - 1; ++y) {
    w.at({c, y}) = y == door_y ? door_cell(col, DoorState::Locked) : wall_cell();
  }
  w.at({info.width - 2, info.height - 2}) = goal_cell();
  Point key = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
  w.at(key) = object_cell(CellKind::Key, col);
  w.agent_pos = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::ReachGoal;
  return w;
}

// Locked door splits the grid; success is standing on the opened door cell.
inline GridWorld gen_unlock(Rng& rng) {
  const TaskInfo info = task_info(TaskId::Unlock);
  GridWorld w = make_blank_world(TaskId::Unlock, info.width, info.height, info.max_steps);
  const int c = 2 + rng.next_int(info.width - 4);
  const Color col = random_color(rng);
  const int door_y = 1 + rng.next_int(info.height - 2);
  for (int y = 1; y < info.height - 1; ++y) {
    w.at({c, y}) = y == door_y ? door_cell(col, DoorState::Locked) : wall_cell();
  }
  Point key = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
  w.at(key) = object_cell(CellKind::Key, col);
  w.agent_pos = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::ReachTargetCell;
  w.mission.target_pos = {c, door_y};
  w.mission.target_kind = CellKind::Door;
  w.mission.target_color = col;
  return w;
}

inline GridWorld gen_unlock_pickup(Rng& rng) {
  const TaskInfo info = task_info(TaskId::UnlockPickup);
  GridWorld w = make_blank_world(TaskId::UnlockPickup, info.width, info.height, info.max_steps);
  const int c = 2 + rng.next_int(info.width - 5);  // keep the far room >= 2 wide
  const Color door_col = random_color(rng);
  const int door_y = 1 + rng.next_int(info.height - 2);
  for (int y = 1; y < info.height - 1; ++y) {
    w.at({c, y}) = y == door_y ? door_cell(door_col, DoorState::Locked) : wall_cell();
  }
  Point key = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
  w.at(key) = object_cell(CellKind::Key, door_col);
  const Color ball_col = random_color(rng);
  Point ball = random_empty_cell(w, rng, c + 1, info.width - 2, 1, info.height - 2);
  w.at(ball) = object_cell(CellKind::Ball, ball_col);
  w.agent_pos = random_empty_cell(w, rng, 1, c - 1, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::PickupTarget;
  w.mission.target_kind = CellKind::Ball;
  w.mission.target_color = ball_col;
  w.mission.target_pos = ball;
  return w;
}

// Bottom area + two top rooms: a closed door hides the key, a locked door
// hides the target ball.
inline GridWorld gen_key_corridor(Rng& rng) {
  const TaskInfo info = task_info(TaskId::KeyCorridor);
  GridWorld w = make_blank_world(TaskId::KeyCorridor, info.width, info.height, info.max_steps);
  const int wall_y = 3;
  const int split_x = 4;
  for (int x = 1; x < info.width - 1; ++x) w.at({x, wall_y}) = wall_cell();
  for (int y = 1; y < wall_y; ++y) w.at({split_x, y}) = wall_cell();
  const Color key_col = random_color(rng);
  const Color other_col = random_color(rng);
  const int door1_x = 1 + rng.next_int(split_x - 1);                       // into left room
  const int door2_x = split_x + 1 + rng.next_int(info.width - split_x - 2);  // into right room
  w.at({door1_x, wall_y}) = door_cell(other_col, DoorState::Closed);
  w.at({door2_x, wall_y}) = door_cell(key_col, DoorState::Locked);
  Point key = random_empty_cell(w, rng, 1, split_x - 1, 1, wall_y - 1);
  w.at(key) = object_cell(CellKind::Key, key_col);
  const Color ball_col = random_color(rng);
  Point ball = random_empty_cell(w, rng, split_x + 1, info.width - 2, 1, wall_y - 1);
  w.at(ball) = object_cell(CellKind::Ball, ball_col);
  w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, wall_y + 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::PickupTarget;
  w.mission.target_kind = CellKind::Ball;
  w.mission.target_color = ball_col;
  w.mission.target_pos = ball;
  return w;
}

// Red and blue doors in facing interior walls; success is standing on the
// opened blue door cell.
inline GridWorld gen_red_blue_doors(Rng& rng) {
  const TaskInfo info = task_info(TaskId::RedBlueDoors);
  GridWorld w = make_blank_world(TaskId::RedBlueDoors, info.width, info.height, info.max_steps);
  const int left_x = 2;
  const int right_x = info.width - 3;
  const int red_y = 1 + rng.next_int(info.height - 2);
  const int blue_y = 1 + rng.next_int(info.height - 2);
  for (int y = 1; y < info.height - 1; ++y) {
    w.at({left_x, y}) = y == red_y ? door_cell(Color::Red, DoorState::Closed) : wall_cell();
    w.at({right_x, y}) = y == blue_y ? door_cell(Color::Blue, DoorState::Closed) : wall_cell();
  }
  w.agent_pos = random_empty_cell(w, rng, left_x + 1, right_x - 1, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::ReachTargetCell;
  w.mission.target_pos = {right_x, blue_y};
  w.mission.target_kind = CellKind::Door;
  w.mission.target_color = Color::Blue;
  return w;
}

// Four differently colored doors set into the border walls; go next to the
// one named by the mission.
inline GridWorld gen_go_to_door(Rng& rng) {
  const TaskInfo info = task_info(TaskId::GoToDoor);
  GridWorld w = make_blank_world(TaskId::GoToDoor, info.width, info.height, info.max_steps);
  // four distinct colors
  int perm[kColorCount] = {0, 1, 2, 3, 4, 5};
  for (int i = kColorCount - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.next_int(i + 1)]);
  }
  const Point door_pos[4] = {
      {1 + rng.next_int(info.width - 2), 0},
      {1 + rng.next_int(info.width - 2), info.height - 1},
      {0, 1 + rng.next_int(info.height - 2)},
      {info.width - 1, 1 + rng.next_int(info.height - 2)},
  };
  for (int i = 0; i < 4; ++i) {
    w.at(door_pos[i]) = door_cell(static_cast<Color>(perm[i]), DoorState::Closed);
  }
  const int target = rng.next_int(4);
  w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::AdjacentToTarget;
  w.mission.target_pos = door_pos[target];
  w.mission.target_kind = CellKind::Door;
  w.mission.target_color = static_cast<Color>(perm[target]);
  return w;
}

inline GridWorld gen_go_to_object(Rng& rng) {
  const TaskInfo info = task_info(TaskId::GoToObject);
  GridWorld w = make_blank_world(TaskId::GoToObject, info.width, info.height, info.max_steps);
  const CellKind kinds[3] = {CellKind::Ball, CellKind::Box, CellKind::Key};
  Point pos[3];
  Color col[3];
  CellKind kind[3];
  for (int i = 0; i < 3; ++i) {
    while (true) {
      kind[i] = kinds[rng.next_int(3)];
      col[i] = random_color(rng);
      bool dup = false;
      for (int j = 0; j < i; ++j) {
        if (kind[j] == kind[i] && col[j] == col[i]) dup = true;
      }
      if (!dup) break;
    }
    pos[i] = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
    w.at(pos[i]) = object_cell(kind[i], col[i]);
  }
  const int target = rng.next_int(3);
  w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::AdjacentToTarget;
  w.mission.target_pos = pos[target];
  w.mission.target_kind = kind[target];
  w.mission.target_color = col[target];
  return w;
}

inline GridWorld gen_fetch(Rng& rng) {
  const TaskInfo info = task_info(TaskId::Fetch);
  GridWorld w = make_blank_world(TaskId::Fetch, info.width, info.height, info.max_steps);
  const CellKind kinds[2] = {CellKind::Key, CellKind::Ball};
  Point pos[3];
  Color col[3];
  CellKind kind[3];
  for (int i = 0; i < 3; ++i) {
    while (true) {
      kind[i] = kinds[rng.next_int(2)];
      col[i] = random_color(rng);
      bool dup = false;
      for (int j = 0; j < i; ++j) {
        if (kind[j] == kind[i] && col[j] == col[i]) dup = true;
      }
      if (!dup) break;
    }
    pos[i] = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
    w.at(pos[i]) = object_cell(kind[i], col[i]);
  }
  const int target = rng.next_int(3);
  w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::PickupTarget;
  w.mission.target_pos = pos[target];
  w.mission.target_kind = kind[target];
  w.mission.target_color = col[target];
  return w;
}

// Bring the ball next to the landmark box.
inline GridWorld gen_put_near(Rng& rng) {
  const TaskInfo info = task_info(TaskId::PutNear);
  GridWorld w = make_blank_world(TaskId::PutNear, info.width, info.height, info.max_steps);
  const Color ball_col = random_color(rng);
  const Color box_col = random_color(rng);
  Point ball = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.at(ball) = object_cell(CellKind::Ball, ball_col);
  Point box = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.at(box) = object_cell(CellKind::Box, box_col);
  w.agent_pos = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
  w.agent_dir = random_direction(rng);
  w.mission.success_kind = SuccessKind::AdjacentToTarget;
  w.mission.target_pos = box;
  w.mission.target_kind = CellKind::Box;
  w.mission.target_color = box_col;
  w.mission.require_carry = CarriedObject{CellKind::Ball, ball_col};
  return w;
}

inline GridWorld gen_dynamic_obstacles(Rng& rng) {
  const TaskInfo info = task_info(TaskId::DynamicObstacles);
  GridWorld w = make_blank_world(TaskId::DynamicObstacles, info.width, info.height, info.max_steps);
  w.at({info.width - 2, info.height - 2}) = goal_cell();
  w.agent_pos = random_empty_cell(w, rng, 1, info.width / 2, 1, info.height / 2);
  w.agent_dir = random_direction(rng);
  for (int i = 0; i < 3; ++i) {
    while (true) {
      Point p = random_empty_cell(w, rng, 1, info.width - 2, 1, info.height - 2);
      const int dist = std::abs(p.x - w.agent_pos.x) + std::abs(p.y - w.agent_pos.y);
      if (dist <= 1) continue;  // never spawn an obstacle on or next to the agent
      w.at(p) = object_cell(CellKind::Ball, Color::Blue);
      break;
    }
  }
  w.rng_state = rng.next_u64();
  w.mission.success_kind = SuccessKind::ReachGoal;
  return w;
}

inline GridWorld generate_candidate(TaskId id, Rng& rng) {
  switch (id) {
    case TaskId::Empty:            return gen_empty(rng);
    case TaskId::SimpleCrossing:   return gen_simple_crossing(rng);
    case TaskId::LavaGap:          return gen_lava_gap(rng);
    case TaskId::FourRooms:        return gen_four_rooms(rng);
    case TaskId::MultiRoom:        return gen_multi_room(rng);
    case TaskId::DoorKey:          return gen_door_key(rng);
    case TaskId::Unlock:           return gen_unlock(rng);
    case TaskId::UnlockPickup:     return gen_unlock_pickup(rng);
    case TaskId::KeyCorridor:      return gen_key_corridor(rng);
    case TaskId::RedBlueDoors:     return gen_red_blue_doors(rng);
    case TaskId::GoToDoor:         return gen_go_to_door(rng);
    case TaskId::GoToObject:       return gen_go_to_object(rng);
    case TaskId::Fetch:            return gen_fetch(rng);
    case TaskId::PutNear:          return gen_put_near(rng);
    case TaskId::DynamicObstacles: return gen_dynamic_obstacles(rng);
  }
  throw std::invalid_argument("unknown task id");
}

}  // namespace detail

// Deterministic instance generation: a pure function of (task_id, seed).
// Candidates failing the solvability oracle (or already successful at spawn)
// are regenerated from derived seeds, up to 100 attempts.
inline GridWorld make_task(TaskId id, std::uint64_t seed) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rng rng(derive_seed(seed, task_name(id), static_cast<std::uint64_t>(attempt)));
    GridWorld w = detail::generate_candidate(id, rng);
    if (detail::spawn_already_successful(w)) continue;
    if (!solvable(w)) continue;
    return w;
  }
  throw GenerationError("failed to generate a solvable " + std::string(task_name(id)) +
                        " instance after 100 attempts");
}

inline GridWorld make_task(std::string_view name, std::uint64_t seed) {
  return make_task(task_from_name(name), seed);
}

inline TaskSpec task_spec(TaskId id, std::uint64_t seed) {
  const TaskInfo info = task_info(id);
  return TaskSpec{id, seed, info.max_steps, info.success_kind};
}

}  // namespace gridsched
