#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gridsched {

enum class CellKind : std::uint8_t { Empty, Wall, Lava, Goal, Door, Key, Ball, Box };
inline constexpr int kCellKindCount = 8;

enum class Color : std::uint8_t { Red, Green, Blue, Purple, Yellow, Grey };
inline constexpr int kColorCount = 6;

enum class DoorState : std::uint8_t { Open, Closed, Locked };
inline constexpr int kDoorStateCount = 3;

// color is meaningful for door/key/ball/box, door_state for doors only;
// equality ignores the fields that are not meaningful for the cell's kind.
struct GridCell {
  CellKind kind = CellKind::Empty;
  Color color = Color::Red;
  DoorState door_state = DoorState::Open;

  bool operator==(const GridCell& o) const {
    if (kind != o.kind) return false;
    const bool colored = kind == CellKind::Door || kind == CellKind::Key ||
                         kind == CellKind::Ball || kind == CellKind::Box;
    if (colored && color != o.color) return false;
    if (kind == CellKind::Door && door_state != o.door_state) return false;
    return true;
  }
};

inline GridCell wall_cell() { return {CellKind::Wall, Color::Grey, DoorState::Open}; }
inline GridCell lava_cell() { return {CellKind::Lava, Color::Red, DoorState::Open}; }
inline GridCell goal_cell() { return {CellKind::Goal, Color::Green, DoorState::Open}; }
inline GridCell door_cell(Color c, DoorState s) { return {CellKind::Door, c, s}; }
inline GridCell object_cell(CellKind kind, Color c) { return {kind, c, DoorState::Open}; }

enum class Direction : std::uint8_t { North, East, South, West };

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

inline Point forward_offset(Direction d) {
  switch (d) {
    case Direction::North: return {0, -1};
    case Direction::East: return {1, 0};
    case Direction::South: return {0, 1};
    case Direction::West: return {-1, 0};
  }
  throw std::logic_error("bad direction");
}

// Unit vector pointing to the agent's right.
inline Point right_offset(Direction d) {
  switch (d) {
    case Direction::North: return {1, 0};
    case Direction::East: return {0, 1};
    case Direction::South: return {-1, 0};
    case Direction::West: return {0, -1};
  }
  throw std::logic_error("bad direction");
}

inline Direction turn_left(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 3) % 4);
}
inline Direction turn_right(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 1) % 4);
}

struct CarriedObject {
  CellKind kind = CellKind::Key;  // key or ball
  Color color = Color::Red;
  bool operator==(const CarriedObject&) const = default;
};

inline bool is_carriable(CellKind k) { return k == CellKind::Key || k == CellKind::Ball; }

enum class SuccessKind : std::uint8_t {
  ReachGoal,
  ReachTargetCell,
  PickupTarget,
  AdjacentToTarget,
};

enum class Action : std::uint8_t {
  TurnLeft,
  TurnRight,
  Forward,
  Pickup,
  Drop,
  Toggle,
  Done,
};
inline constexpr int kActionCount = 7;

// Task-specific target descriptor. target_pos/kind/color are used according
// to the success kind; require_carry adds a "while holding X" condition to
// adjacency goals.
struct Mission {
  SuccessKind success_kind = SuccessKind::ReachGoal;
  Point target_pos{-1, -1};
  CellKind target_kind = CellKind::Empty;
  Color target_color = Color::Red;
  std::optional<CarriedObject> require_carry;

  bool operator==(const Mission&) const = default;
};

enum class TaskId : std::uint8_t {
  Empty,
  SimpleCrossing,
  LavaGap,
  FourRooms,
  MultiRoom,
  DoorKey,
  Unlock,
  UnlockPickup,
  KeyCorridor,
  RedBlueDoors,
  GoToDoor,
  GoToObject,
  Fetch,
  PutNear,
  DynamicObstacles,
};
inline constexpr int kTaskCount = 15;

inline constexpr std::array<std::string_view, kTaskCount> kTaskNames = {
    "Empty",     "SimpleCrossing", "LavaGap",      "FourRooms",   "MultiRoom",
    "DoorKey",   "Unlock",         "UnlockPickup", "KeyCorridor", "RedBlueDoors",
    "GoToDoor",  "GoToObject",     "Fetch",        "PutNear",     "DynamicObstacles"};

inline std::string_view task_name(TaskId id) {
  return kTaskNames[static_cast<int>(id)];
}

inline TaskId task_from_name(std::string_view name) {
  for (int i = 0; i < kTaskCount; ++i) {
    if (kTaskNames[i] == name) return static_cast<TaskId>(i);
  }
  throw std::invalid_argument("unknown task id: " + std::string(name));
}

inline bool is_registered_task(std::string_view name) {
  for (int i = 0; i < kTaskCount; ++i) {
    if (kTaskNames[i] == name) return true;
  }
  return false;
}

inline std::vector<TaskId> all_tasks() {
  std::vector<TaskId> out;
  out.reserve(kTaskCount);
  for (int i = 0; i < kTaskCount; ++i) out.push_back(static_cast<TaskId>(i));
  return out;
}

struct GridWorld {
  TaskId task_id = TaskId::Empty;
  int width = 0;
  int height = 0;
  std::vector<GridCell> cells;  // row-major, y * width + x
  Point agent_pos{1, 1};
  Direction agent_dir = Direction::East;
  std::optional<CarriedObject> carrying;
  int step_count = 0;
  int max_steps = 0;
  Mission mission;
  bool finished = false;        // latched by step() on termination/truncation
  std::uint64_t rng_state = 0;  // drives in-episode randomness (moving obstacles)

  bool operator==(const GridWorld&) const = default;

  bool in_bounds(Point p) const {
    return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height;
  }
  const GridCell& at(Point p) const { return cells[p.y * width + p.x]; }
  GridCell& at(Point p) { return cells[p.y * width + p.x]; }

  // A cell the agent may move onto: empty, goal, lava (fatal but enterable),
  // or an open door.
  bool walkable(Point p) const {
    if (!in_bounds(p)) return false;
    const GridCell& c = at(p);
    switch (c.kind) {
      case CellKind::Empty:
      case CellKind::Goal:
      case CellKind::Lava:
        return true;
      case CellKind::Door:
        return c.door_state == DoorState::Open;
      default:
        return false;
    }
  }
};

// Blank world with wall border; interior empty.
inline GridWorld make_blank_world(TaskId id, int width, int height, int max_steps) {
  GridWorld w;
  w.task_id = id;
  w.width = width;
  w.height = height;
  w.max_steps = max_steps;
  w.cells.assign(static_cast<std::size_t>(width) * height, GridCell{});
  for (int x = 0; x < width; ++x) {
    w.at({x, 0}) = wall_cell();
    w.at({x, height - 1}) = wall_cell();
  }
  for (int y = 0; y < height; ++y) {
    w.at({0, y}) = wall_cell();
    w.at({width - 1, y}) = wall_cell();
  }
  return w;
}

}  // namespace gridsched
