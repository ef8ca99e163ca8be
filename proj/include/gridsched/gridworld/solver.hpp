#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <optional>
#include <vector>

#include "gridsched/gridworld/types.hpp"

namespace gridsched {

enum class SolveStatus { Solvable, Unsolvable, Overflow };

inline constexpr std::uint64_t kSolverStateCap = 10'000'000;

namespace detail {

// Abstract search state: agent pose, per-door state and per-carriable-object
// status. Dropping is modeled as discarding (the object leaves the grid and
// cannot block or be re-picked); this keeps the state space small and matches
// what a real agent achieves by dropping on a free side cell.
struct OracleModel {
  const GridWorld* world = nullptr;
  std::vector<Point> doors;
  std::vector<Point> objects;  // carriable kinds only (key, ball)
  std::uint64_t pose_count = 0, door_configs = 1, object_configs = 1;

  enum ObjectStatus : int { AtSpawn = 0, Carried = 1, Gone = 2 };

  explicit OracleModel(const GridWorld& w) : world(&w) {
    for (int y = 0; y < w.height; ++y) {
      for (int x = 0; x < w.width; ++x) {
        const GridCell& c = w.at({x, y});
        if (c.kind == CellKind::Door) doors.push_back({x, y});
        if (is_carriable(c.kind)) objects.push_back({x, y});
      }
    }
    pose_count = static_cast<std::uint64_t>(w.width) * w.height * 4;
    for (std::size_t i = 0; i < doors.size(); ++i) door_configs *= 3;
    for (std::size_t i = 0; i < objects.size(); ++i) object_configs *= 3;
  }

  std::uint64_t state_space_size() const {
    return pose_count * door_configs * object_configs;
  }

  struct State {
    Point pos;
    Direction dir;
    std::uint32_t door_cfg = 0;
    std::uint32_t obj_cfg = 0;
  };

  std::uint64_t index(const State& s) const {
    std::uint64_t pose = (static_cast<std::uint64_t>(s.pos.y) * world->width + s.pos.x) * 4 +
                         static_cast<int>(s.dir);
    return (pose * door_configs + s.door_cfg) * object_configs + s.obj_cfg;
  }

  DoorState door_state(const State& s, std::size_t door_idx) const {
    std::uint32_t cfg = s.door_cfg;
    for (std::size_t i = 0; i < door_idx; ++i) cfg /= 3;
    return static_cast<DoorState>(cfg % 3);
  }

  static std::uint32_t with_trit(std::uint32_t cfg, std::size_t idx, std::uint32_t value) {
    std::uint32_t base = 1;
    for (std::size_t i = 0; i < idx; ++i) base *= 3;
    const std::uint32_t old = (cfg / base) % 3;
    return cfg + (value - old) * base;
  }

  int object_status(const State& s, std::size_t obj_idx) const {
    std::uint32_t cfg = s.obj_cfg;
    for (std::size_t i = 0; i < obj_idx; ++i) cfg /= 3;
    return static_cast<int>(cfg % 3);
  }

  int door_index_at(Point p) const {
    for (std::size_t i = 0; i < doors.size(); ++i) {
      if (doors[i] == p) return static_cast<int>(i);
    }
    return -1;
  }

  int object_index_at(Point p) const {
    for (std::size_t i = 0; i < objects.size(); ++i) {
      if (objects[i] == p) return static_cast<int>(i);
    }
    return -1;
  }

  int carried_object(const State& s) const {
    for (std::size_t i = 0; i < objects.size(); ++i) {
      if (object_status(s, i) == Carried) return static_cast<int>(i);
    }
    return -1;
  }

  // Enterable by forward moves during search; lava is never entered (fatal).
  bool enterable(const State& s, Point p) const {
    if (!world->in_bounds(p)) return false;
    const int oi = object_index_at(p);
    if (oi >= 0 && object_status(s, oi) == AtSpawn) return false;
    const GridCell& c = world->at(p);
    switch (c.kind) {
      case CellKind::Empty:
      case CellKind::Goal:
        return true;
      case CellKind::Key:
      case CellKind::Ball:
        return true;  // base cell is free once the spawn object is removed
      case CellKind::Door:
        return door_state(s, static_cast<std::size_t>(door_index_at(p))) == DoorState::Open;
      default:
        return false;
    }
  }

  bool success(const State& s) const {
    const Mission& m = world->mission;
    switch (m.success_kind) {
      case SuccessKind::ReachGoal:
        return world->at(s.pos).kind == CellKind::Goal;
      case SuccessKind::ReachTargetCell:
        return s.pos == m.target_pos;
      case SuccessKind::PickupTarget: {
        const int ci = carried_object(s);
        if (ci < 0) return false;
        const GridCell& oc = world->at(objects[ci]);
        return oc.kind == m.target_kind && oc.color == m.target_color;
      }
      case SuccessKind::AdjacentToTarget: {
        const int dist = std::abs(s.pos.x - m.target_pos.x) +
                         std::abs(s.pos.y - m.target_pos.y);
        if (dist != 1) return false;
        if (!m.require_carry) return true;
        const int ci = carried_object(s);
        if (ci < 0) return false;
        const GridCell& oc = world->at(objects[ci]);
        return oc.kind == m.require_carry->kind && oc.color == m.require_carry->color;
      }
    }
    return false;
  }

  State initial() const {
    State s;
    s.pos = world->agent_pos;
    s.dir = world->agent_dir;
    std::uint32_t dcfg = 0, base = 1;
    for (std::size_t i = 0; i < doors.size(); ++i) {
      dcfg += static_cast<std::uint32_t>(world->at(doors[i]).door_state) * base;
      base *= 3;
    }
    s.door_cfg = dcfg;
    s.obj_cfg = 0;  // everything at spawn
    return s;
  }
};

struct BfsOutcome {
  SolveStatus status = SolveStatus::Unsolvable;
  std::vector<Action> path;  // filled only when requested and solvable
};

inline BfsOutcome bfs_solve(const GridWorld& w, bool record_path) {
  OracleModel model(w);
  if (model.state_space_size() > kSolverStateCap || w.carrying) {
    return {SolveStatus::Overflow, {}};
  }

  using State = OracleModel::State;
  const std::uint64_t n = model.state_space_size();
  std::vector<bool> visited(n, false);
  std::vector<std::uint64_t> parent;
  std::vector<std::uint8_t> parent_action;
  if (record_path) {
    parent.assign(n, 0);
    parent_action.assign(n, 0);
  }
  std::deque<State> frontier;

  const State start = model.initial();
  if (model.success(start)) return {SolveStatus::Solvable, {}};
  const std::uint64_t start_idx = model.index(start);
  visited[start_idx] = true;
  frontier.push_back(start);

  std::optional<std::uint64_t> goal_idx;
  auto visit = [&](const State& from, const State& to, Action a) -> bool {
    const std::uint64_t idx = model.index(to);
    if (visited[idx]) return false;
    visited[idx] = true;
    if (record_path) {
      parent[idx] = model.index(from);
      parent_action[idx] = static_cast<std::uint8_t>(a);
    }
    if (model.success(to)) {
      goal_idx = idx;
      return true;
    }
    frontier.push_back(to);
    return false;
  };

  while (!frontier.empty() && !goal_idx) {
    const State s = frontier.front();
    frontier.pop_front();

    {
      State n1 = s;
      n1.dir = turn_left(s.dir);
      if (visit(s, n1, Action::TurnLeft)) break;
      State n2 = s;
      n2.dir = turn_right(s.dir);
      if (visit(s, n2, Action::TurnRight)) break;
    }

    const Point f = forward_offset(s.dir);
    const Point front{s.pos.x + f.x, s.pos.y + f.y};

    if (model.enterable(s, front)) {
      State n1 = s;
      n1.pos = front;
      if (visit(s, n1, Action::Forward)) break;
    }
    if (!w.in_bounds(front)) continue;
    const int carried = model.carried_object(s);

    const int oi = model.object_index_at(front);
    if (oi >= 0 && carried < 0 && model.object_status(s, oi) == OracleModel::AtSpawn) {
      State n1 = s;
      n1.obj_cfg = OracleModel::with_trit(s.obj_cfg, oi, OracleModel::Carried);
      if (visit(s, n1, Action::Pickup)) break;
    }
    if (carried >= 0) {
      State n1 = s;
      n1.obj_cfg = OracleModel::with_trit(s.obj_cfg, carried, OracleModel::Gone);
      if (visit(s, n1, Action::Drop)) break;
    }
    // Toggling only ever opens doors during search; closing cannot help.
    const int di = model.door_index_at(front);
    if (di >= 0) {
      const DoorState ds = model.door_state(s, di);
      bool can_open = ds == DoorState::Closed;
      if (ds == DoorState::Locked && carried >= 0) {
        const GridCell& oc = w.at(model.objects[carried]);
        can_open = oc.kind == CellKind::Key && oc.color == w.at(model.doors[di]).color;
      }
      if (can_open) {
        State n1 = s;
        n1.door_cfg =
            OracleModel::with_trit(s.door_cfg, di, static_cast<std::uint32_t>(DoorState::Open));
        if (visit(s, n1, Action::Toggle)) break;
      }
    }
  }

  if (!goal_idx) return {SolveStatus::Unsolvable, {}};
  BfsOutcome out;
  out.status = SolveStatus::Solvable;
  if (record_path) {
    std::uint64_t cur = *goal_idx;
    while (cur != start_idx) {
      out.path.push_back(static_cast<Action>(parent_action[cur]));
      cur = parent[cur];
    }
    std::reverse(out.path.begin(), out.path.end());
  }
  return out;
}

}  // namespace detail

// Breadth-first search over (position, direction, carried object, door
// states); moving obstacles are evaluated frozen at their spawn cells.
// State spaces beyond kSolverStateCap report Overflow (treated as unsolvable
// by generators, which then regenerate).
inline SolveStatus solve_status(const GridWorld& w) {
  return detail::bfs_solve(w, false).status;
}

inline bool solvable(const GridWorld& w) {
  return solve_status(w) == SolveStatus::Solvable;
}

// Action sequence of a shortest solution, or nullopt when not solvable.
inline std::optional<std::vector<Action>> shortest_solution(const GridWorld& w) {
  detail::BfsOutcome out = detail::bfs_solve(w, true);
  if (out.status != SolveStatus::Solvable) return std::nullopt;
  return out.path;
}

}  // namespace gridsched
