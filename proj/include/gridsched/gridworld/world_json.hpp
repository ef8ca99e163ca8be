#pragma once

#include <string>

#include <json.hpp>

#include "gridsched/gridworld/types.hpp"

namespace gridsched {

namespace detail {

inline constexpr char kKindChars[kCellKindCount + 1] = ".#~GDKAB";
inline constexpr char kColorChars[kColorCount + 1] = "rgbpye";
inline constexpr char kStateChars[kDoorStateCount + 1] = "ocl";

inline int index_of(const char* table, int count, char c, const char* what) {
  for (int i = 0; i < count; ++i) {
    if (table[i] == c) return i;
  }
  throw std::invalid_argument(std::string("bad ") + what + " character: " + c);
}

inline std::string cell_token(const GridCell& c) {
  std::string t(3, '-');
  t[0] = kKindChars[static_cast<int>(c.kind)];
  const bool colored = c.kind == CellKind::Door || c.kind == CellKind::Key ||
                       c.kind == CellKind::Ball || c.kind == CellKind::Box;
  if (colored) t[1] = kColorChars[static_cast<int>(c.color)];
  if (c.kind == CellKind::Door) t[2] = kStateChars[static_cast<int>(c.door_state)];
  return t;
}

inline GridCell cell_from_token(const std::string& t) {
  GridCell c;
  c.kind = static_cast<CellKind>(index_of(kKindChars, kCellKindCount, t.at(0), "cell kind"));
  if (t[1] != '-') c.color = static_cast<Color>(index_of(kColorChars, kColorCount, t[1], "color"));
  if (t[2] != '-') {
    c.door_state = static_cast<DoorState>(index_of(kStateChars, kDoorStateCount, t[2], "door state"));
  }
  return c;
}

inline const char* success_kind_name(SuccessKind k) {
  switch (k) {
    case SuccessKind::ReachGoal: return "reach_goal";
    case SuccessKind::ReachTargetCell: return "reach_target_cell";
    case SuccessKind::PickupTarget: return "pickup_target";
    case SuccessKind::AdjacentToTarget: return "adjacent_to_target";
  }
  return "reach_goal";
}

inline SuccessKind success_kind_from_name(const std::string& s) {
  if (s == "reach_goal") return SuccessKind::ReachGoal;
  if (s == "reach_target_cell") return SuccessKind::ReachTargetCell;
  if (s == "pickup_target") return SuccessKind::PickupTarget;
  if (s == "adjacent_to_target") return SuccessKind::AdjacentToTarget;
  throw std::invalid_argument("bad success kind: " + s);
}

inline nlohmann::json carried_to_json(const std::optional<CarriedObject>& c) {
  if (!c) return nullptr;
  return nlohmann::json{{"kind", std::string(1, kKindChars[static_cast<int>(c->kind)])},
                        {"color", std::string(1, kColorChars[static_cast<int>(c->color)])}};
}

inline std::optional<CarriedObject> carried_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  CarriedObject c;
  c.kind = static_cast<CellKind>(
      index_of(kKindChars, kCellKindCount, j.at("kind").get<std::string>().at(0), "cell kind"));
  c.color = static_cast<Color>(
      index_of(kColorChars, kColorCount, j.at("color").get<std::string>().at(0), "color"));
  return c;
}

}  // namespace detail

// Compact grid dump: one 3-character token per cell (kind, color, door
// state; '-' where not meaningful). Round-trips exactly.
inline nlohmann::json world_to_json(const GridWorld& w) {
  nlohmann::json rows = nlohmann::json::array();
  for (int y = 0; y < w.height; ++y) {
    std::string row;
    for (int x = 0; x < w.width; ++x) row += detail::cell_token(w.at({x, y}));
    rows.push_back(row);
  }
  const char dir_chars[5] = "NESW";
  nlohmann::json mission{
      {"success", detail::success_kind_name(w.mission.success_kind)},
      {"target", {{"x", w.mission.target_pos.x}, {"y", w.mission.target_pos.y}}},
      {"target_kind", std::string(1, detail::kKindChars[static_cast<int>(w.mission.target_kind)])},
      {"target_color", std::string(1, detail::kColorChars[static_cast<int>(w.mission.target_color)])},
      {"require_carry", detail::carried_to_json(w.mission.require_carry)},
  };
  return nlohmann::json{
      {"task", std::string(task_name(w.task_id))},
      {"width", w.width},
      {"height", w.height},
      {"rows", rows},
      {"agent", {{"x", w.agent_pos.x}, {"y", w.agent_pos.y},
                 {"dir", std::string(1, dir_chars[static_cast<int>(w.agent_dir)])}}},
      {"carrying", detail::carried_to_json(w.carrying)},
      {"step_count", w.step_count},
      {"max_steps", w.max_steps},
      {"finished", w.finished},
      {"rng_state", w.rng_state},
      {"mission", mission},
  };
}

inline GridWorld world_from_json(const nlohmann::json& j) {
  GridWorld w;
  w.task_id = task_from_name(j.at("task").get<std::string>());
  w.width = j.at("width").get<int>();
  w.height = j.at("height").get<int>();
  w.cells.assign(static_cast<std::size_t>(w.width) * w.height, GridCell{});
  const auto& rows = j.at("rows");
  for (int y = 0; y < w.height; ++y) {
    const std::string row = rows.at(y).get<std::string>();
    for (int x = 0; x < w.width; ++x) {
      w.at({x, y}) = detail::cell_from_token(row.substr(static_cast<std::size_t>(x) * 3, 3));
    }
  }
  const auto& agent = j.at("agent");
  w.agent_pos = {agent.at("x").get<int>(), agent.at("y").get<int>()};
  const std::string dir = agent.at("dir").get<std::string>();
  w.agent_dir = static_cast<Direction>(detail::index_of("NESW", 4, dir.at(0), "direction"));
  w.carrying = detail::carried_from_json(j.at("carrying"));
  w.step_count = j.at("step_count").get<int>();
  w.max_steps = j.at("max_steps").get<int>();
  w.finished = j.at("finished").get<bool>();
  w.rng_state = j.at("rng_state").get<std::uint64_t>();
  const auto& m = j.at("mission");
  w.mission.success_kind = detail::success_kind_from_name(m.at("success").get<std::string>());
  w.mission.target_pos = {m.at("target").at("x").get<int>(), m.at("target").at("y").get<int>()};
  w.mission.target_kind = static_cast<CellKind>(detail::index_of(
      detail::kKindChars, kCellKindCount, m.at("target_kind").get<std::string>().at(0), "cell kind"));
  w.mission.target_color = static_cast<Color>(detail::index_of(
      detail::kColorChars, kColorCount, m.at("target_color").get<std::string>().at(0), "color"));
  w.mission.require_carry = detail::carried_from_json(m.at("require_carry"));
  return w;
}

}  // namespace gridsched
