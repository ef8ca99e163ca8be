#pragma once

#include <optional>

#include "gridsched/exp/alternation.hpp"

namespace gridsched {

// One leg of the cross-training study: the usual alternation between a
// trained task and its buddy (Empty in the paper's protocol), with a related
// partner task evaluated at every point but never trained.
struct CrosstrainResult {
  TaskId trained = TaskId::Empty;
  TaskId buddy = TaskId::Empty;
  TaskId partner = TaskId::Empty;
  AlternationResult alternation;
};

inline CrosstrainResult run_crosstrain(TaskId trained, TaskId buddy, TaskId partner,
                                       AlternationConfig cfg, const TrainConfig& train_cfg,
                                       std::uint64_t seed) {
  cfg.task_a = trained;
  cfg.task_b = buddy;
  CrosstrainResult res;
  res.trained = trained;
  res.buddy = buddy;
  res.partner = partner;
  PpoDriver driver(train_cfg, seed);
  std::vector<TaskId> eval_tasks = {trained, buddy};
  if (partner != trained && partner != buddy) eval_tasks.push_back(partner);
  res.alternation = run_alternation_core(cfg, eval_tasks, driver);
  return res;
}

// Normalized area under the partner task's solve-rate curve across the eval
// points inside the trained task's completed learning phases: with uniform
// eval spacing this is the mean solve rate in (start, end]. Empty when the
// run finished no learning phase.
inline std::optional<double> partner_auc(const CrosstrainResult& res) {
  double total = 0.0;
  int count = 0;
  for (const PhaseRecord& ph : res.alternation.phases) {
    if (ph.kind != PhaseKind::Learning) continue;
    for (const TraceRow& row : res.alternation.trace) {
      if (row.eval_task != res.partner) continue;
      if (row.step > ph.start_step && row.step <= ph.end_step) {
        total += row.solve_rate;
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;
  return total / count;
}

// asymmetry(x, y) = A(y|x) - A(x|y): positive means training x helps y more
// than training y helps x. Undefined (nullopt) when either leg finished no
// learning phase.
inline std::optional<double> transfer_asymmetry(const CrosstrainResult& result_xy,
                                                const CrosstrainResult& result_yx) {
  const std::optional<double> a_y_given_x = partner_auc(result_xy);
  const std::optional<double> a_x_given_y = partner_auc(result_yx);
  if (!a_y_given_x || !a_x_given_y) return std::nullopt;
  return *a_y_given_x - *a_x_given_y;
}

}  // namespace gridsched
