#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gridsched/exp/driver.hpp"
#include "gridsched/exp/phases.hpp"

namespace gridsched {

struct AlternationConfig {
  TaskId task_a = TaskId::SimpleCrossing;  // monitored task; training starts here
  TaskId task_b = TaskId::Empty;
  double upper = 0.8;  // switch a->b when task_a solve rate reaches this
  double lower = 0.1;  // switch b->a when task_a solve rate falls to this
  long long eval_every = 2000;  // environment steps between evaluations
  int eval_episodes = 20;
  long long max_total_steps = 2'000'000;
};

struct TraceRow {
  long long step = 0;
  TaskId trained = TaskId::Empty;  // task being trained when this eval ran
  TaskId eval_task = TaskId::Empty;
  double solve_rate = 0.0;
  double mean_reward = 0.0;
};

struct AlternationResult {
  std::vector<TraceRow> trace;      // one row per (eval point, eval task)
  std::vector<PhaseRecord> phases;  // monitored task = task_a
  ForgettingClass classification;   // from forgetting-phase durations
  int switches = 0;
  bool warning_no_switch = false;
};

inline std::vector<double> forgetting_durations(const std::vector<PhaseRecord>& phases) {
  std::vector<double> out;
  for (const PhaseRecord& p : phases) {
    if (p.kind == PhaseKind::Forgetting) out.push_back(static_cast<double>(p.duration()));
  }
  return out;
}

// Alternation engine shared by the forgetting and cross-training studies.
// Train the current task to the next eval boundary, evaluate every task in
// eval_tasks, then apply the switching rule -- read on task_a only -- unless
// the budget just ran out. Driver needs:
//   long long train_until(TaskId, long long target_step);
//   std::vector<EvalSnapshot> evaluate(const std::vector<TaskId>&, long long step, int episodes);
template <class Driver>
AlternationResult run_alternation_core(const AlternationConfig& cfg,
                                       const std::vector<TaskId>& eval_tasks, Driver& driver) {
  AlternationResult res;
  std::vector<std::pair<long long, double>> monitor_trace;
  TaskId current = cfg.task_a;
  long long next_eval = cfg.eval_every;
  while (true) {
    const long long steps = driver.train_until(current, next_eval);
    const std::vector<EvalSnapshot> snaps =
        driver.evaluate(eval_tasks, steps, cfg.eval_episodes);
    double a_rate = 0.0;
    for (std::size_t i = 0; i < eval_tasks.size(); ++i) {
      res.trace.push_back(
          {steps, current, eval_tasks[i], snaps[i].solve_rate, snaps[i].mean_reward});
      if (eval_tasks[i] == cfg.task_a) a_rate = snaps[i].solve_rate;
    }
    monitor_trace.emplace_back(steps, a_rate);
    next_eval += cfg.eval_every;
    if (steps >= cfg.max_total_steps) break;
    if (current == cfg.task_a && a_rate >= cfg.upper) {
      current = cfg.task_b;
      ++res.switches;
    } else if (current == cfg.task_b && a_rate <= cfg.lower) {
      current = cfg.task_a;
      ++res.switches;
    }
  }
  res.phases = detect_phases(monitor_trace, cfg.upper, cfg.lower);
  for (PhaseRecord& p : res.phases) {
    p.monitored_task = cfg.task_a;
    p.trained_task = p.kind == PhaseKind::Learning ? cfg.task_a : cfg.task_b;
  }
  res.classification = classify_forgetting(forgetting_durations(res.phases));
  res.warning_no_switch = res.switches == 0;
  return res;
}

// The forgetting-curve study: alternate SimpleCrossing/Empty on the switching
// protocol and report phases plus the forgetting classification.
inline AlternationResult run_forgetting_alternation(const AlternationConfig& cfg,
                                                    const TrainConfig& train_cfg,
                                                    std::uint64_t seed) {
  PpoDriver driver(train_cfg, seed);
  return run_alternation_core(cfg, {cfg.task_a, cfg.task_b}, driver);
}

}  // namespace gridsched
