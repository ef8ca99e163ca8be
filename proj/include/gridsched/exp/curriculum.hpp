#pragma once

#include <cstdint>
#include <vector>

#include "gridsched/exp/driver.hpp"
#include "gridsched/sched/scheduler.hpp"

namespace gridsched {

struct ScheduleConfig {
  int total_rounds = 4000;      // one round = one rollout + one update
  int eval_every_rounds = 50;
  int eval_episodes = 10;
  PlrConfig plr;
  std::vector<TaskId> tasks = all_tasks();
};

struct SelectionRow {
  int round = 0;
  int task_index = 0;  // position in ScheduleConfig::tasks
  TaskId task = TaskId::Empty;
  double episode_reward = 0.0;
  bool solved = false;
  double value_error = 0.0;
  double probability = 0.0;  // sampling probability of the selected task
};

struct EvalCell {
  double solve_rate = 0.0;
  double mean_reward = 0.0;
};

struct EvalMatrixRow {
  int round = 0;  // rounds completed when this evaluation ran
  long long step = 0;
  std::vector<EvalCell> cells;  // aligned with ScheduleConfig::tasks
};

struct CurriculumResult {
  Method method = Method::Random;
  std::uint64_t seed = 0;
  std::vector<TaskId> tasks;
  int total_rounds = 0;
  int eval_every_rounds = 0;
  std::vector<SelectionRow> selections;
  std::vector<EvalMatrixRow> evals;
  // filled by normalize_results once a reference pool exists
  double normalized_max = 0.0;
  double normalized_final = 0.0;
};

// Scheduler-driven training over the task set: each round asks the scheduler
// for a distribution, trains one rollout on the sampled task, reports the
// outcome back, and periodically evaluates every task in the set.
inline CurriculumResult run_curriculum(Method method, const TrainConfig& train_cfg,
                                       const ScheduleConfig& schedule, std::uint64_t seed) {
  const int n = static_cast<int>(schedule.tasks.size());
  CurriculumResult res;
  res.method = method;
  res.seed = seed;
  res.tasks = schedule.tasks;
  res.total_rounds = schedule.total_rounds;
  res.eval_every_rounds = schedule.eval_every_rounds;
  res.selections.reserve(static_cast<std::size_t>(schedule.total_rounds));

  PpoDriver driver(train_cfg, seed);
  Scheduler sched(method, n, schedule.plr);
  Rng select_rng(derive_seed(seed, "select", 0));

  for (int round = 0; round < schedule.total_rounds; ++round) {
    const SampleDistribution dist = sched.distribution(round);
    const int task_index = select_task(dist, select_rng);
    const TaskId task = schedule.tasks[static_cast<std::size_t>(task_index)];

    const RolloutStats stats = driver.train_one_rollout(task);

    Outcome outcome;
    outcome.task = task_index;
    outcome.round = round;
    if (!stats.episode_rewards.empty()) {
      double sum = 0.0;
      for (double r : stats.episode_rewards) sum += r;
      outcome.episode_reward = sum / static_cast<double>(stats.episode_rewards.size());
      for (bool s : stats.episode_solved) outcome.solved = outcome.solved || s;
    }
    outcome.value_error = driver.last_value_error();
    sched.report(outcome);

    res.selections.push_back({round, task_index, task, outcome.episode_reward, outcome.solved,
                              outcome.value_error, dist.p[static_cast<std::size_t>(task_index)]});

    if ((round + 1) % schedule.eval_every_rounds == 0) {
      const std::vector<EvalSnapshot> snaps =
          driver.evaluate(schedule.tasks, driver.steps(), schedule.eval_episodes);
      EvalMatrixRow row;
      row.round = round + 1;
      row.step = driver.steps();
      row.cells.reserve(snaps.size());
      for (const EvalSnapshot& s : snaps) row.cells.push_back({s.solve_rate, s.mean_reward});
      res.evals.push_back(std::move(row));
    }
  }
  return res;
}

}  // namespace gridsched
