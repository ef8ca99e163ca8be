#pragma once

#include <cmath>
#include <vector>

#include "gridsched/sched/types.hpp"

namespace gridsched {

// SM-2 adapted to rollout reward: quality grades 0-5 drive per-task easiness
// factors and geometric review intervals measured in scheduler rounds.
struct Sm2Item {
  double ef = 2.5;     // easiness factor, >= 1.3
  int repetition = 0;
  int interval = 1;    // rounds
  int due_round = 0;
};

struct Sm2State {
  std::vector<Sm2Item> items;

  explicit Sm2State(int task_count = 0)
      : items(static_cast<std::size_t>(task_count)) {}
};

inline int sm2_quality(double episode_reward) {
  if (episode_reward < 0.0 || episode_reward > 1.0) {
    throw std::invalid_argument("sm2_quality: reward outside [0, 1]");
  }
  return static_cast<int>(std::lround(5.0 * episode_reward));
}

inline void sm2_update(Sm2State& state, const Outcome& outcome, int current_round) {
  if (outcome.task < 0 || outcome.task >= static_cast<int>(state.items.size())) {
    throw std::out_of_range("sm2_update: task not registered");
  }
  Sm2Item& it = state.items[static_cast<std::size_t>(outcome.task)];
  const int q = sm2_quality(outcome.episode_reward);
  if (q >= 3) {
    it.repetition += 1;
    if (it.repetition == 1) {
      it.interval = 1;
    } else if (it.repetition == 2) {
      it.interval = 6;
    } else {
      // interval grows by the easiness factor as it was before this update
      it.interval = static_cast<int>(std::lround(it.interval * it.ef));
    }
  } else {
    it.repetition = 0;
    it.interval = 1;
  }
  const double d = 5.0 - q;
  it.ef = std::max(1.3, it.ef + 0.1 - d * (0.08 + d * 0.02));
  it.due_round = current_round + it.interval;
}

// Overdue tasks weigh 1 + rounds overdue; not-yet-due tasks keep a small floor
// so probabilities never collapse to zero.
inline SampleDistribution sm2_distribution(const Sm2State& state, int current_round) {
  constexpr double kFloor = 0.05;
  std::vector<double> w(state.items.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Sm2Item& it = state.items[i];
    w[i] = (it.due_round <= current_round) ? 1.0 + (current_round - it.due_round) : kFloor;
  }
  return normalized(std::move(w));
}

}  // namespace gridsched
