#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gridsched/sched/types.hpp"

namespace gridsched {

// Five-box spaced repetition: success promotes one box, failure demotes to box 1.
struct LeitnerState {
  std::vector<int> box;  // per task, in [1, 5]

  explicit LeitnerState(int task_count = 0)
      : box(static_cast<std::size_t>(task_count), 1) {}
};

inline constexpr int kLeitnerBoxes = 5;

inline void leitner_update(LeitnerState& state, const Outcome& outcome) {
  if (outcome.task < 0 || outcome.task >= static_cast<int>(state.box.size())) {
    throw std::out_of_range("leitner_update: task not registered");
  }
  int& b = state.box[static_cast<std::size_t>(outcome.task)];
  b = outcome.solved ? std::min(b + 1, kLeitnerBoxes) : 1;
}

// Geometric halving per stage: w_i = 2^(1 - box_i), normalized.
inline SampleDistribution leitner_distribution(const LeitnerState& state) {
  std::vector<double> w(state.box.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::pow(2.0, 1.0 - state.box[i]);
  }
  return normalized(std::move(w));
}

}  // namespace gridsched
