#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gridsched/sched/types.hpp"

namespace gridsched {

// Prioritized replay over the fixed task set: rank-transformed value-error
// scores mixed with a staleness term.
struct PlrConfig {
  double beta = 0.1;  // rank temperature
  double rho = 0.1;   // staleness mixing coefficient
};

struct PlrState {
  std::vector<double> score;    // last reported value error
  std::vector<int> last_round;  // -1 = unseen
  std::vector<bool> seen;
  PlrConfig cfg;

  explicit PlrState(int task_count = 0, PlrConfig cfg_in = {})
      : score(static_cast<std::size_t>(task_count), 0.0),
        last_round(static_cast<std::size_t>(task_count), -1),
        seen(static_cast<std::size_t>(task_count), false),
        cfg(cfg_in) {}
};

inline void plr_update(PlrState& state, const Outcome& outcome) {
  if (outcome.task < 0 || outcome.task >= static_cast<int>(state.score.size())) {
    throw std::out_of_range("plr_update: task not registered");
  }
  const std::size_t i = static_cast<std::size_t>(outcome.task);
  state.score[i] = outcome.value_error;  // replacement, not averaging
  state.last_round[i] = outcome.round;
  state.seen[i] = true;
}

inline SampleDistribution plr_distribution(const PlrState& state, int current_round) {
  const std::size_t n = state.score.size();
  std::vector<bool> unseen_mask(n);
  int unseen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    unseen_mask[i] = !state.seen[i];
    if (unseen_mask[i]) ++unseen;
  }
  if (unseen > 0) {
    // forced exploration: uniform over the unseen tasks
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (unseen_mask[i]) w[i] = 1.0 / unseen;
    }
    return SampleDistribution{std::move(w)};
  }

  // rank scores descending, ties broken by task order
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return state.score[a] > state.score[b]; });
  std::vector<double> score_w(n);
  for (std::size_t r = 0; r < n; ++r) {
    score_w[order[r]] = std::pow(1.0 / static_cast<double>(r + 1), 1.0 / state.cfg.beta);
  }
  const SampleDistribution p_score = normalized(std::move(score_w));

  std::vector<double> stale_w(n);
  double total_stale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stale_w[i] = static_cast<double>(current_round - state.last_round[i]);
    total_stale += stale_w[i];
  }
  const SampleDistribution p_stale =
      total_stale > 0.0 ? normalized(std::move(stale_w))
                        : random_distribution(static_cast<int>(n));

  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = (1.0 - state.cfg.rho) * p_score.p[i] + state.cfg.rho * p_stale.p[i];
  }
  return SampleDistribution{std::move(p)};
}

}  // namespace gridsched
