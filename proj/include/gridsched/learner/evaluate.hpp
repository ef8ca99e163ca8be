#pragma once

#include <cstdint>
#include <utility>

#include "gridsched/common/rng.hpp"
#include "gridsched/gridworld/step.hpp"
#include "gridsched/gridworld/tasks.hpp"
#include "gridsched/learner/mlp.hpp"

namespace gridsched {

struct EvalSnapshot {
  TaskId task = TaskId::Empty;
  int n_episodes = 0;
  double mean_reward = 0.0;
  double solve_rate = 0.0;
  long long step_index = 0;  // global env-step counter at evaluation time
};

// Shared episode loop so scripted policies in tests run through exactly the
// machinery the learned policy uses. Policy signature:
//   Action policy(const GridWorld&, const Observation&, Rng&)
template <class Policy>
EvalSnapshot evaluate_policy_with(Policy&& policy, TaskId task, int n_episodes, Rng& rng,
                                  long long step_index = 0) {
  EvalSnapshot snap;
  snap.task = task;
  snap.n_episodes = n_episodes;
  snap.step_index = step_index;
  for (int ep = 0; ep < n_episodes; ++ep) {
    GridWorld world = make_task(task, rng.next_u64());
    Observation obs = encode_observation(world);
    while (true) {
      const Action a = policy(std::as_const(world), std::as_const(obs), rng);
      StepResult sr = step(world, a);
      if (sr.terminated || sr.truncated) {
        snap.mean_reward += sr.reward;
        if (sr.success) snap.solve_rate += 1.0;
        break;
      }
      obs = std::move(sr.observation);
    }
  }
  snap.mean_reward /= n_episodes;
  snap.solve_rate /= n_episodes;
  return snap;
}

// Evaluation on fresh instances with the same stochastic sampling used during
// training (greedy argmax available as a config switch).
inline EvalSnapshot evaluate_policy(const MlpParams& params, TaskId task, int n_episodes,
                                    Rng& rng, long long step_index = 0, bool stochastic = true) {
  return evaluate_policy_with(
      [&](const GridWorld&, const Observation& obs, Rng& r) {
        const PolicyOutput po = policy_forward(params, obs);
        return stochastic ? sample_action(po.probs, r) : greedy_action(po.probs);
      },
      task, n_episodes, rng, step_index);
}

}  // namespace gridsched
