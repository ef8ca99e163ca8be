#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gridsched/common/rng.hpp"
#include "gridsched/gridworld/step.hpp"
#include "gridsched/gridworld/tasks.hpp"
#include "gridsched/learner/mlp.hpp"

namespace gridsched {

struct Transition {
  Observation observation;
  int action = 0;
  double log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;  // terminated or truncated
};

struct RolloutBuffer {
  std::vector<Transition> transitions;
  double bootstrap_value = 0.0;  // V of the state after the last transition, 0 if done
};

struct RolloutStats {
  std::vector<double> episode_rewards;  // terminal reward of each completed episode
  std::vector<bool> episode_solved;
  int steps = 0;
};

struct RolloutResult {
  RolloutBuffer buffer;
  RolloutStats stats;
};

// On-policy rollout of exactly `length` steps on freshly generated instances of
// one task. Every rollout begins a new episode; episodes ending mid-rollout
// roll straight into the next instance. Instance seeds come from env_rng,
// action sampling from action_rng, keeping the two streams independent.
inline RolloutResult collect_rollout(const MlpParams& params, TaskId task, int length,
                                     Rng& env_rng, Rng& action_rng) {
  RolloutResult out;
  out.buffer.transitions.reserve(static_cast<std::size_t>(length));
  GridWorld world = make_task(task, env_rng.next_u64());
  Observation obs = encode_observation(world);
  for (int t = 0; t < length; ++t) {
    const PolicyOutput po = policy_forward(params, obs);
    const Action a = sample_action(po.probs, action_rng);
    const StepResult sr = step(world, a);
    Transition tr;
    tr.observation = std::move(obs);
    tr.action = static_cast<int>(a);
    tr.log_prob = po.log_probs[static_cast<int>(a)];
    tr.reward = sr.reward;
    tr.value = po.value;
    tr.done = sr.terminated || sr.truncated;
    out.buffer.transitions.push_back(std::move(tr));
    ++out.stats.steps;
    if (sr.terminated || sr.truncated) {
      out.stats.episode_rewards.push_back(sr.reward);
      out.stats.episode_solved.push_back(sr.success);
      world = make_task(task, env_rng.next_u64());
      obs = encode_observation(world);
    } else {
      obs = sr.observation;
    }
  }
  if (!out.buffer.transitions.back().done) {
    out.buffer.bootstrap_value = policy_forward(params, obs).value;
  }
  return out;
}

}  // namespace gridsched
